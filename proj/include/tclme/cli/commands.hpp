// commands.hpp — CLI verbs: rates | evolve | exact | compare | limits.
//
// Every verb writes its primary output to `out`: CSV (or JSON when
// output.format = json) for tables, JSON for reports. evolve and exact also
// write a `<out>.summary.json` sidecar.

#pragma once

#include "tclme/cli/config.hpp"
#include "tclme/master_eq.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tclme::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 1,
    kRuntimeAbort = 2,
    kCheckFailure = 3,
};

// Band that err(lambda)/err(lambda/2) must fall in for compare to pass.
inline constexpr double kRatioLow = 6.0;
inline constexpr double kRatioHigh = 10.0;
// Smaller error of a ratio must exceed this for the ratio to be reported.
inline constexpr double kRatioNoiseFloor = 1e-12;

inline const std::vector<std::string> kRateColumns = {
    "t", "D_R", "D_I", "D_Rp", "D_Ip", "int_D_R", "int_D_I", "int_D_Rp", "int_D_Ip"};
inline const std::vector<std::string> kTrajectoryColumns = {
    "t", "rho00", "re_rho01", "im_rho01", "re_rho10", "im_rho10", "rho11", "trace_err", "herm_err"};

// Shortest-safe text form: 17 significant digits.
std::string format_double(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Table trajectory_table(const me::Trajectory& traj);
void write_csv(const Table& table, std::ostream& out);
Table read_csv(std::istream& in);
void write_table(const Table& table, const std::filesystem::path& path, const std::string& format);

int cmd_rates(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_evolve(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_exact(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_compare(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_limits(const RunConfig& cfg, const std::filesystem::path& out);

// Loads the config, dispatches `verb` and maps exceptions to exit codes.
// `out` empty means output.path from the config.
int run_command(std::string_view verb, const std::filesystem::path& config,
                const std::filesystem::path& out, std::ostream& log);

} // namespace tclme::cli
