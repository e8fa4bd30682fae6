// config.hpp — Run configuration: a flat `section.key = value` text format.
//
//   # comment
//   model.omega0 = 1.0
//   model.beta = vacuum            # or a positive number
//   model.modes = 1.0:0.05, 1.3:0.02   # omega:g pairs, OR the spectral block:
//   model.spectral.density = ohmic # ohmic | flat
//   model.spectral.eta = 0.01
//   model.spectral.omega_c = 5
//   model.spectral.omega_min = 0.01
//   model.spectral.omega_max = 10
//   model.spectral.mode_count = 400
//   simulation.t_max = 10
//   simulation.samples = 101
//   simulation.rk4_substeps = 0    # 0 = automatic
//   initial.rho00 = 1.0
//   initial.rho01 = 0.0 0.0        # real imaginary
//   oracle.n_max = 4
//   oracle.enabled = true
//   output.format = csv            # csv | json
//   output.path = result.csv
//
// Unknown or repeated keys are errors.

#pragma once

#include "tclme/algebra.hpp"
#include "tclme/spin_boson.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tclme::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

struct ModelBlock {
    double omega0 = 1.0;
    double beta = sb::kVacuum;
    std::optional<std::vector<sb::Mode>> modes;
    std::optional<sb::SpectralDiscretization> discretization;
};

struct SimulationBlock {
    double t_max = 0.0;
    int samples = 0;
    int rk4_substeps = 0;
};

struct InitialBlock {
    double rho00 = 1.0;
    Complex rho01 = 0.0;
};

struct OracleBlock {
    int n_max = 4;
    bool n_max_explicit = false;
    bool enabled = false;
};

struct OutputBlock {
    std::string format = "csv";
    std::string path;
};

struct RunConfig {
    ModelBlock model_block;
    SimulationBlock simulation;
    InitialBlock initial;
    OracleBlock oracle;
    OutputBlock output;

    sb::SpinBosonModel model() const;
    ComplexMatrix initial_state() const;
    std::vector<double> grid() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

} // namespace tclme::cli
