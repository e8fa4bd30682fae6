// commands.cpp — Implementation of the CLI verbs

#include "tclme/cli/commands.hpp"

#include "tclme/oracle.hpp"
#include "tclme/spin_boson.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

namespace tclme::cli {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Table trajectory_table(const me::Trajectory& traj) {
    Table table;
    table.columns = kTrajectoryColumns;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const ComplexMatrix& r = traj.states[i];
        table.rows.push_back({traj.times[i], r(0, 0).real(), r(0, 1).real(), r(0, 1).imag(), r(1, 0).real(),
                              r(1, 0).imag(), r(1, 1).real(), std::abs(r.trace() - 1.0), hermiticity_error(r)});
    }
    return table;
}

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

Table read_csv(std::istream& in) {
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: missing header row");
    {
        std::istringstream header(line);
        std::string col;
        while (std::getline(header, col, ',')) table.columns.push_back(col);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') throw std::runtime_error("read_csv: bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != table.columns.size()) throw std::runtime_error("read_csv: ragged row");
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

void write_json(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

json table_json(const Table& table) {
    json doc;
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) rows.push_back(row);
    doc["rows"] = std::move(rows);
    return doc;
}

std::filesystem::path sidecar_path(const std::filesystem::path& out) {
    return std::filesystem::path(out.string() + ".summary.json");
}

json beta_json(double beta) {
    return beta == sb::kVacuum ? json("vacuum") : json(beta);
}

json model_json(const sb::SpinBosonModel& m) {
    json doc;
    doc["omega0"] = m.omega0;
    doc["beta"] = beta_json(m.beta);
    doc["mode_count"] = m.modes.size();
    return doc;
}

me::PropagateOptions propagate_options(const RunConfig& cfg, const sb::SpinBosonModel& model) {
    me::PropagateOptions opts;
    opts.substeps = cfg.simulation.rk4_substeps;
    opts.max_step = sb::recommended_max_step(model);
    opts.model_tag = "spin-boson";
    return opts;
}

me::Trajectory run_master_equation(const RunConfig& cfg, const sb::SpinBosonModel& model) {
    return me::propagate(sb::generator(model), cfg.initial_state(), cfg.grid(), propagate_options(cfg, model));
}

json trajectory_summary(const me::Trajectory& traj) {
    json doc;
    const ComplexMatrix& last = traj.states.back();
    doc["final"] = {{"t", traj.times.back()},
                    {"rho00", last(0, 0).real()},
                    {"rho01", {last(0, 1).real(), last(0, 1).imag()}},
                    {"rho11", last(1, 1).real()}};
    doc["max_trace_err"] = *std::max_element(traj.trace_errors.begin(), traj.trace_errors.end());
    doc["max_herm_err"] = *std::max_element(traj.hermiticity_errors.begin(), traj.hermiticity_errors.end());
    doc["min_eigenvalue"] = *std::min_element(traj.min_eigenvalues.begin(), traj.min_eigenvalues.end());
    return doc;
}

json truncation_json(const oracle::TruncationReport& r) {
    json doc;
    doc["checked"] = r.checked;
    doc["n_max"] = r.n_max;
    doc["n_max_reference"] = r.n_max_reference;
    if (r.checked) {
        doc["max_change"] = r.max_change;
        doc["converged"] = r.converged;
    }
    return doc;
}

} // namespace

void write_table(const Table& table, const std::filesystem::path& path, const std::string& format) {
    if (format == "json") {
        write_json(table_json(table), path);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path.string() + "'");
    write_csv(table, out);
}

// ---------------------------------------------------------------------------

int cmd_rates(const RunConfig& cfg, const std::filesystem::path& out) {
    const sb::RateFunctions rates(cfg.model());
    Table table;
    table.columns = kRateColumns;
    for (double t : cfg.grid()) {
        const sb::RateValues r = rates.at(t);
        const sb::RateValues in = rates.integral(t);
        table.rows.push_back({t, r.d_r, r.d_i, r.d_rp, r.d_ip, in.d_r, in.d_i, in.d_rp, in.d_ip});
    }
    write_table(table, out, cfg.output.format);
    return kSuccess;
}

int cmd_evolve(const RunConfig& cfg, const std::filesystem::path& out) {
    const sb::SpinBosonModel model = cfg.model();
    const me::Trajectory traj = run_master_equation(cfg, model);
    write_table(trajectory_table(traj), out, cfg.output.format);

    const sb::RateFunctions rates(model);
    const double t_end = traj.times.back();
    const sb::RateValues r = rates.at(t_end);
    const sb::RateValues in = rates.integral(t_end);

    json doc;
    doc["command"] = "evolve";
    doc["model"] = model_json(model);
    doc["integrator"] = traj.metadata.integrator;
    doc["step"] = traj.metadata.step;
    doc["substeps"] = traj.metadata.substeps;
    doc.update(trajectory_summary(traj));
    // Fixed point of the population equation with the rates frozen at t_end.
    const double denom = r.d_r + r.d_rp;
    doc["steady_state_estimate"] = {{"rho00", denom > 0.0 ? json(r.d_r / denom) : json(nullptr)}};
    doc["decay"] = {{"coherence_factor", std::exp(-4.0 * (in.d_r + in.d_rp))},
                    {"population_factor", std::exp(-8.0 * (in.d_r + in.d_rp))},
                    {"high_temperature_factor", std::exp(-16.0 * in.d_r)}};
    write_json(doc, sidecar_path(out));
    return kSuccess;
}

int cmd_exact(const RunConfig& cfg, const std::filesystem::path& out) {
    const sb::SpinBosonModel model = cfg.model();
    oracle::TruncatedBath bath;
    bath.n_max = cfg.oracle.n_max;
    const std::vector<double> grid = cfg.grid();
    const me::Trajectory traj = oracle::exact_reduced_dynamics(model, bath, cfg.initial_state(), grid);
    write_table(trajectory_table(traj), out, cfg.output.format);

    json doc;
    doc["command"] = "exact";
    doc["model"] = model_json(model);
    doc["integrator"] = traj.metadata.integrator;
    doc.update(trajectory_summary(traj));
    doc["truncation"] = truncation_json(oracle::check_truncation(model, bath, cfg.initial_state(), grid));
    write_json(doc, sidecar_path(out));
    return kSuccess;
}

int cmd_compare(const RunConfig& cfg, const std::filesystem::path& out) {
    if (!cfg.oracle.enabled) throw ConfigError(0, "oracle.enabled", "compare requires the oracle to be enabled");
    const sb::SpinBosonModel model = cfg.model();
    oracle::TruncatedBath bath;
    bath.n_max = cfg.oracle.n_max;
    bath.require_within_cap(model.modes.size());
    const std::vector<double> grid = cfg.grid();
    const ComplexMatrix rho0 = cfg.initial_state();

    const std::vector<double> lambdas = {1.0, 0.5, 0.25};
    std::vector<std::vector<double>> distances;
    for (double lambda : lambdas) {
        const sb::SpinBosonModel m = sb::scaled(model, lambda);
        auto me_future = std::async(std::launch::async, [&cfg, m] { return run_master_equation(cfg, m); });
        const me::Trajectory exact = oracle::exact_reduced_dynamics(m, bath, rho0, grid);
        const me::Trajectory approx = me_future.get();
        std::vector<double> d(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) d[i] = (approx.states[i] - exact.states[i]).norm();
        distances.push_back(std::move(d));
    }

    json doc;
    doc["command"] = "compare";
    doc["model"] = model_json(model);
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({{"t", grid[i]}, {"frobenius", distances[0][i]}});
    doc["distances"] = std::move(rows);

    json scaling = json::array();
    for (std::size_t k = 0; k < lambdas.size(); ++k)
        scaling.push_back({{"lambda", lambdas[k]}, {"t", grid.back()}, {"error", distances[k].back()}});
    doc["scaling"] = std::move(scaling);

    bool all_pass = true;
    json ratios = json::array();
    for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
        const double big = distances[k].back();
        const double small = distances[k + 1].back();
        json entry = {{"lambda", lambdas[k]}, {"lambda_half", lambdas[k + 1]}};
        if (small > kRatioNoiseFloor) {
            const double ratio = big / small;
            const bool pass = ratio >= kRatioLow && ratio <= kRatioHigh;
            entry["ratio"] = ratio;
            entry["pass"] = pass;
            all_pass = all_pass && pass;
        } else {
            entry["ratio"] = nullptr;
            entry["note"] = "below noise floor";
        }
        ratios.push_back(std::move(entry));
    }
    doc["ratios"] = std::move(ratios);
    doc["ratio_band"] = {kRatioLow, kRatioHigh};
    doc["truncation"] = truncation_json(oracle::check_truncation(model, bath, rho0, grid));
    doc["pass"] = all_pass;
    write_json(doc, out);
    return all_pass ? kSuccess : kCheckFailure;
}

int cmd_limits(const RunConfig& cfg, const std::filesystem::path& out) {
    const sb::SpinBosonModel model = cfg.model();
    const sb::RateFunctions rates(model);
    const std::vector<double> grid = cfg.grid();
    json checks = json::array();
    bool all_pass = true;
    const auto record = [&](json check) {
        if (check["applicable"].get<bool>()) all_pass = all_pass && check["pass"].get<bool>();
        checks.push_back(std::move(check));
    };

    std::optional<me::Trajectory> traj;
    const auto trajectory = [&]() -> const me::Trajectory& {
        if (!traj) traj = run_master_equation(cfg, model);
        return *traj;
    };

    // Vacuum: D_R = D_I = 0 and the generic generator equals the gamma/S form.
    {
        json c = {{"name", "vacuum"}, {"applicable", model.is_vacuum()}};
        if (model.is_vacuum()) {
            const me::SecondOrderGenerator gen = sb::generator(model);
            ComplexMatrix probe(2, 2);
            probe << 0.6, Complex(0.2, -0.1), Complex(0.2, 0.1), 0.4;
            double max_dr = 0.0, max_di = 0.0, max_diff = 0.0;
            for (double t : grid) {
                const sb::RateValues r = rates.at(t);
                max_dr = std::max(max_dr, std::abs(r.d_r));
                max_di = std::max(max_di, std::abs(r.d_i));
                max_diff = std::max(max_diff, max_abs(gen.rhs(probe, t) - sb::vacuum_rhs(sb::vacuum_rates(rates, t), probe)));
            }
            c["max_abs_D_R"] = max_dr;
            c["max_abs_D_I"] = max_di;
            c["max_generator_difference"] = max_diff;
            c["tolerance"] = 1e-8;
            c["pass"] = max_dr == 0.0 && max_di == 0.0 && max_diff <= 1e-8;
        }
        record(std::move(c));
    }

    // High temperature: populations equalise.
    {
        double min_occupation = std::numeric_limits<double>::infinity();
        for (double n : rates.occupations()) min_occupation = std::min(min_occupation, n);
        const bool applicable = !model.is_vacuum() && !model.modes.empty() && min_occupation >= 100.0;
        json c = {{"name", "high_temperature"}, {"applicable", applicable}};
        if (applicable) {
            const me::Trajectory& tr = trajectory();
            const double rho00 = tr.states.back()(0, 0).real();
            c["min_occupation"] = min_occupation;
            c["final_rho00"] = rho00;
            c["expected"] = 0.5;
            c["tolerance"] = 1e-3;
            c["relaxation_factor"] = std::exp(-16.0 * rates.integral(tr.times.back()).d_r);
            c["pass"] = std::abs(rho00 - 0.5) <= 1e-3;
        }
        record(std::move(c));
    }

    // Zero temperature: rho00 follows rho00(0) exp(-8 int D'_R) and rho11 -> 1.
    {
        json c = {{"name", "zero_temperature"}, {"applicable", model.is_vacuum()}};
        if (model.is_vacuum()) {
            const me::Trajectory& tr = trajectory();
            double max_dev = 0.0;
            for (std::size_t i = 0; i < tr.size(); ++i) {
                const double expected = cfg.initial.rho00 * std::exp(-8.0 * rates.integral(tr.times[i]).d_rp);
                max_dev = std::max(max_dev, std::abs(tr.states[i](0, 0).real() - expected));
            }
            const double rho11 = tr.states.back()(1, 1).real();
            c["final_rho11"] = rho11;
            c["expected"] = 1.0;
            c["tolerance"] = 1e-3;
            c["max_closed_form_deviation"] = max_dev;
            c["closed_form_tolerance"] = 1e-6;
            c["pass"] = std::abs(rho11 - 1.0) <= 1e-3 && max_dev <= 1e-6;
        }
        record(std::move(c));
    }

    // Markov plateau over the final quartile of the grid.
    {
        const auto& disc = cfg.model_block.discretization;
        const bool applicable = disc.has_value() && model.omega0 >= disc->omega_min && model.omega0 <= disc->omega_max;
        json c = {{"name", "markov_plateau"}, {"applicable", applicable}};
        if (applicable) {
            const sb::MarkovRates markov = sb::markov_rates(*disc, model);
            const std::size_t start = grid.size() - std::max<std::size_t>(1, grid.size() / 4);
            double worst = 0.0;
            for (std::size_t i = start; i < grid.size(); ++i)
                worst = std::max(worst, std::abs(rates.d_rp(grid[i]) / markov.d_rp - 1.0));
            c["markov_D_Rp"] = markov.d_rp;
            c["markov_D_R"] = markov.d_r;
            c["max_relative_deviation"] = worst;
            c["tolerance"] = 0.1;
            c["pass"] = worst <= 0.1;
        }
        record(std::move(c));
    }

    json doc;
    doc["command"] = "limits";
    doc["model"] = model_json(model);
    doc["checks"] = std::move(checks);
    doc["pass"] = all_pass;
    write_json(doc, out);
    return all_pass ? kSuccess : kCheckFailure;
}

// ---------------------------------------------------------------------------

int run_command(std::string_view verb, const std::filesystem::path& config_path,
                const std::filesystem::path& out_arg, std::ostream& log) {
    try {
        const RunConfig cfg = load_config(config_path);
        std::filesystem::path out = out_arg;
        if (out.empty()) out = cfg.output.path;
        if (out.empty()) throw ConfigError(0, "output.path", "no output path given (use --out or output.path)");

        if (verb == "rates") return cmd_rates(cfg, out);
        if (verb == "evolve") return cmd_evolve(cfg, out);
        if (verb == "exact") return cmd_exact(cfg, out);
        if (verb == "compare") return cmd_compare(cfg, out);
        if (verb == "limits") return cmd_limits(cfg, out);
        log << "error: unknown command '" << verb << "'\n";
        return kConfigError;
    } catch (const ConfigError& ex) {
        log << "config error: " << ex.what() << '\n';
        return kConfigError;
    } catch (const me::TraceDriftError& ex) {
        log << "aborted: " << ex.what() << '\n';
        return kRuntimeAbort;
    } catch (const oracle::DimensionCapError& ex) {
        log << "aborted: " << ex.what() << '\n';
        return kRuntimeAbort;
    } catch (const std::invalid_argument& ex) {
        log << "invalid input: " << ex.what() << '\n';
        return kConfigError;
    } catch (const std::exception& ex) {
        log << "aborted: " << ex.what() << '\n';
        return kRuntimeAbort;
    }
}

} // namespace tclme::cli
