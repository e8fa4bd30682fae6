// config.cpp — Parser for the flat run-configuration format

#include "tclme/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tclme::cli {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
          (field.empty() ? std::string() : field + ": ") + message),
      line_(line), field_(std::move(field)) {}

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "model.omega0", "model.beta", "model.modes",
    "model.spectral.density", "model.spectral.eta", "model.spectral.omega_c",
    "model.spectral.omega_min", "model.spectral.omega_max", "model.spectral.mode_count",
    "simulation.t_max", "simulation.samples", "simulation.rk4_substeps",
    "initial.rho00", "initial.rho01",
    "oracle.n_max", "oracle.enabled",
    "output.format", "output.path",
};

struct Entry {
    std::string value;
    int line = 0;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::map<std::string, Entry, std::less<>> entries) : entries_(std::move(entries)) {}

    bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

    const Entry& entry(std::string_view key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError(0, std::string(key), "required key is missing");
        return it->second;
    }

    double number(std::string_view key) const { return parse_number(entry(key), key); }

    std::optional<double> optional_number(std::string_view key) const {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    int integer(std::string_view key) const {
        const Entry& e = entry(key);
        int value = 0;
        const char* end = e.value.data() + e.value.size();
        const auto [ptr, ec] = std::from_chars(e.value.data(), end, value);
        if (ec != std::errc() || ptr != end) throw ConfigError(e.line, std::string(key), "expected an integer, got '" + e.value + "'");
        return value;
    }

    bool boolean(std::string_view key) const {
        const Entry& e = entry(key);
        if (e.value == "true") return true;
        if (e.value == "false") return false;
        throw ConfigError(e.line, std::string(key), "expected true or false, got '" + e.value + "'");
    }

    static double parse_number(const Entry& e, std::string_view key) {
        return parse_number_text(e.value, e.line, key);
    }

    static double parse_number_text(std::string_view text, int line, std::string_view key) {
        double value = 0.0;
        const char* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
            throw ConfigError(line, std::string(key), "expected a finite number, got '" + std::string(text) + "'");
        return value;
    }

private:
    std::map<std::string, Entry, std::less<>> entries_;
};

std::vector<sb::Mode> parse_modes(const Entry& e) {
    std::vector<sb::Mode> modes;
    if (trim(e.value).empty()) return modes;
    for (std::string_view item : split(e.value, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2)
            throw ConfigError(e.line, "model.modes", "each mode must be written omega:g, got '" + std::string(item) + "'");
        sb::Mode m;
        m.omega = Reader::parse_number_text(parts[0], e.line, "model.modes");
        m.g = Reader::parse_number_text(parts[1], e.line, "model.modes");
        if (!(m.omega > 0.0)) throw ConfigError(e.line, "model.modes", "mode frequencies must be positive");
        modes.push_back(m);
    }
    return modes;
}

} // namespace

RunConfig parse_config(std::string_view text) {
    std::map<std::string, Entry, std::less<>> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (!kKnownKeys.contains(key)) throw ConfigError(line_no, key, "unknown key");
        if (entries.contains(key)) throw ConfigError(line_no, key, "key given more than once");
        entries.emplace(key, Entry{value, line_no});
    }

    const Reader r(std::move(entries));
    RunConfig cfg;

    // model
    cfg.model_block.omega0 = r.number("model.omega0");
    {
        const Entry& e = r.entry("model.beta");
        if (e.value == "vacuum") {
            cfg.model_block.beta = sb::kVacuum;
        } else {
            cfg.model_block.beta = Reader::parse_number(e, "model.beta");
            if (!(cfg.model_block.beta > 0.0)) throw ConfigError(e.line, "model.beta", "must be positive or 'vacuum'");
        }
    }
    const bool has_spectral = r.has("model.spectral.density") || r.has("model.spectral.eta")
                              || r.has("model.spectral.omega_c") || r.has("model.spectral.omega_min")
                              || r.has("model.spectral.omega_max") || r.has("model.spectral.mode_count");
    if (r.has("model.modes") == has_spectral)
        throw ConfigError(0, "model", "give exactly one of model.modes or the model.spectral.* block");
    if (r.has("model.modes")) {
        cfg.model_block.modes = parse_modes(r.entry("model.modes"));
    } else {
        sb::SpectralDiscretization disc;
        const Entry& kind = r.entry("model.spectral.density");
        if (kind.value == "ohmic") disc.density.kind = sb::DensityKind::Ohmic;
        else if (kind.value == "flat") disc.density.kind = sb::DensityKind::Flat;
        else throw ConfigError(kind.line, "model.spectral.density", "expected ohmic or flat, got '" + kind.value + "'");
        disc.density.eta = r.number("model.spectral.eta");
        if (disc.density.kind == sb::DensityKind::Ohmic) disc.density.omega_c = r.number("model.spectral.omega_c");
        else if (r.has("model.spectral.omega_c")) disc.density.omega_c = r.number("model.spectral.omega_c");
        disc.omega_min = r.number("model.spectral.omega_min");
        disc.omega_max = r.number("model.spectral.omega_max");
        disc.mode_count = r.integer("model.spectral.mode_count");
        try {
            disc.validate();
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(r.entry("model.spectral.density").line, "model.spectral", ex.what());
        }
        cfg.model_block.discretization = disc;
    }

    // simulation
    cfg.simulation.t_max = r.number("simulation.t_max");
    cfg.simulation.samples = r.integer("simulation.samples");
    if (r.has("simulation.rk4_substeps")) cfg.simulation.rk4_substeps = r.integer("simulation.rk4_substeps");
    if (cfg.simulation.samples < 1)
        throw ConfigError(r.entry("simulation.samples").line, "simulation.samples", "must be at least 1");
    if (cfg.simulation.samples > 1 && !(cfg.simulation.t_max > 0.0))
        throw ConfigError(r.entry("simulation.t_max").line, "simulation.t_max", "must be positive");
    if (cfg.simulation.rk4_substeps < 0)
        throw ConfigError(r.entry("simulation.rk4_substeps").line, "simulation.rk4_substeps", "must be >= 0 (0 = automatic)");

    // initial state
    if (r.has("initial.rho00")) cfg.initial.rho00 = r.number("initial.rho00");
    if (r.has("initial.rho01")) {
        const Entry& e = r.entry("initial.rho01");
        const auto parts = split_ws(e.value);
        if (parts.empty() || parts.size() > 2)
            throw ConfigError(e.line, "initial.rho01", "expected 're' or 're im'");
        const double re = Reader::parse_number_text(parts[0], e.line, "initial.rho01");
        const double im = parts.size() == 2 ? Reader::parse_number_text(parts[1], e.line, "initial.rho01") : 0.0;
        cfg.initial.rho01 = Complex(re, im);
    }
    if (!(cfg.initial.rho00 >= 0.0 && cfg.initial.rho00 <= 1.0))
        throw ConfigError(r.has("initial.rho00") ? r.entry("initial.rho00").line : 0, "initial.rho00", "must lie in [0, 1]");
    if (std::norm(cfg.initial.rho01) > cfg.initial.rho00 * (1.0 - cfg.initial.rho00) + 1e-14)
        throw ConfigError(r.has("initial.rho01") ? r.entry("initial.rho01").line : 0, "initial.rho01",
                          "|rho01|^2 must not exceed rho00 (1 - rho00)");

    // oracle
    if (r.has("oracle.n_max")) {
        cfg.oracle.n_max = r.integer("oracle.n_max");
        cfg.oracle.n_max_explicit = true;
        if (cfg.oracle.n_max < 1) throw ConfigError(r.entry("oracle.n_max").line, "oracle.n_max", "must be >= 1");
    }
    if (r.has("oracle.enabled")) cfg.oracle.enabled = r.boolean("oracle.enabled");

    // output
    if (r.has("output.format")) {
        const Entry& e = r.entry("output.format");
        if (e.value != "csv" && e.value != "json")
            throw ConfigError(e.line, "output.format", "expected csv or json, got '" + e.value + "'");
        cfg.output.format = e.value;
    }
    if (r.has("output.path")) cfg.output.path = r.entry("output.path").value;

    try {
        cfg.model().validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(0, "model", ex.what());
    }

    // Thermal tails need larger cutoffs than the default once beta*omega < 1.
    if (cfg.oracle.enabled && !cfg.oracle.n_max_explicit && cfg.model_block.beta != sb::kVacuum) {
        for (const sb::Mode& m : cfg.model().modes) {
            if (cfg.model_block.beta * m.omega < 1.0)
                throw ConfigError(0, "oracle.n_max",
                                  "beta*omega < 1 for some mode; set oracle.n_max explicitly and check the truncation report");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

sb::SpinBosonModel RunConfig::model() const {
    sb::SpinBosonModel m;
    m.omega0 = model_block.omega0;
    m.beta = model_block.beta;
    if (model_block.modes) m.modes = *model_block.modes;
    else if (model_block.discretization) m.modes = model_block.discretization->modes();
    return m;
}

ComplexMatrix RunConfig::initial_state() const {
    ComplexMatrix rho(2, 2);
    rho << initial.rho00, initial.rho01, std::conj(initial.rho01), 1.0 - initial.rho00;
    return rho;
}

std::vector<double> RunConfig::grid() const {
    return me::uniform_grid(simulation.t_max, static_cast<std::size_t>(simulation.samples));
}

} // namespace tclme::cli
