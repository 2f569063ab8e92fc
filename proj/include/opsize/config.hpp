#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsize/exact_oracle.hpp"
#include "opsize/noise.hpp"

namespace opsize {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Backend { Statevector, Dm, Trajectory };

inline const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Statevector: return "statevector";
        case Backend::Dm: return "dm";
        case Backend::Trajectory: return "trajectory";
    }
    return "?";
}

inline bool backend_from_string(const std::string& s, Backend& out) {
    if (s == "statevector") { out = Backend::Statevector; return true; }
    if (s == "dm") { out = Backend::Dm; return true; }
    if (s == "trajectory") { out = Backend::Trajectory; return true; }
    return false;
}

/// Flat key/value experiment configuration with dotted section names.
/// Unknown keys are hard errors.
struct ExperimentConfig {
    // model
    int N = 5;
    double J = 1.0;
    double hx = 1.0;
    double hz = 0.0;
    // operator seed
    int op_site = 3;
    int op_pauli = 1;  // 1=X 2=Y 3=Z
    // evolution grid
    std::optional<double> t_max;
    std::optional<double> dt_grid;
    std::optional<std::vector<double>> t_list;
    std::optional<int> r;
    std::optional<double> dt_trotter;
    double t_fixed = 2.0;                       // trotter-error r sweep
    std::vector<int> r_list = {25, 50, 100, 200, 400};
    // noise
    std::vector<double> p_list;
    NoiseScope noise_scope = NoiseScope::AllGates;
    Backend backend = Backend::Statevector;
    std::size_t n_traj = 1000;
    // shots (optional; 0 = exact expectation path)
    std::size_t shots = 0;
    // mitigation
    std::optional<int> mitigation_n_c;
    std::optional<std::vector<double>> mitigation_c;
    // reproducibility
    std::uint64_t seed = 0;

    ModelParams model() const { return ModelParams{N, J, hx, hz}; }

    std::vector<double> time_grid() const {
        if (t_list) return *t_list;
        if (!t_max || !dt_grid)
            throw ConfigError("config: need evolution.t_list or evolution.t_max + evolution.dt_grid");
        std::vector<double> grid;
        long steps = static_cast<long>(std::floor(*t_max / *dt_grid + 1e-9));
        for (long i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) * *dt_grid);
        return grid;
    }

    /// Trotter steps for a given t: explicit r wins, otherwise
    /// round(t/dt_trotter) clamped to >= 1.
    int trotter_steps(double t) const {
        if (r) return *r;
        double dt = dt_trotter.value_or(0.1);
        int steps = static_cast<int>(std::llround(t / dt));
        return steps < 1 ? 1 : steps;
    }

    void validate() const {
        if (N < 2) throw ConfigError("config: model.N >= 2 required");
        if (N > 12) throw ConfigError("config: model.N exceeds dense oracle cap (12)");
        if (!std::isfinite(J) || !std::isfinite(hx) || !std::isfinite(hz))
            throw ConfigError("config: non-finite model parameters");
        if (op_site < 1 || op_site > N) throw ConfigError("config: operator.site out of range");
        if (op_pauli < 1 || op_pauli > 3) throw ConfigError("config: operator.pauli must be X/Y/Z");
        if (r && *r < 1) throw ConfigError("config: evolution.r >= 1 required");
        if (dt_trotter && *dt_trotter <= 0) throw ConfigError("config: evolution.dt_trotter > 0 required");
        if (dt_grid && *dt_grid <= 0) throw ConfigError("config: evolution.dt_grid > 0 required");
        if (t_max && *t_max < 0) throw ConfigError("config: evolution.t_max >= 0 required");
        for (double p : p_list)
            if (p < 0 || p > 1) throw ConfigError("config: noise.p entries must lie in [0,1]");
        if (n_traj < 1) throw ConfigError("config: noise.n_traj >= 1 required");
        if (mitigation_n_c && (*mitigation_n_c < 1 || *mitigation_n_c > 4))
            throw ConfigError("config: mitigation.n_c in 1..4");
        if (mitigation_c && mitigation_c->size() < 2)
            throw ConfigError("config: mitigation.c needs at least two entries");
        (void)time_grid();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_double_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError("config line " + std::to_string(line) + ": bad number '" + tok + "'");
        }
    }
    if (out.empty())
        throw ConfigError("config line " + std::to_string(line) + ": empty list");
    return out;
}

inline double parse_double(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config line " + std::to_string(line) + ": bad number '" + v + "'");
    }
}

inline long long parse_int(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        long long i = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw ConfigError("config line " + std::to_string(line) + ": bad integer '" + v + "'");
    }
}

inline int parse_pauli(const std::string& v, int line) {
    if (v == "X" || v == "x") return 1;
    if (v == "Y" || v == "y") return 2;
    if (v == "Z" || v == "z") return 3;
    throw ConfigError("config line " + std::to_string(line) + ": pauli must be X, Y, or Z");
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string val = detail::trim(s.substr(eq + 1));
        if (val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");

        if (key == "model.N") cfg.N = static_cast<int>(detail::parse_int(val, lineno));
        else if (key == "model.J") cfg.J = detail::parse_double(val, lineno);
        else if (key == "model.hx") cfg.hx = detail::parse_double(val, lineno);
        else if (key == "model.hz") cfg.hz = detail::parse_double(val, lineno);
        else if (key == "operator.site") cfg.op_site = static_cast<int>(detail::parse_int(val, lineno));
        else if (key == "operator.pauli") cfg.op_pauli = detail::parse_pauli(val, lineno);
        else if (key == "evolution.t_max") cfg.t_max = detail::parse_double(val, lineno);
        else if (key == "evolution.dt_grid") cfg.dt_grid = detail::parse_double(val, lineno);
        else if (key == "evolution.t_list") cfg.t_list = detail::parse_double_list(val, lineno);
        else if (key == "evolution.r") cfg.r = static_cast<int>(detail::parse_int(val, lineno));
        else if (key == "evolution.dt_trotter") cfg.dt_trotter = detail::parse_double(val, lineno);
        else if (key == "evolution.t_fixed") cfg.t_fixed = detail::parse_double(val, lineno);
        else if (key == "evolution.r_list") {
            cfg.r_list.clear();
            for (double d : detail::parse_double_list(val, lineno))
                cfg.r_list.push_back(static_cast<int>(d));
        }
        else if (key == "noise.p") cfg.p_list = detail::parse_double_list(val, lineno);
        else if (key == "noise.scope") {
            if (!noise_scope_from_string(val, cfg.noise_scope))
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": noise.scope must be 'all' or 'trotter'");
        }
        else if (key == "noise.backend") {
            if (!backend_from_string(val, cfg.backend))
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": noise.backend must be statevector|dm|trajectory");
        }
        else if (key == "noise.n_traj") cfg.n_traj = static_cast<std::size_t>(detail::parse_int(val, lineno));
        else if (key == "shots") cfg.shots = static_cast<std::size_t>(detail::parse_int(val, lineno));
        else if (key == "mitigation.n_c") cfg.mitigation_n_c = static_cast<int>(detail::parse_int(val, lineno));
        else if (key == "mitigation.c") cfg.mitigation_c = detail::parse_double_list(val, lineno);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(val, lineno));
        else
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(f);
}

inline std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double d) {
        std::snprintf(buf, sizeof buf, "%.17g", d);
        return std::string(buf);
    };
    os << "model.N = " << cfg.N << "\n";
    os << "model.J = " << num(cfg.J) << "\n";
    os << "model.hx = " << num(cfg.hx) << "\n";
    os << "model.hz = " << num(cfg.hz) << "\n";
    os << "operator.site = " << cfg.op_site << "\n";
    os << "operator.pauli = " << "_XYZ"[cfg.op_pauli] << "\n";
    if (cfg.t_max) os << "evolution.t_max = " << num(*cfg.t_max) << "\n";
    if (cfg.dt_grid) os << "evolution.dt_grid = " << num(*cfg.dt_grid) << "\n";
    if (cfg.t_list) {
        os << "evolution.t_list = ";
        for (std::size_t i = 0; i < cfg.t_list->size(); ++i)
            os << (i ? "," : "") << num((*cfg.t_list)[i]);
        os << "\n";
    }
    if (cfg.r) os << "evolution.r = " << *cfg.r << "\n";
    if (cfg.dt_trotter) os << "evolution.dt_trotter = " << num(*cfg.dt_trotter) << "\n";
    os << "evolution.t_fixed = " << num(cfg.t_fixed) << "\n";
    os << "evolution.r_list = ";
    for (std::size_t i = 0; i < cfg.r_list.size(); ++i) os << (i ? "," : "") << cfg.r_list[i];
    os << "\n";
    if (!cfg.p_list.empty()) {
        os << "noise.p = ";
        for (std::size_t i = 0; i < cfg.p_list.size(); ++i) os << (i ? "," : "") << num(cfg.p_list[i]);
        os << "\n";
    }
    os << "noise.scope = " << (cfg.noise_scope == NoiseScope::AllGates ? "all" : "trotter") << "\n";
    os << "noise.backend = " << backend_name(cfg.backend) << "\n";
    os << "noise.n_traj = " << cfg.n_traj << "\n";
    if (cfg.shots) os << "shots = " << cfg.shots << "\n";
    if (cfg.mitigation_n_c) os << "mitigation.n_c = " << *cfg.mitigation_n_c << "\n";
    if (cfg.mitigation_c) {
        os << "mitigation.c = ";
        for (std::size_t i = 0; i < cfg.mitigation_c->size(); ++i)
            os << (i ? "," : "") << num((*cfg.mitigation_c)[i]);
        os << "\n";
    }
    os << "seed = " << cfg.seed << "\n";
    return os.str();
}

}  // namespace opsize
