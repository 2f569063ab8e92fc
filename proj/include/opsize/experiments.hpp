#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "opsize/config.hpp"
#include "opsize/mitigation.hpp"
#include "opsize/noise.hpp"
#include "opsize/statevector.hpp"

namespace opsize {

struct ResultRow {
    double t;
    double L_bell;
    double L_oracle;
    double std_error;
    int r;
    double p;
    std::string backend;
    std::vector<double> density;  // per site
};

struct DistRow {
    double t;
    int size;
    double prob;
};

namespace detail {

inline std::string fmt_num(double d) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", d);
    return std::string(buf);
}

}  // namespace detail

inline std::string result_csv(const std::vector<ResultRow>& rows, int n_sites,
                              const std::vector<std::string>& comments = {}) {
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << "\n";
    os << "t,L_bell,L_oracle,stderr,r,p,backend";
    for (int n = 1; n <= n_sites; ++n) os << ",density_" << n;
    os << "\n";
    for (const auto& row : rows) {
        os << detail::fmt_num(row.t) << ',' << detail::fmt_num(row.L_bell) << ','
           << detail::fmt_num(row.L_oracle) << ',' << detail::fmt_num(row.std_error) << ','
           << row.r << ',' << detail::fmt_num(row.p) << ',' << row.backend;
        for (double d : row.density) os << ',' << detail::fmt_num(d);
        os << "\n";
    }
    return os.str();
}

inline std::string dist_csv(const std::vector<DistRow>& rows) {
    std::ostringstream os;
    os << "t,size,prob\n";
    for (const auto& row : rows)
        os << detail::fmt_num(row.t) << ',' << row.size << ',' << detail::fmt_num(row.prob) << "\n";
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

namespace detail {

struct CircuitPoint {
    double L;
    double std_error;
    std::vector<double> density;
    SizeDistribution dist;
};

/// Noiseless exact-expectation protocol evaluation.
inline CircuitPoint noiseless_point(const ExperimentConfig& cfg, double t, int r) {
    EvolutionSpec spec{cfg.model(), t, r, cfg.op_site, cfg.op_pauli};
    StateVector psi = run_protocol(protocol_circuit(spec, /*include_decode=*/true));
    CircuitPoint pt;
    SizeExpectation e = exact_size_expectation(psi, cfg.N, true);
    pt.dist = exact_size_distribution(psi, cfg.N, true);
    if (cfg.shots > 0) {
        auto shots = sample_shots(psi, cfg.N, cfg.shots, cfg.seed ^ std::uint64_t(r) ^
                                  static_cast<std::uint64_t>(t * 1e6), true);
        double sum = 0, sumsq = 0;
        std::vector<double> dens(static_cast<std::size_t>(cfg.N), 0.0);
        for (const auto& rec : shots) {
            sum += rec.size;
            sumsq += static_cast<double>(rec.size) * rec.size;
            for (int n = 0; n < cfg.N; ++n)
                if (rec.symbols[static_cast<std::size_t>(n)] != 0)
                    dens[static_cast<std::size_t>(n)] += 1.0;
        }
        double ns = static_cast<double>(shots.size());
        pt.L = sum / ns;
        double var = ns > 1 ? std::max(0.0, (sumsq - sum * sum / ns) / (ns - 1)) : 0.0;
        pt.std_error = std::sqrt(var / ns);
        for (auto& d : dens) d /= ns;
        pt.density = dens;
    } else {
        pt.L = e.L;
        pt.std_error = 0;
        pt.density = e.density;
    }
    return pt;
}

/// Noisy protocol evaluation at rate p via dm or trajectory backend.
inline CircuitPoint noisy_point(const ExperimentConfig& cfg, double t, int r, double p,
                                Backend backend) {
    EvolutionSpec spec{cfg.model(), t, r, cfg.op_site, cfg.op_pauli};
    Circuit c = protocol_circuit(spec, true);
    NoiseModel noise{p, cfg.noise_scope};
    CircuitPoint pt;
    if (backend == Backend::Dm) {
        DensityMatrix rho = run_noisy_dm(c, noise);
        SizeExpectation e = dm_size_expectation(rho, cfg.N);
        pt.L = e.L;
        pt.std_error = 0;
        pt.density = e.density;
        pt.dist = dm_size_distribution(rho, cfg.N);
    } else {
        TrajectoryResult tr = run_noisy_trajectories(c, cfg.N, noise, cfg.n_traj, cfg.seed);
        pt.L = tr.L;
        pt.std_error = tr.std_error;
        pt.dist = tr.histogram;
        // trajectory densities from the histogram-producing runs are not
        // tracked separately; recompute from mean distribution is not
        // possible per-site, so report the dm-style density only when exact
        pt.density.assign(static_cast<std::size_t>(cfg.N), 0.0);
    }
    return pt;
}

inline Backend resolve_noise_backend(const ExperimentConfig& cfg) {
    if (cfg.backend == Backend::Dm || cfg.backend == Backend::Trajectory) return cfg.backend;
    return 2 * cfg.N <= 10 ? Backend::Dm : Backend::Trajectory;
}

}  // namespace detail

struct SizeGrowthResult {
    std::vector<ResultRow> rows;
    std::vector<DistRow> circuit_dist;
    std::vector<DistRow> oracle_dist;
};

/// Noiseless size-growth curves: oracle and Bell-circuit values per t.
inline SizeGrowthResult exp_size_growth(const ExperimentConfig& cfg) {
    cfg.validate();
    auto grid = cfg.time_grid();
    auto oracle = reference_size_curve(cfg.model(), cfg.op_site, cfg.op_pauli, grid);
    SizeGrowthResult out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        int r = cfg.trotter_steps(t);
        auto pt = detail::noiseless_point(cfg, t, r);
        ResultRow row{t, pt.L, oracle[i].average_size, pt.std_error, r, 0.0,
                      cfg.shots > 0 ? "statevector+shots" : "statevector", pt.density};
        out.rows.push_back(std::move(row));
        for (std::size_t l = 0; l < pt.dist.probs.size(); ++l)
            out.circuit_dist.push_back({t, static_cast<int>(l), pt.dist.probs[l]});
        for (std::size_t l = 0; l < oracle[i].distribution.probs.size(); ++l)
            out.oracle_dist.push_back({t, static_cast<int>(l), oracle[i].distribution.probs[l]});
    }
    return out;
}

struct TrotterErrorResult {
    std::vector<ResultRow> vs_t;  // fixed r, t grid
    std::vector<ResultRow> vs_r;  // fixed t, r grid
    double fit_a = 0;             // epsilon ~ a t/r + b t^3/r^2, least squares on vs_t
    double fit_b = 0;
    double loglog_slope = 0;      // epsilon vs r at fixed t
};

inline TrotterErrorResult exp_trotter_error(const ExperimentConfig& cfg) {
    cfg.validate();
    TrotterErrorResult out;
    auto grid = cfg.time_grid();
    auto oracle = reference_size_curve(cfg.model(), cfg.op_site, cfg.op_pauli, grid);
    int r_fixed = cfg.r.value_or(100);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        auto pt = detail::noiseless_point(cfg, t, r_fixed);
        out.vs_t.push_back({t, pt.L, oracle[i].average_size, pt.std_error, r_fixed, 0.0,
                            "statevector", pt.density});
    }
    // least-squares fit of |L_bell - L_oracle| to a*(t/r) + b*(t^3/r^2)
    {
        double s11 = 0, s12 = 0, s22 = 0, sy1 = 0, sy2 = 0;
        for (const auto& row : out.vs_t) {
            if (row.t == 0) continue;
            double x1 = row.t / row.r;
            double x2 = row.t * row.t * row.t / (static_cast<double>(row.r) * row.r);
            double y = std::abs(row.L_bell - row.L_oracle);
            s11 += x1 * x1; s12 += x1 * x2; s22 += x2 * x2;
            sy1 += x1 * y; sy2 += x2 * y;
        }
        double det = s11 * s22 - s12 * s12;
        if (std::abs(det) > 1e-300) {
            out.fit_a = (s22 * sy1 - s12 * sy2) / det;
            out.fit_b = (s11 * sy2 - s12 * sy1) / det;
        }
    }
    double t_fixed = cfg.t_fixed;
    auto oracle_fixed = reference_size_curve(cfg.model(), cfg.op_site, cfg.op_pauli, {t_fixed});
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int rr : cfg.r_list) {
        auto pt = detail::noiseless_point(cfg, t_fixed, rr);
        out.vs_r.push_back({t_fixed, pt.L, oracle_fixed[0].average_size, pt.std_error, rr, 0.0,
                            "statevector", pt.density});
        double eps = std::abs(pt.L - oracle_fixed[0].average_size);
        if (eps > 0) {
            double lx = std::log(static_cast<double>(rr)), ly = std::log(eps);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++count;
        }
    }
    if (count >= 2)
        out.loglog_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return out;
}

struct NoiseResult {
    std::vector<ResultRow> rows;
    std::vector<DistRow> dist;
};

/// Noisy size curves at each p in the config list, r = round(t/dt).
inline NoiseResult exp_noise(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.p_list.empty()) throw ConfigError("config: noise.p required for the noise experiment");
    Backend backend = detail::resolve_noise_backend(cfg);
    auto grid = cfg.time_grid();
    auto oracle = reference_size_curve(cfg.model(), cfg.op_site, cfg.op_pauli, grid);
    NoiseResult out;
    for (double p : cfg.p_list) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double t = grid[i];
            int r = cfg.trotter_steps(t);
            detail::CircuitPoint pt;
            std::string tag;
            if (p == 0) {
                pt = detail::noiseless_point(cfg, t, r);
                tag = "statevector";
            } else {
                pt = detail::noisy_point(cfg, t, r, p, backend);
                tag = backend_name(backend);
            }
            out.rows.push_back({t, pt.L, oracle[i].average_size, pt.std_error, r, p, tag,
                                pt.density});
            for (std::size_t l = 0; l < pt.dist.probs.size(); ++l)
                out.dist.push_back({t, static_cast<int>(l), pt.dist.probs[l]});
        }
    }
    return out;
}

struct MitigationResult {
    std::vector<ResultRow> rows;  // backend tags: noiseless / unmitigated / zne[nc=K]
};

/// Zero-noise extrapolation: run the noisy estimator at p_j = c_j * p,
/// combine with Richardson weights, and report against the noiseless
/// circuit reference.
inline MitigationResult exp_mitigation(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.p_list.empty())
        throw ConfigError("config: noise.p (base rate) required for the mitigation experiment");
    double base_p = cfg.p_list.front();
    Backend backend = detail::resolve_noise_backend(cfg);

    std::vector<MitigationPlan> plans;
    if (cfg.mitigation_c) {
        plans.push_back(richardson_weights(*cfg.mitigation_c));
    } else if (cfg.mitigation_n_c) {
        plans.push_back(preset_plan(*cfg.mitigation_n_c));
    } else {
        for (int nc = 1; nc <= 4; ++nc) plans.push_back(preset_plan(nc));
    }
    // union of scale factors across plans, estimates shared
    std::vector<double> scales;
    for (const auto& plan : plans)
        for (double cj : plan.c)
            if (std::find(scales.begin(), scales.end(), cj) == scales.end()) scales.push_back(cj);
    std::sort(scales.begin(), scales.end());

    auto grid = cfg.time_grid();
    auto oracle = reference_size_curve(cfg.model(), cfg.op_site, cfg.op_pauli, grid);
    MitigationResult out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        int r = cfg.trotter_steps(t);
        auto clean = detail::noiseless_point(cfg, t, r);
        out.rows.push_back({t, clean.L, oracle[i].average_size, 0.0, r, 0.0, "noiseless",
                            clean.density});

        std::vector<double> est(scales.size()), err(scales.size());
        std::vector<std::vector<double>> dens(scales.size());
        for (std::size_t s = 0; s < scales.size(); ++s) {
            auto pt = detail::noisy_point(cfg, t, r, scales[s] * base_p, backend);
            est[s] = pt.L;
            err[s] = pt.std_error;
            dens[s] = pt.density;
        }
        std::size_t base_idx = 0;
        while (base_idx < scales.size() && scales[base_idx] != 1.0) ++base_idx;
        if (base_idx == scales.size()) base_idx = 0;
        out.rows.push_back({t, est[base_idx], oracle[i].average_size, err[base_idx], r, base_p,
                            std::string("unmitigated-") + backend_name(backend), dens[base_idx]});

        for (const auto& plan : plans) {
            std::vector<double> e(plan.c.size()), se(plan.c.size());
            std::vector<double> d(static_cast<std::size_t>(cfg.N), 0.0);
            for (std::size_t j = 0; j < plan.c.size(); ++j) {
                std::size_t idx = static_cast<std::size_t>(
                    std::find(scales.begin(), scales.end(), plan.c[j]) - scales.begin());
                e[j] = est[idx];
                se[j] = err[idx];
                for (int n = 0; n < cfg.N; ++n)
                    d[static_cast<std::size_t>(n)] += plan.gamma[j] * dens[idx][static_cast<std::size_t>(n)];
            }
            char tag[32];
            std::snprintf(tag, sizeof tag, "zne[nc=%d]", plan.n_c);
            out.rows.push_back({t, mitigate(plan, e), oracle[i].average_size,
                                mitigated_stderr(plan, se), r, base_p, tag, d});
        }
    }
    return out;
}

}  // namespace opsize
