#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "opsize/circuit.hpp"
#include "opsize/statevector.hpp"

namespace opsize {

enum class NoiseScope { AllGates, TrotterOnly };

/// Per-qubit depolarizing rate applied after every gate the scope
/// selects. TrotterOnly treats prep/decode as ideal and noises the
/// evolution block (Trotter steps and the Pauli insertion).
struct NoiseModel {
    double p = 0;
    NoiseScope scope = NoiseScope::AllGates;

    bool applies_to(Segment seg) const {
        if (scope == NoiseScope::AllGates) return true;
        return seg == Segment::Trotter || seg == Segment::Insertion;
    }
};

inline bool noise_scope_from_string(const std::string& s, NoiseScope& out) {
    if (s == "all") { out = NoiseScope::AllGates; return true; }
    if (s == "trotter") { out = NoiseScope::TrotterOnly; return true; }
    return false;
}

/// Dense density matrix, row-major, little-endian basis like StateVector.
class DensityMatrix {
public:
    explicit DensityMatrix(int num_qubits)
        : num_qubits_(num_qubits), dim_(std::size_t{1} << num_qubits),
          data_(dim_ * dim_, cplx{0, 0}) {
        if (num_qubits < 1 || num_qubits > 10)
            throw std::invalid_argument("DensityMatrix: qubit count cap is 10");
        data_[0] = cplx{1, 0};  // |0...0><0...0|
    }

    static DensityMatrix from_pure(const StateVector& psi) {
        DensityMatrix rho(psi.num_qubits);
        for (std::size_t i = 0; i < rho.dim_; ++i)
            for (std::size_t j = 0; j < rho.dim_; ++j)
                rho.data_[i * rho.dim_ + j] = psi.amps[i] * std::conj(psi.amps[j]);
        return rho;
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return dim_; }
    cplx& at(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    double trace_real() const {
        double t = 0;
        for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i].real();
        return t;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(dim_);
        for (std::size_t i = 0; i < dim_; ++i) d[i] = data_[i * dim_ + i].real();
        return d;
    }

    double hermiticity_defect() const {
        double m = 0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j)
                m = std::max(m, std::abs(data_[i * dim_ + j] - std::conj(data_[j * dim_ + i])));
        return m;
    }

    /// rho -> U rho U+ for a single-qubit unitary on qubit q.
    void conjugate_single(int q, cplx u00, cplx u01, cplx u10, cplx u11) {
        const std::size_t m = std::size_t{1} << q;
        // rows: rho <- U rho
        for (std::size_t base = 0; base < dim_; base += 2 * m) {
            for (std::size_t off = 0; off < m; ++off) {
                cplx* r0 = &data_[(base + off) * dim_];
                cplx* r1 = r0 + m * dim_;
                for (std::size_t j = 0; j < dim_; ++j) {
                    cplx a = r0[j], b = r1[j];
                    r0[j] = u00 * a + u01 * b;
                    r1[j] = u10 * a + u11 * b;
                }
            }
        }
        // cols: rho <- rho U+
        cplx c00 = std::conj(u00), c01 = std::conj(u01);
        cplx c10 = std::conj(u10), c11 = std::conj(u11);
        for (std::size_t i = 0; i < dim_; ++i) {
            cplx* row = &data_[i * dim_];
            for (std::size_t base = 0; base < dim_; base += 2 * m) {
                for (std::size_t off = 0; off < m; ++off) {
                    std::size_t j0 = base + off;
                    cplx a = row[j0], b = row[j0 + m];
                    row[j0] = a * c00 + b * c01;
                    row[j0 + m] = a * c10 + b * c11;
                }
            }
        }
    }

    /// rho -> D rho D+ for diagonal phases over the full basis.
    void conjugate_diagonal(const std::vector<cplx>& phase) {
        for (std::size_t i = 0; i < dim_; ++i) {
            cplx pi = phase[i];
            cplx* row = &data_[i * dim_];
            for (std::size_t j = 0; j < dim_; ++j) row[j] *= pi * std::conj(phase[j]);
        }
    }

    /// Basis permutation i -> i^tmask when the control bit is set (CNOT).
    void conjugate_cnot(int control, int target) {
        const std::size_t cm = std::size_t{1} << control;
        const std::size_t tm = std::size_t{1} << target;
        for (std::size_t i = 0; i < dim_; ++i)
            if ((i & cm) && (i & tm))
                for (std::size_t j = 0; j < dim_; ++j)
                    std::swap(data_[i * dim_ + j], data_[(i ^ tm) * dim_ + j]);
        for (std::size_t i = 0; i < dim_; ++i) {
            cplx* row = &data_[i * dim_];
            for (std::size_t j = 0; j < dim_; ++j)
                if ((j & cm) && (j & tm)) std::swap(row[j], row[j ^ tm]);
        }
    }

    /// Single-qubit depolarizing channel, Kraus form
    /// rho' = (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z).
    /// Entrywise on the qubit's 2x2 blocks: coherences scale by
    /// 1-4p/3, populations mix by 2p/3.
    void depolarize(int q, double p) {
        if (p < 0 || p > 1) throw std::invalid_argument("depolarize: p in [0,1] required");
        if (q < 0 || q >= num_qubits_) throw std::out_of_range("depolarize: qubit out of range");
        if (p == 0) return;
        const std::size_t m = std::size_t{1} << q;
        const double f_off = 1.0 - 4.0 * p / 3.0;
        const double mix = 2.0 * p / 3.0;
        const double keep = 1.0 - mix;
        for (std::size_t ib = 0; ib < dim_; ib += 2 * m) {
            for (std::size_t io = 0; io < m; ++io) {
                cplx* r0 = &data_[(ib + io) * dim_];   // row with bit q = 0
                cplx* r1 = r0 + m * dim_;              // row with bit q = 1
                for (std::size_t jb = 0; jb < dim_; jb += 2 * m) {
                    for (std::size_t jo = 0; jo < m; ++jo) {
                        std::size_t j0 = jb + jo, j1 = j0 + m;
                        cplx a = r0[j0], d = r1[j1];
                        r0[j0] = keep * a + mix * d;
                        r1[j1] = mix * a + keep * d;
                        r0[j1] *= f_off;
                        r1[j0] *= f_off;
                    }
                }
            }
        }
    }

    void apply_gate(const Gate& g) {
        const double inv_sqrt2 = 0.7071067811865475244;
        switch (g.kind) {
            case GateKind::H:
                conjugate_single(g.q0, inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2);
                break;
            case GateKind::X:
                conjugate_single(g.q0, 0, 1, 1, 0);
                break;
            case GateKind::Y:
                conjugate_single(g.q0, 0, cplx{0, -1}, cplx{0, 1}, 0);
                break;
            case GateKind::Z:
                conjugate_single(g.q0, 1, 0, 0, -1);
                break;
            case GateKind::RX: {
                double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
                conjugate_single(g.q0, c, cplx{0, -s}, cplx{0, -s}, c);
                break;
            }
            case GateKind::RZ: {
                cplx e0 = std::exp(cplx{0, -g.angle / 2});
                cplx e1 = std::exp(cplx{0, g.angle / 2});
                std::vector<cplx> phase(dim_);
                const std::size_t m = std::size_t{1} << g.q0;
                for (std::size_t i = 0; i < dim_; ++i) phase[i] = (i & m) ? e1 : e0;
                conjugate_diagonal(phase);
                break;
            }
            case GateKind::RZZ: {
                cplx e_same = std::exp(cplx{0, -g.angle / 2});
                cplx e_diff = std::exp(cplx{0, g.angle / 2});
                std::vector<cplx> phase(dim_);
                const std::size_t m0 = std::size_t{1} << g.q0;
                const std::size_t m1 = std::size_t{1} << g.q1;
                for (std::size_t i = 0; i < dim_; ++i)
                    phase[i] = (((i & m0) != 0) == ((i & m1) != 0)) ? e_same : e_diff;
                conjugate_diagonal(phase);
                break;
            }
            case GateKind::CNOT:
                conjugate_cnot(g.q0, g.q1);
                break;
        }
    }

private:
    int num_qubits_;
    std::size_t dim_;
    std::vector<cplx> data_;
};

/// Free-function channel per the module contract.
inline DensityMatrix depolarize(DensityMatrix rho, int qubit, double p) {
    rho.depolarize(qubit, p);
    return rho;
}

/// Apply the circuit gate by gate, depolarizing every qubit a gate
/// touches when the noise scope selects that gate's segment.
inline DensityMatrix run_noisy_dm(const Circuit& c, const NoiseModel& noise) {
    DensityMatrix rho(c.num_qubits);
    for (const auto& g : c.gates) {
        rho.apply_gate(g);
        if (noise.p > 0 && noise.applies_to(g.seg)) {
            rho.depolarize(g.q0, noise.p);
            if (is_two_qubit(g.kind)) rho.depolarize(g.q1, noise.p);
        }
    }
    return rho;
}

/// Size readout from a decoded density matrix (diagonal only).
inline SizeExpectation dm_size_expectation(const DensityMatrix& rho, int n_sites) {
    if (rho.num_qubits() != 2 * n_sites)
        throw std::invalid_argument("dm_size_expectation: 2N qubits required");
    auto diag = rho.diagonal();
    SizeExpectation out;
    out.density.assign(static_cast<std::size_t>(n_sites), 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        for (int n = 0; n < n_sites; ++n) {
            bool z = (i >> n) & 1u;
            bool x = (i >> (n + n_sites)) & 1u;
            if (z || x) out.density[static_cast<std::size_t>(n)] += diag[i];
        }
    }
    out.L = 0;
    for (double d : out.density) out.L += d;
    return out;
}

inline SizeDistribution dm_size_distribution(const DensityMatrix& rho, int n_sites) {
    if (rho.num_qubits() != 2 * n_sites)
        throw std::invalid_argument("dm_size_distribution: 2N qubits required");
    auto diag = rho.diagonal();
    SizeDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(n_sites) + 1, 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i)
        dist.probs[static_cast<std::size_t>(detail::basis_size(i, n_sites))] += diag[i];
    return dist;
}

struct TrajectoryResult {
    double L;
    double std_error;
    SizeDistribution histogram;          // mean of per-trajectory exact distributions
    double mean_inserted_errors;         // diagnostics
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642Full * (index + 1));
    return std::mt19937_64(splitmix64(s));
}

}  // namespace detail

/// Unbiased stochastic unraveling of the depolarizing channel: after
/// each noisy gate, each touched qubit independently receives a
/// uniformly random X/Y/Z with probability p. The circuit must include
/// the decode block; readout is the exact size expectation of each
/// trajectory's pure state.
inline TrajectoryResult run_noisy_trajectories(const Circuit& c, int n_sites,
                                               const NoiseModel& noise, std::size_t n_traj,
                                               std::uint64_t seed) {
    if (n_traj < 1) throw std::invalid_argument("run_noisy_trajectories: n_traj >= 1 required");
    double sum = 0, comp = 0;         // Kahan
    double sumsq = 0, compsq = 0;
    double err_count = 0;
    SizeDistribution hist;
    hist.probs.assign(static_cast<std::size_t>(n_sites) + 1, 0.0);

    for (std::size_t traj = 0; traj < n_traj; ++traj) {
        auto rng = detail::trajectory_rng(seed, traj);
        StateVector psi = StateVector::zero_state(c.num_qubits);
        for (const auto& g : c.gates) {
            apply_gate(psi, g);
            if (noise.p > 0 && noise.applies_to(g.seg)) {
                int touched[2] = {g.q0, is_two_qubit(g.kind) ? g.q1 : -1};
                for (int q : touched) {
                    if (q < 0) continue;
                    if (detail::uniform01(rng) < noise.p) {
                        int which = static_cast<int>(detail::uniform01(rng) * 3.0);
                        if (which > 2) which = 2;
                        GateKind k = which == 0 ? GateKind::X : which == 1 ? GateKind::Y : GateKind::Z;
                        apply_gate(psi, Gate{k, q, -1, 0, Segment::Other});
                        err_count += 1;
                    }
                }
            }
        }
        SizeExpectation e = exact_size_expectation(psi, n_sites, /*already_decoded=*/true);
        double y = e.L - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        double y2 = e.L * e.L - compsq;
        double t2 = sumsq + y2;
        compsq = (t2 - sumsq) - y2;
        sumsq = t2;
        SizeDistribution d = exact_size_distribution(psi, n_sites, true);
        for (std::size_t l = 0; l < hist.probs.size(); ++l) hist.probs[l] += d.probs[l];
    }

    TrajectoryResult res;
    double n = static_cast<double>(n_traj);
    res.L = sum / n;
    double var = n > 1 ? std::max(0.0, (sumsq - sum * sum / n) / (n - 1)) : 0.0;
    res.std_error = n > 1 ? std::sqrt(var / n) : 0.0;
    for (auto& pl : hist.probs) pl /= n;
    res.histogram = hist;
    res.mean_inserted_errors = err_count / n;
    return res;
}

}  // namespace opsize
