#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "opsize/circuit.hpp"
#include "opsize/pauli.hpp"

namespace opsize {

/// Dense amplitudes over 2^n basis states, little-endian: qubit 0 is
/// the least significant bit of the basis index.
struct StateVector {
    int num_qubits = 0;
    std::vector<cplx> amps;

    static StateVector zero_state(int num_qubits) {
        StateVector s;
        s.num_qubits = num_qubits;
        s.amps.assign(std::size_t{1} << num_qubits, cplx{0, 0});
        s.amps[0] = cplx{1, 0};
        return s;
    }

    double norm2() const {
        double n = 0;
        for (const auto& a : amps) n += std::norm(a);
        return n;
    }
};

namespace detail {

inline void apply_single(std::vector<cplx>& amps, int q, cplx u00, cplx u01, cplx u10, cplx u11) {
    const std::size_t mask = std::size_t{1} << q;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * mask) {
        for (std::size_t off = 0; off < mask; ++off) {
            std::size_t i0 = base + off;
            std::size_t i1 = i0 + mask;
            cplx a = amps[i0], b = amps[i1];
            amps[i0] = u00 * a + u01 * b;
            amps[i1] = u10 * a + u11 * b;
        }
    }
}

inline void apply_phase_pair(std::vector<cplx>& amps, std::size_t mask_a, std::size_t mask_b,
                             cplx phase_same, cplx phase_diff) {
    // Diagonal two-qubit action keyed on parity of the two bits.
    for (std::size_t i = 0; i < amps.size(); ++i) {
        bool same = ((i & mask_a) != 0) == ((i & mask_b) != 0);
        amps[i] *= same ? phase_same : phase_diff;
    }
}

}  // namespace detail

inline void apply_gate(StateVector& state, const Gate& g) {
    if (g.q0 < 0 || g.q0 >= state.num_qubits ||
        (is_two_qubit(g.kind) && (g.q1 < 0 || g.q1 >= state.num_qubits)))
        throw std::out_of_range("apply_gate: qubit index out of range");
    auto& amps = state.amps;
    const double inv_sqrt2 = 0.7071067811865475244;
    switch (g.kind) {
        case GateKind::H:
            detail::apply_single(amps, g.q0, inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2);
            break;
        case GateKind::X:
            detail::apply_single(amps, g.q0, 0, 1, 1, 0);
            break;
        case GateKind::Y:
            detail::apply_single(amps, g.q0, 0, cplx{0, -1}, cplx{0, 1}, 0);
            break;
        case GateKind::Z:
            detail::apply_single(amps, g.q0, 1, 0, 0, -1);
            break;
        case GateKind::RX: {
            double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            detail::apply_single(amps, g.q0, c, cplx{0, -s}, cplx{0, -s}, c);
            break;
        }
        case GateKind::RZ: {
            cplx e0 = std::exp(cplx{0, -g.angle / 2});
            cplx e1 = std::exp(cplx{0, g.angle / 2});
            detail::apply_single(amps, g.q0, e0, 0, 0, e1);
            break;
        }
        case GateKind::RZZ: {
            cplx e_same = std::exp(cplx{0, -g.angle / 2});
            cplx e_diff = std::exp(cplx{0, g.angle / 2});
            detail::apply_phase_pair(amps, std::size_t{1} << g.q0, std::size_t{1} << g.q1,
                                     e_same, e_diff);
            break;
        }
        case GateKind::CNOT: {
            const std::size_t cmask = std::size_t{1} << g.q0;
            const std::size_t tmask = std::size_t{1} << g.q1;
            for (std::size_t i = 0; i < amps.size(); ++i)
                if ((i & cmask) && (i & tmask)) std::swap(amps[i], amps[i ^ tmask]);
            break;
        }
    }
}

inline StateVector run(const Circuit& c, StateVector state) {
    if (c.num_qubits > state.num_qubits)
        throw std::invalid_argument("run: circuit wider than state");
    for (const auto& g : c.gates) apply_gate(state, g);
    return state;
}

inline StateVector run_protocol(const Circuit& c) {
    return run(c, StateVector::zero_state(c.num_qubits));
}

struct SizeExpectation {
    double L;
    std::vector<double> density;  // per pair, 1..N
};

namespace detail {

inline std::vector<double> decoded_probs(const StateVector& state, int n_sites,
                                         bool already_decoded) {
    if (state.num_qubits != 2 * n_sites)
        throw std::invalid_argument("size readout: state must have 2N qubits");
    if (std::abs(state.norm2() - 1.0) > 1e-8)
        throw std::invalid_argument("size readout: unnormalized state");
    const StateVector* s = &state;
    StateVector decoded;
    if (!already_decoded) {
        decoded = run(bell_decode(n_sites), state);
        s = &decoded;
    }
    std::vector<double> probs(s->amps.size());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(s->amps[i]);
    return probs;
}

inline int basis_size(std::size_t basis, int n_sites) {
    int size = 0;
    for (int n = 0; n < n_sites; ++n) {
        bool z = (basis >> n) & 1u;
        bool x = (basis >> (n + n_sites)) & 1u;
        size += (z || x) ? 1 : 0;
    }
    return size;
}

}  // namespace detail

/// Average operator size L = sum_n (1 - P_n(0,0)) from the decoded pair
/// marginals, with the per-pair operator densities.
inline SizeExpectation exact_size_expectation(const StateVector& state, int n_sites,
                                              bool already_decoded = false) {
    auto probs = detail::decoded_probs(state, n_sites, already_decoded);
    SizeExpectation out;
    out.density.assign(static_cast<std::size_t>(n_sites), 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] == 0.0) continue;
        for (int n = 0; n < n_sites; ++n) {
            bool z = (i >> n) & 1u;
            bool x = (i >> (n + n_sites)) & 1u;
            if (z || x) out.density[static_cast<std::size_t>(n)] += probs[i];
        }
    }
    out.L = 0;
    for (double d : out.density) out.L += d;
    return out;
}

/// Full computational-basis mass grouped by the number of non-B0 pairs.
inline SizeDistribution exact_size_distribution(const StateVector& state, int n_sites,
                                                bool already_decoded = false) {
    auto probs = detail::decoded_probs(state, n_sites, already_decoded);
    SizeDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(n_sites) + 1, 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i)
        dist.probs[static_cast<std::size_t>(detail::basis_size(i, n_sites))] += probs[i];
    return dist;
}

struct ShotRecord {
    std::vector<int> symbols;  // per pair, 0=I 1=X 2=Y 3=Z
    int size;
};

namespace detail {

// Uniform double in [0,1) from the top 53 bits; keeps sampling
// deterministic across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// I.i.d. draws from the decoded basis distribution via inverse CDF.
inline std::vector<ShotRecord> sample_shots(const StateVector& state, int n_sites,
                                            std::size_t shots, std::uint64_t seed,
                                            bool already_decoded = false) {
    if (shots < 1) throw std::invalid_argument("sample_shots: shots >= 1 required");
    auto probs = detail::decoded_probs(state, n_sites, already_decoded);
    std::vector<double> cdf(probs.size());
    double acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::mt19937_64 rng(seed);
    std::vector<ShotRecord> out;
    out.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        double u = detail::uniform01(rng) * acc;
        std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= probs.size()) idx = probs.size() - 1;
        ShotRecord rec;
        rec.symbols.resize(static_cast<std::size_t>(n_sites));
        rec.size = 0;
        for (int n = 0; n < n_sites; ++n) {
            bool z = (idx >> n) & 1u;
            bool x = (idx >> (n + n_sites)) & 1u;
            int sym = decode_symbol(z, x);
            rec.symbols[static_cast<std::size_t>(n)] = sym;
            rec.size += sym != 0;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace opsize
