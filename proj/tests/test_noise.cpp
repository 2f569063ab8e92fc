#include <catch_amalgamated.hpp>
#include <random>

#include "opsize/noise.hpp"

using namespace opsize;

namespace {

// Probabilities of the four Bell outcomes for pair n of an N-pair
// density matrix, read off the decoded diagonal.
std::vector<double> bell_probs(DensityMatrix rho, int n_sites, int pair) {
    for (const auto& g : bell_decode(n_sites).gates) rho.apply_gate(g);
    auto diag = rho.diagonal();
    std::vector<double> probs(4, 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        bool z = (i >> pair) & 1u;
        bool x = (i >> (pair + n_sites)) & 1u;
        probs[static_cast<std::size_t>(decode_symbol(z, x))] += diag[i];
    }
    return probs;
}

DensityMatrix bell_pair_state(int pauli) {
    Circuit c = bell_prep(1);
    if (pauli == 1) c.push({GateKind::X, 0});
    if (pauli == 2) c.push({GateKind::Y, 0});
    if (pauli == 3) c.push({GateKind::Z, 0});
    return run_noisy_dm(c, NoiseModel{0.0, NoiseScope::AllGates});
}

Circuit toy_noisy_circuit(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(-2.0, 2.0);
    Circuit c = bell_prep(3);
    for (int g = 0; g < 12; ++g) {
        int q = static_cast<int>(rng() % 3);
        switch (rng() % 4) {
            case 0: c.push({GateKind::RX, q, -1, ang(rng), Segment::Trotter}); break;
            case 1: c.push({GateKind::RZ, q, -1, ang(rng), Segment::Trotter}); break;
            case 2: c.push({GateKind::RZZ, q, (q + 1) % 3, ang(rng), Segment::Trotter}); break;
            default: c.push({GateKind::H, q, -1, 0, Segment::Trotter}); break;
        }
    }
    c.append(bell_decode(3));
    return c;
}

}  // namespace

TEST_CASE("depolarize preserves trace and hermiticity") {
    for (int pauli : {0, 1}) {
        DensityMatrix rho = bell_pair_state(pauli);
        rho.depolarize(0, 0.3);
        CHECK(std::abs(rho.trace_real() - 1.0) < 1e-12);
        CHECK(rho.hermiticity_defect() < 1e-12);
    }
    DensityMatrix rho = bell_pair_state(0);
    DensityMatrix same = depolarize(rho, 0, 0.0);
    for (std::size_t i = 0; i < rho.dim(); ++i)
        for (std::size_t j = 0; j < rho.dim(); ++j)
            CHECK(std::abs(same.at(i, j) - rho.at(i, j)) < 1e-15);
    CHECK_THROWS_AS(rho.depolarize(0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(rho.depolarize(5, 0.1), std::out_of_range);
}

TEST_CASE("depolarizing one qubit of a Bell state mixes all four") {
    const double p = 0.3;
    // B0 input: (1-p) on B0, p/3 on each of B1/B2/B3
    DensityMatrix b0 = bell_pair_state(0);
    b0.depolarize(0, p);
    auto probs0 = bell_probs(b0, 1, 0);
    CHECK(probs0[0] == Catch::Approx(0.7).margin(1e-12));
    for (int k = 1; k <= 3; ++k) CHECK(probs0[static_cast<std::size_t>(k)] == Catch::Approx(0.1).margin(1e-12));

    // B1 input: (1-p) on B1, p/3 on the rest
    DensityMatrix b1 = bell_pair_state(1);
    b1.depolarize(0, p);
    auto probs1 = bell_probs(b1, 1, 0);
    CHECK(probs1[1] == Catch::Approx(1.0 - p).margin(1e-12));
    CHECK(probs1[0] == Catch::Approx(p / 3).margin(1e-12));
    CHECK(probs1[2] == Catch::Approx(p / 3).margin(1e-12));
    CHECK(probs1[3] == Catch::Approx(p / 3).margin(1e-12));

    // label transition rates: I gains weight p, any Pauli drops to I at p/3
    for (int pauli = 0; pauli <= 3; ++pauli) {
        DensityMatrix rho = bell_pair_state(pauli);
        rho.depolarize(0, p);
        auto probs = bell_probs(rho, 1, 0);
        for (int k = 0; k <= 3; ++k) {
            double expected = (k == pauli) ? 1.0 - p : p / 3;
            REQUIRE(probs[static_cast<std::size_t>(k)] == Catch::Approx(expected).margin(1e-12));
        }
    }
}

TEST_CASE("pauli expectations contract by 1 - 4p/3") {
    const double p = 0.12;
    for (int pauli = 1; pauli <= 3; ++pauli) {
        // eigenstate of the observable: |+>, |+i>, |0>
        Circuit c;
        c.num_qubits = 1;
        if (pauli == 1) c.push({GateKind::H, 0});
        if (pauli == 2) {
            c.push({GateKind::H, 0});
            c.push({GateKind::RZ, 0, -1, M_PI / 2});
        }
        DensityMatrix rho = run_noisy_dm(c, NoiseModel{0.0, NoiseScope::AllGates});
        auto expect = [&](const DensityMatrix& m) {
            // tr(sigma m) for the 2x2 case
            if (pauli == 1) return 2.0 * m.at(0, 1).real();
            if (pauli == 2) return -2.0 * m.at(0, 1).imag();
            return m.at(0, 0).real() - m.at(1, 1).real();
        };
        double before = expect(rho);
        REQUIRE(std::abs(before - 1.0) < 1e-12);
        rho.depolarize(0, p);
        CHECK(expect(rho) == Catch::Approx((1.0 - 4.0 * p / 3.0) * before).margin(1e-12));
    }
}

TEST_CASE("noiseless dm run matches the statevector") {
    EvolutionSpec spec{{3, 1.0, 1.0, 0.3}, 0.8, 10, 2, 1};
    Circuit c = protocol_circuit(spec, true);
    DensityMatrix rho = run_noisy_dm(c, NoiseModel{0.0, NoiseScope::AllGates});
    StateVector psi = run_protocol(c);
    for (std::size_t i = 0; i < rho.dim(); ++i)
        for (std::size_t j = 0; j < rho.dim(); ++j)
            REQUIRE(std::abs(rho.at(i, j) - psi.amps[i] * std::conj(psi.amps[j])) < 1e-10);
    CHECK(dm_size_expectation(rho, 3).L ==
          Catch::Approx(exact_size_expectation(psi, 3, true).L).margin(1e-10));
}

TEST_CASE("X then noise on a Bell pair: size expectation 1 - p/3") {
    const double p = 0.2;
    Circuit c = bell_prep(1);
    c.push({GateKind::X, 0, -1, 0, Segment::Trotter});
    c.append(bell_decode(1));
    // noise only after the X, prep/decode ideal
    DensityMatrix rho = run_noisy_dm(c, NoiseModel{p, NoiseScope::TrotterOnly});
    CHECK(dm_size_expectation(rho, 1).L == Catch::Approx(1.0 - p / 3).margin(1e-12));
}

TEST_CASE("noise scope selects segments") {
    EvolutionSpec spec{{2, 1.0, 1.0, 0.0}, 0.5, 4, 1, 1};
    Circuit c = protocol_circuit(spec, true);
    double p = 0.01;
    DensityMatrix all = run_noisy_dm(c, NoiseModel{p, NoiseScope::AllGates});
    DensityMatrix trotter = run_noisy_dm(c, NoiseModel{p, NoiseScope::TrotterOnly});
    // more noisy channels applied -> strictly different state
    CHECK(std::abs(dm_size_expectation(all, 2).L - dm_size_expectation(trotter, 2).L) > 1e-6);
}

TEST_CASE("trajectories at p=0 reduce to the noiseless run") {
    EvolutionSpec spec{{3, 1.0, 1.0, 0.3}, 0.8, 10, 2, 1};
    Circuit c = protocol_circuit(spec, true);
    auto res = run_noisy_trajectories(c, 3, NoiseModel{0.0, NoiseScope::AllGates}, 20, 7);
    StateVector psi = run_protocol(c);
    CHECK(res.L == Catch::Approx(exact_size_expectation(psi, 3, true).L).margin(1e-12));
    CHECK(res.std_error == Catch::Approx(0.0).margin(1e-12));
    CHECK(res.mean_inserted_errors == 0.0);
}

TEST_CASE("trajectory mean agrees with the dm backend") {
    Circuit c = toy_noisy_circuit(31);
    NoiseModel noise{0.05, NoiseScope::AllGates};
    double dm_value = dm_size_expectation(run_noisy_dm(c, noise), 3).L;
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto res = run_noisy_trajectories(c, 3, noise, 400, seed);
        if (std::abs(res.L - dm_value) < 4.0 * std::max(res.std_error, 1e-12)) ++ok;
    }
    CHECK(ok >= 19);
}

TEST_CASE("trajectory determinism and insertion rate") {
    Circuit c = toy_noisy_circuit(8);
    NoiseModel noise{0.05, NoiseScope::AllGates};
    auto a = run_noisy_trajectories(c, 3, noise, 100, 55);
    auto b = run_noisy_trajectories(c, 3, noise, 100, 55);
    CHECK(a.L == b.L);
    CHECK(a.std_error == b.std_error);

    // expected insertions = p * (total touched qubits) over noisy gates
    double touched = 0;
    for (const auto& g : c.gates)
        if (noise.applies_to(g.seg)) touched += is_two_qubit(g.kind) ? 2 : 1;
    auto big = run_noisy_trajectories(c, 3, noise, 10000, 3);
    CHECK(std::abs(big.mean_inserted_errors - noise.p * touched) < 0.05 * noise.p * touched);
}
