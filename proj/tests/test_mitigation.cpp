#include <catch_amalgamated.hpp>
#include <algorithm>
#include <cstdint>
#include <random>

#include "opsize/mitigation.hpp"

using namespace opsize;

namespace {

// Independent oracle: solve the defining power-sum system directly
// with Gaussian elimination (full pivoting) instead of the closed form.
std::vector<double> solve_power_sum(const std::vector<double>& c) {
    std::size_t m = c.size();
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j) a[k][j] = std::pow(c[j], static_cast<double>(k));
    a[0][m] = 1.0;
    std::vector<std::size_t> col(m);
    for (std::size_t j = 0; j < m; ++j) col[j] = j;
    for (std::size_t piv = 0; piv < m; ++piv) {
        std::size_t br = piv, bc = piv;
        for (std::size_t r = piv; r < m; ++r)
            for (std::size_t cc = piv; cc < m; ++cc)
                if (std::abs(a[r][cc]) > std::abs(a[br][bc])) { br = r; bc = cc; }
        std::swap(a[piv], a[br]);
        for (auto& row : a) std::swap(row[piv], row[bc]);
        std::swap(col[piv], col[bc]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == piv) continue;
            double f = a[r][piv] / a[piv][piv];
            for (std::size_t cc = piv; cc <= m; ++cc) a[r][cc] -= f * a[piv][cc];
        }
    }
    std::vector<double> g(m);
    for (std::size_t j = 0; j < m; ++j) g[col[j]] = a[j][m] / a[j][j];
    return g;
}

}  // namespace

TEST_CASE("paper presets satisfy the weight relations in integer arithmetic") {
    for (int nc = 1; nc <= 4; ++nc) {
        MitigationPlan plan = preset_plan(nc);
        REQUIRE(plan.c.size() == static_cast<std::size_t>(nc) + 1);
        long long sum = 0;
        for (double g : plan.gamma) sum += static_cast<long long>(g);
        CHECK(sum == 1);
        for (int k = 1; k <= nc; ++k) {
            long long power_sum = 0;
            for (std::size_t j = 0; j < plan.c.size(); ++j) {
                long long ck = 1;
                for (int e = 0; e < k; ++e) ck *= static_cast<long long>(plan.c[j]);
                power_sum += static_cast<long long>(plan.gamma[j]) * ck;
            }
            CHECK(power_sum == 0);
        }
    }
}

TEST_CASE("richardson_weights reproduces the presets") {
    CHECK(richardson_weights({1, 2}).gamma == std::vector<double>{2, -1});
    auto p4 = richardson_weights({1, 2, 3, 4, 5});
    std::vector<double> expected{5, -10, 10, -5, 1};
    for (std::size_t j = 0; j < expected.size(); ++j)
        CHECK(p4.gamma[j] == Catch::Approx(expected[j]).margin(1e-10));
    for (int nc = 2; nc <= 3; ++nc) {
        auto solved = richardson_weights(preset_plan(nc).c);
        for (std::size_t j = 0; j < solved.gamma.size(); ++j)
            CHECK(solved.gamma[j] == Catch::Approx(preset_plan(nc).gamma[j]).margin(1e-10));
    }
}

TEST_CASE("richardson_weights on non-preset scales") {
    auto plan = richardson_weights({1, 3});
    CHECK(plan.gamma[0] == Catch::Approx(1.5).margin(1e-12));
    CHECK(plan.gamma[1] == Catch::Approx(-0.5).margin(1e-12));
    CHECK_THROWS_AS(richardson_weights({1, 2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(richardson_weights({1, -2}), std::invalid_argument);
    CHECK_THROWS_AS(richardson_weights({1}), std::invalid_argument);
}

TEST_CASE("closed form solves the power-sum system on random scales") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.2, 8.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t m = 2 + rng() % 4;
        std::vector<double> c;
        while (c.size() < m) {
            double cand = u(rng);
            bool distinct = true;
            for (double prev : c)
                if (std::abs(prev - cand) < 0.05) distinct = false;
            if (distinct) c.push_back(cand);
        }
        auto plan = richardson_weights(c);
        auto oracle = solve_power_sum(c);
        // the direct solve is ill conditioned for clustered scales, so
        // compare with a residual-scaled tolerance
        double scale = 0;
        for (double g : plan.gamma) scale = std::max(scale, std::abs(g));
        for (std::size_t j = 0; j < m; ++j)
            REQUIRE(plan.gamma[j] == Catch::Approx(oracle[j]).margin(1e-8 * std::max(1.0, scale)));
        // and check the defining relations directly on the closed form
        double cmax = *std::max_element(c.begin(), c.end());
        for (int k = 0; k <= plan.n_c; ++k) {
            double power_sum = 0, mag = 0;
            for (std::size_t j = 0; j < m; ++j) {
                double term = plan.gamma[j] * std::pow(c[j], static_cast<double>(k));
                power_sum += term;
                mag += std::abs(term);
            }
            double target = (k == 0) ? 1.0 : 0.0;
            REQUIRE(std::abs(power_sum - target) < 1e-12 * std::max(1.0, mag) * std::max(1.0, cmax));
        }
    }
}

TEST_CASE("mitigate combines estimates") {
    auto plan = preset_plan(1);
    CHECK(mitigate(plan, {3.25, 3.25}) == Catch::Approx(3.25));

    // linear error term cancels exactly
    double e0 = 1.7, a = 0.42, p = 1e-3;
    std::vector<double> est;
    for (double cj : plan.c) est.push_back(e0 + a * cj * p);
    CHECK(mitigate(plan, est) == Catch::Approx(e0).margin(1e-12));

    CHECK_THROWS_AS(mitigate(plan, {1.0}), std::invalid_argument);
}

TEST_CASE("polynomial exactness up to the cancels power") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int nc = 1; nc <= 4; ++nc) {
        auto plan = preset_plan(nc);
        for (int rep = 0; rep < 20; ++rep) {
            double e0 = u(rng);
            std::vector<double> a(static_cast<std::size_t>(nc));
            for (auto& ak : a) ak = u(rng);
            double p = 0.05;
            std::vector<double> est;
            for (double cj : plan.c) {
                double v = e0;
                for (int k = 1; k <= nc; ++k) v += a[static_cast<std::size_t>(k - 1)] * std::pow(cj * p, k);
                est.push_back(v);
            }
            REQUIRE(mitigate(plan, est) == Catch::Approx(e0).margin(1e-9));
        }
    }
}

TEST_CASE("stderr propagation") {
    double s = 0.01;
    CHECK(mitigated_stderr(preset_plan(1), {s, s}) == Catch::Approx(s * std::sqrt(5.0)));
    CHECK(mitigated_stderr(preset_plan(2), {0, 0, 0}) == 0.0);
    CHECK(mitigated_stderr(preset_plan(4), {s, s, s, s, s}) ==
          Catch::Approx(s * std::sqrt(251.0)));
    CHECK_THROWS_AS(mitigated_stderr(preset_plan(2), {s}), std::invalid_argument);
}
