#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace opsize {

/// Richardson zero-noise-extrapolation plan: scale factors c_j and
/// weights gamma_j with sum gamma = 1 and sum gamma c^k = 0 for
/// k = 1..n_c.
struct MitigationPlan {
    int n_c;
    std::vector<double> c;
    std::vector<double> gamma;
};

/// Weights for the power-sum system (a Vandermonde transpose,
/// nonsingular for distinct c_j). The unique solution is the Lagrange
/// extrapolation to zero, gamma_j = prod_{m!=j} c_m / (c_m - c_j),
/// which is far better conditioned than solving the system directly.
inline MitigationPlan richardson_weights(const std::vector<double>& c) {
    std::size_t m = c.size();
    if (m < 2) throw std::invalid_argument("richardson_weights: need at least two scale factors");
    for (std::size_t i = 0; i < m; ++i) {
        if (c[i] <= 0) throw std::invalid_argument("richardson_weights: scale factors must be positive");
        for (std::size_t j = i + 1; j < m; ++j)
            if (c[i] == c[j])
                throw std::invalid_argument("richardson_weights: duplicate scale factor (singular system)");
    }
    MitigationPlan plan;
    plan.n_c = static_cast<int>(m) - 1;
    plan.c = c;
    plan.gamma.assign(m, 1.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            if (k != j) plan.gamma[j] *= c[k] / (c[k] - c[j]);
    return plan;
}

/// Published coefficient presets, c_j = j+1 for n_c in 1..4. The
/// weights are signed binomial coefficients.
inline MitigationPlan preset_plan(int n_c) {
    if (n_c < 1 || n_c > 4) throw std::invalid_argument("preset_plan: n_c in 1..4");
    MitigationPlan plan;
    plan.n_c = n_c;
    for (int j = 0; j <= n_c; ++j) plan.c.push_back(static_cast<double>(j + 1));
    switch (n_c) {
        case 1: plan.gamma = {2, -1}; break;
        case 2: plan.gamma = {3, -3, 1}; break;
        case 3: plan.gamma = {4, -6, 4, -1}; break;
        case 4: plan.gamma = {5, -10, 10, -5, 1}; break;
    }
    return plan;
}

/// Extrapolated estimate sum_j gamma_j E_{p_j}; residual error is
/// O(p^{n_c+1}).
inline double mitigate(const MitigationPlan& plan, const std::vector<double>& estimates) {
    if (estimates.size() != plan.gamma.size())
        throw std::invalid_argument("mitigate: estimate count does not match plan");
    double out = 0;
    for (std::size_t j = 0; j < estimates.size(); ++j) out += plan.gamma[j] * estimates[j];
    return out;
}

/// Standard error of the combined estimate assuming independent inputs.
inline double mitigated_stderr(const MitigationPlan& plan, const std::vector<double>& stderrs) {
    if (stderrs.size() != plan.gamma.size())
        throw std::invalid_argument("mitigated_stderr: stderr count does not match plan");
    double v = 0;
    for (std::size_t j = 0; j < stderrs.size(); ++j)
        v += plan.gamma[j] * plan.gamma[j] * stderrs[j] * stderrs[j];
    return std::sqrt(v);
}

}  // namespace opsize
