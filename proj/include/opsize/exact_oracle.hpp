#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "opsize/pauli.hpp"

namespace opsize {

/// Mixed-field Ising chain, open boundary:
///   H = sum_{n=1}^{N-1} J Z_n Z_{n+1} + hx sum_n X_n + hz sum_n Z_n
struct ModelParams {
    int N = 5;
    double J = 1.0;
    double hx = 1.0;
    double hz = 0.0;
};

using Matrix = Eigen::MatrixXcd;

namespace detail {

constexpr int kMaxDenseSites = 12;

// Little-endian: site n (1-based) lives on bit n-1; Z|0> = +|0>.
inline double z_sign(std::uint64_t basis, int site) {
    return ((basis >> (site - 1)) & 1u) ? -1.0 : 1.0;
}

}  // namespace detail

/// Dense Pauli-string matrix in the same little-endian basis as the
/// Hamiltonian builder. Test and reconstruction helper.
inline Matrix dense_pauli(const PauliString& p) {
    int N = p.width();
    if (N > detail::kMaxDenseSites) throw std::invalid_argument("dense_pauli: N too large");
    std::uint64_t dim = std::uint64_t{1} << N;
    std::uint64_t flip = 0;
    for (int n = 1; n <= N; ++n) {
        int s = p.symbol(n);
        if (s == 1 || s == 2) flip |= std::uint64_t{1} << (n - 1);
    }
    Matrix m = Matrix::Zero(static_cast<long>(dim), static_cast<long>(dim));
    for (std::uint64_t j = 0; j < dim; ++j) {
        cplx phase{1, 0};
        for (int n = 1; n <= N; ++n) {
            int s = p.symbol(n);
            bool bit = (j >> (n - 1)) & 1u;
            if (s == 2) phase *= bit ? cplx{0, -1} : cplx{0, 1};
            else if (s == 3) phase *= bit ? -1.0 : 1.0;
        }
        m(static_cast<long>(j ^ flip), static_cast<long>(j)) = phase;
    }
    return m;
}

inline Matrix build_hamiltonian(const ModelParams& params) {
    if (params.N < 2) throw std::invalid_argument("build_hamiltonian: N >= 2 required");
    if (params.N > detail::kMaxDenseSites)
        throw std::invalid_argument("build_hamiltonian: N exceeds dense backend cap (12)");
    if (!std::isfinite(params.J) || !std::isfinite(params.hx) || !std::isfinite(params.hz))
        throw std::invalid_argument("build_hamiltonian: non-finite parameters");

    int N = params.N;
    std::uint64_t dim = std::uint64_t{1} << N;
    Matrix h = Matrix::Zero(static_cast<long>(dim), static_cast<long>(dim));
    for (std::uint64_t i = 0; i < dim; ++i) {
        double diag = 0;
        for (int n = 1; n < N; ++n)
            diag += params.J * detail::z_sign(i, n) * detail::z_sign(i, n + 1);
        for (int n = 1; n <= N; ++n) diag += params.hz * detail::z_sign(i, n);
        h(static_cast<long>(i), static_cast<long>(i)) = diag;
        for (int n = 1; n <= N; ++n) {
            std::uint64_t j = i ^ (std::uint64_t{1} << (n - 1));
            h(static_cast<long>(j), static_cast<long>(i)) += params.hx;
        }
    }
    return h;
}

/// O(t) = e^{iHt} O(0) e^{-iHt} via eigendecomposition of H.
inline Matrix heisenberg_evolve(const Matrix& o0, const Matrix& h, double t) {
    if (o0.rows() != h.rows() || o0.cols() != h.cols())
        throw std::invalid_argument("heisenberg_evolve: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("heisenberg_evolve: eigensolver failure");
    const auto& v = es.eigenvectors();
    Eigen::VectorXcd phases(h.rows());
    for (long k = 0; k < h.rows(); ++k)
        phases(k) = std::exp(cplx{0, -es.eigenvalues()(k) * t});
    Matrix u = v * phases.asDiagonal() * v.adjoint();  // e^{-iHt}
    return u.adjoint() * o0 * u;
}

/// C_k = 2^{-N} tr(O P_k) for every Pauli string. For Hermitian O the
/// coefficients are real; the imaginary parts are checked against 1e-10
/// and the real part stored.
inline PauliOperator pauli_coefficients(const Matrix& o) {
    std::uint64_t dim = static_cast<std::uint64_t>(o.rows());
    if (dim == 0 || (dim & (dim - 1)) || o.rows() != o.cols())
        throw std::invalid_argument("pauli_coefficients: dimension not a power of two");
    int N = 0;
    while ((std::uint64_t{1} << N) < dim) ++N;

    bool hermitian = (o - o.adjoint()).cwiseAbs().maxCoeff() < 1e-10;
    PauliOperator result(N);
    std::uint64_t num_strings = std::uint64_t{1} << (2 * N);
    double scale = 1.0 / static_cast<double>(dim);

    for (std::uint64_t k = 0; k < num_strings; ++k) {
        PauliString p(N, k);
        std::uint64_t flip = 0;
        for (int n = 1; n <= N; ++n) {
            int s = p.symbol(n);
            if (s == 1 || s == 2) flip |= std::uint64_t{1} << (n - 1);
        }
        // tr(O P) = sum_j phase(j) O(j, j^flip) with P|j> = phase(j)|j^flip>
        cplx tr{0, 0};
        for (std::uint64_t j = 0; j < dim; ++j) {
            cplx phase{1, 0};
            for (int n = 1; n <= N; ++n) {
                int s = p.symbol(n);
                if (s == 0 || s == 1) continue;
                bool bit = (j >> (n - 1)) & 1u;
                if (s == 2) phase *= bit ? cplx{0, -1} : cplx{0, 1};
                else phase *= bit ? -1.0 : 1.0;
            }
            tr += phase * o(static_cast<long>(j), static_cast<long>(j ^ flip));
        }
        cplx c = tr * scale;
        if (hermitian) {
            if (std::abs(c.imag()) > 1e-10)
                throw std::runtime_error("pauli_coefficients: complex coefficient for Hermitian input");
            c = cplx{c.real(), 0};
        }
        if (std::abs(c) >= PauliOperator::kDropThreshold)
            result.add_term(p, c);
    }
    return result;
}

struct ReferencePoint {
    double t;
    double average_size;
    SizeDistribution distribution;
    std::vector<double> density;  // per site, 1..N
};

/// Exact-diagonalization size curve for a single-site Pauli seed:
/// build H, evolve O(0) to each t, extract coefficients, reduce.
inline std::vector<ReferencePoint> reference_size_curve(const ModelParams& params, int o0_site,
                                                        int o0_pauli,
                                                        const std::vector<double>& t_grid) {
    Matrix h = build_hamiltonian(params);
    Matrix o0 = dense_pauli(PauliString::single(params.N, o0_site, o0_pauli));
    std::vector<ReferencePoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        Matrix ot = heisenberg_evolve(o0, h, t);
        PauliOperator op = pauli_coefficients(ot);
        ReferencePoint pt;
        pt.t = t;
        pt.distribution = size_distribution(op);
        pt.average_size = pt.distribution.mean();
        pt.density.resize(static_cast<std::size_t>(params.N));
        for (int n = 1; n <= params.N; ++n)
            pt.density[static_cast<std::size_t>(n - 1)] = operator_density(op, n);
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace opsize
