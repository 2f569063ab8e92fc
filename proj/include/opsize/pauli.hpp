#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace opsize {

using cplx = std::complex<double>;

/// Tensor product of single-site Paulis over N sites, packed 2 bits per
/// site. Symbols: 0=I, 1=X, 2=Y, 3=Z. Site 1 is the most significant
/// quaternary digit, so the packed code IS the quaternary index.
class PauliString {
public:
    static constexpr int kMaxWidth = 31;

    PauliString(int width, std::uint64_t code) : width_(width), code_(code) {
        if (width < 1 || width > kMaxWidth)
            throw std::invalid_argument("PauliString: width out of range");
        if (width < kMaxWidth && code >> (2 * width))
            throw std::invalid_argument("PauliString: code exceeds width");
    }

    static PauliString identity(int width) { return PauliString(width, 0); }

    /// Symbols in site order k_1..k_N.
    static PauliString from_symbols(const std::vector<int>& symbols) {
        if (symbols.empty()) throw std::invalid_argument("PauliString: empty symbol list");
        std::uint64_t code = 0;
        for (int s : symbols) {
            if (s < 0 || s > 3) throw std::invalid_argument("PauliString: symbol not in {0,1,2,3}");
            code = (code << 2) | static_cast<std::uint64_t>(s);
        }
        return PauliString(static_cast<int>(symbols.size()), code);
    }

    /// Single non-identity Pauli at 1-based site.
    static PauliString single(int width, int site, int symbol) {
        if (site < 1 || site > width) throw std::out_of_range("PauliString: site out of range");
        if (symbol < 1 || symbol > 3) throw std::invalid_argument("PauliString: symbol must be X/Y/Z");
        std::uint64_t code = static_cast<std::uint64_t>(symbol) << (2 * (width - site));
        return PauliString(width, code);
    }

    static PauliString from_index(int width, std::uint64_t index) {
        if (width < 1 || width > kMaxWidth || index >= (std::uint64_t{1} << (2 * width)))
            throw std::out_of_range("PauliString: index out of range");
        return PauliString(width, index);
    }

    int width() const { return width_; }

    /// Quaternary index with k_1 as the most significant digit.
    std::uint64_t quaternary_index() const { return code_; }

    /// Symbol at 1-based site n.
    int symbol(int site) const {
        if (site < 1 || site > width_) throw std::out_of_range("PauliString: site out of range");
        return static_cast<int>((code_ >> (2 * (width_ - site))) & 3u);
    }

    std::vector<int> symbols() const {
        std::vector<int> out(width_);
        for (int n = 1; n <= width_; ++n) out[n - 1] = symbol(n);
        return out;
    }

    /// Operator size: number of non-identity sites.
    int size() const {
        std::uint64_t c = code_;
        int count = 0;
        while (c) {
            count += (c & 3u) != 0;
            c >>= 2;
        }
        return count;
    }

    std::string to_string() const {
        static const char names[] = "IXYZ";
        std::string s(width_, 'I');
        for (int n = 1; n <= width_; ++n) s[n - 1] = names[symbol(n)];
        return s;
    }

    bool operator==(const PauliString& other) const {
        return width_ == other.width_ && code_ == other.code_;
    }
    bool operator!=(const PauliString& other) const { return !(*this == other); }

private:
    int width_;
    std::uint64_t code_;
};

/// Sitewise Pauli product with accumulated global phase in {1, i, -1, -i}.
inline std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
    if (a.width() != b.width())
        throw std::invalid_argument("multiply: width mismatch");
    // phase_power[a][b]: exponent e with sigma_a * sigma_b = i^e * sigma_{a^b}
    static const int phase_power[4][4] = {
        {0, 0, 0, 0},
        {0, 0, 1, 3},
        {0, 3, 0, 1},
        {0, 1, 3, 0},
    };
    int e = 0;
    std::uint64_t code = 0;
    for (int n = 1; n <= a.width(); ++n) {
        int sa = a.symbol(n), sb = b.symbol(n);
        e = (e + phase_power[sa][sb]) & 3;
        code = (code << 2) | static_cast<std::uint64_t>(sa ^ sb);
    }
    static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {i_pow[e], PauliString(a.width(), code)};
}

/// Sparse real-or-complex combination of Pauli strings, keyed by
/// quaternary index. Terms below 1e-14 in magnitude are dropped.
class PauliOperator {
public:
    static constexpr double kDropThreshold = 1e-14;

    explicit PauliOperator(int width) : width_(width) {
        if (width < 1 || width > PauliString::kMaxWidth)
            throw std::invalid_argument("PauliOperator: width out of range");
    }

    int width() const { return width_; }

    void add_term(const PauliString& p, cplx coeff) {
        if (p.width() != width_)
            throw std::invalid_argument("PauliOperator: key width mismatch");
        auto it = terms_.find(p.quaternary_index());
        cplx c = coeff + (it != terms_.end() ? it->second : cplx{0, 0});
        if (std::abs(c) < kDropThreshold) {
            if (it != terms_.end()) terms_.erase(it);
        } else if (it != terms_.end()) {
            it->second = c;
        } else {
            terms_.emplace(p.quaternary_index(), c);
        }
    }

    cplx coefficient(const PauliString& p) const {
        auto it = terms_.find(p.quaternary_index());
        return it != terms_.end() ? it->second : cplx{0, 0};
    }

    std::size_t num_terms() const { return terms_.size(); }

    double norm2() const {
        double s = 0;
        for (const auto& [k, c] : terms_) s += std::norm(c);
        return s;
    }

    const std::unordered_map<std::uint64_t, cplx>& terms() const { return terms_; }

private:
    int width_;
    std::unordered_map<std::uint64_t, cplx> terms_;
};

/// Probability mass over operator sizes 0..N.
struct SizeDistribution {
    std::vector<double> probs;  // length N+1, index = size

    double mean() const {
        double m = 0;
        for (std::size_t l = 0; l < probs.size(); ++l) m += static_cast<double>(l) * probs[l];
        return m;
    }
    double total() const {
        double s = 0;
        for (double p : probs) s += p;
        return s;
    }
};

/// Groups |C_k|^2 mass by operator size. Input must be normalized
/// within tol; rejects otherwise.
inline SizeDistribution size_distribution(const PauliOperator& op, double tol = 1e-8) {
    double n2 = op.norm2();
    if (std::abs(n2 - 1.0) > tol)
        throw std::invalid_argument("size_distribution: operator not normalized (sum |C|^2 = " +
                                    std::to_string(n2) + ")");
    SizeDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(op.width()) + 1, 0.0);
    for (const auto& [code, c] : op.terms()) {
        PauliString p(op.width(), code);
        dist.probs[static_cast<std::size_t>(p.size())] += std::norm(c);
    }
    return dist;
}

inline double average_size(const PauliOperator& op, double tol = 1e-8) {
    return size_distribution(op, tol).mean();
}

/// Per-site share of the average operator size: sum of |C_k|^2 over
/// strings acting non-trivially at 1-based site n.
inline double operator_density(const PauliOperator& op, int site) {
    if (site < 1 || site > op.width())
        throw std::out_of_range("operator_density: site out of range");
    double d = 0;
    for (const auto& [code, c] : op.terms()) {
        PauliString p(op.width(), code);
        if (p.symbol(site) != 0) d += std::norm(c);
    }
    return d;
}

}  // namespace opsize
