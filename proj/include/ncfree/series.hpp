#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "word.hpp"

namespace ncfree {

/// Truncated noncommutative power series sum_alpha c_alpha z^alpha.
///
/// Coefficients are dense rows x cols complex matrices (k x k in the common
/// square case). Terms longer than maxdeg are never stored and no stored
/// coefficient is exactly zero.
class NCSeries {
public:
    NCSeries() = default;
    NCSeries(int d, int k, int maxdeg) : NCSeries(d, k, k, maxdeg) {}
    NCSeries(int d, int rows, int cols, int maxdeg)
        : d_(d), rows_(rows), cols_(cols), maxdeg_(maxdeg) {
        require(d >= 0 && d <= max_variables, ErrorKind::invalid_input, "bad variable count");
        require(rows >= 0 && cols >= 0, ErrorKind::invalid_input, "bad coefficient shape");
        require(maxdeg >= 0, ErrorKind::invalid_input, "maxdeg must be >= 0");
    }

    static NCSeries constant(int d, const Matrix& c, int maxdeg) {
        NCSeries s(d, static_cast<int>(c.rows()), static_cast<int>(c.cols()), maxdeg);
        s.add_term(Word{}, c);
        return s;
    }
    static NCSeries scalar(int d, int k, cd value, int maxdeg) {
        return constant(d, value * Matrix::Identity(k, k), maxdeg);
    }
    static NCSeries monomial(int d, const Word& w, const Matrix& c, int maxdeg) {
        NCSeries s(d, static_cast<int>(c.rows()), static_cast<int>(c.cols()), maxdeg);
        s.add_term(w, c);
        return s;
    }
    /// z_{var+1} (or its adjoint) times the k x k identity.
    static NCSeries variable(int d, int k, int var, bool starred, int maxdeg) {
        require(var >= 0 && var < d, ErrorKind::invalid_input, "variable index out of range");
        return monomial(d, Word::letter(var, starred), Matrix::Identity(k, k), maxdeg);
    }

    int d() const noexcept { return d_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    int k() const {
        require(square(), ErrorKind::dimension_mismatch, "series has rectangular coefficients");
        return rows_;
    }
    int maxdeg() const noexcept { return maxdeg_; }
    const std::map<Word, Matrix>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    Matrix coeff(const Word& w) const {
        auto it = terms_.find(w);
        if (it == terms_.end()) return Matrix::Zero(rows_, cols_);
        return it->second;
    }
    bool has(const Word& w) const { return terms_.count(w) != 0; }

    /// Accumulates c into the coefficient of w. Words past maxdeg are dropped.
    void add_term(const Word& w, const Matrix& c) {
        require(c.rows() == rows_ && c.cols() == cols_, ErrorKind::dimension_mismatch,
                "coefficient shape does not match series");
        require(w.max_var() < d_, ErrorKind::invalid_input,
                "word '" + format_word(w) + "' uses a variable beyond d");
        if (static_cast<int>(w.size()) > maxdeg_) return;
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            if (!is_exact_zero(c)) terms_.emplace(w, c);
            return;
        }
        it->second += c;
        if (is_exact_zero(it->second)) terms_.erase(it);
    }
    void add_term(const Word& w, cd c) {
        require(rows_ == 1 && cols_ == 1, ErrorKind::dimension_mismatch, "scalar term on a matrix series");
        add_term(w, Matrix::Constant(1, 1, c));
    }

    void set_term(const Word& w, const Matrix& c) {
        terms_.erase(w);
        add_term(w, c);
    }

    static bool is_exact_zero(const Matrix& c) {
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            for (Eigen::Index i = 0; i < c.rows(); ++i)
                if (c(i, j) != cd(0.0, 0.0)) return false;
        return true;
    }

    NCSeries with_maxdeg(int maxdeg) const {
        NCSeries out(d_, rows_, cols_, maxdeg);
        for (const auto& [w, c] : terms_) out.add_term(w, c);
        return out;
    }

    NCSeries with_d(int d) const {
        NCSeries out(d, rows_, cols_, maxdeg_);
        for (const auto& [w, c] : terms_) out.add_term(w, c);
        return out;
    }

    /// Largest stored word length (-1 for the zero series).
    int degree() const {
        int m = -1;
        for (const auto& [w, c] : terms_) m = std::max(m, static_cast<int>(w.size()));
        return m;
    }

private:
    int d_ = 0;
    int rows_ = 1;
    int cols_ = 1;
    int maxdeg_ = 0;
    std::map<Word, Matrix> terms_;
};

inline void require_same_dims(const NCSeries& a, const NCSeries& b, const char* op) {
    require(a.d() == b.d() && a.rows() == b.rows() && a.cols() == b.cols(),
            ErrorKind::dimension_mismatch, std::string(op) + ": series dimensions differ");
}

inline NCSeries series_add(const NCSeries& a, const NCSeries& b) {
    require_same_dims(a, b, "series_add");
    NCSeries out(a.d(), a.rows(), a.cols(), std::min(a.maxdeg(), b.maxdeg()));
    for (const auto& [w, c] : a.terms()) out.add_term(w, c);
    for (const auto& [w, c] : b.terms()) out.add_term(w, c);
    return out;
}

inline NCSeries scalar_mul(cd s, const NCSeries& a) {
    NCSeries out(a.d(), a.rows(), a.cols(), a.maxdeg());
    if (s == cd(0.0)) return out;
    for (const auto& [w, c] : a.terms()) out.add_term(w, s * c);
    return out;
}

inline NCSeries series_sub(const NCSeries& a, const NCSeries& b) {
    return series_add(a, scalar_mul(-1.0, b));
}

/// Coefficient of w is the sum over splittings w = uv of a[u] b[v].
inline NCSeries series_mul(const NCSeries& a, const NCSeries& b) {
    require(a.d() == b.d() && a.cols() == b.rows(), ErrorKind::dimension_mismatch,
            "series_mul: incompatible dimensions");
    const int maxdeg = std::min(a.maxdeg(), b.maxdeg());
    NCSeries out(a.d(), a.rows(), b.cols(), maxdeg);
    for (const auto& [u, cu] : a.terms()) {
        const int room = maxdeg - static_cast<int>(u.size());
        if (room < 0) continue;
        for (const auto& [v, cv] : b.terms()) {
            if (static_cast<int>(v.size()) > room) break;  // map is graded
            out.add_term(u + v, cu * cv);
        }
    }
    return out;
}

inline NCSeries operator+(const NCSeries& a, const NCSeries& b) { return series_add(a, b); }
inline NCSeries operator-(const NCSeries& a, const NCSeries& b) { return series_sub(a, b); }
inline NCSeries operator*(const NCSeries& a, const NCSeries& b) { return series_mul(a, b); }
inline NCSeries operator*(cd s, const NCSeries& a) { return scalar_mul(s, a); }

/// M * s (constant matrix on the left of every coefficient).
inline NCSeries lmul(const Matrix& m, const NCSeries& a) {
    require(m.cols() == a.rows(), ErrorKind::dimension_mismatch, "lmul shape");
    NCSeries out(a.d(), static_cast<int>(m.rows()), a.cols(), a.maxdeg());
    for (const auto& [w, c] : a.terms()) out.add_term(w, m * c);
    return out;
}

inline NCSeries rmul(const NCSeries& a, const Matrix& m) {
    require(a.cols() == m.rows(), ErrorKind::dimension_mismatch, "rmul shape");
    NCSeries out(a.d(), a.rows(), static_cast<int>(m.cols()), a.maxdeg());
    for (const auto& [w, c] : a.terms()) out.add_term(w, c * m);
    return out;
}

/// Coefficient at w is c_{w*}^*.
inline NCSeries series_adjoint(const NCSeries& a) {
    NCSeries out(a.d(), a.cols(), a.rows(), a.maxdeg());
    for (const auto& [w, c] : a.terms()) out.add_term(w.adjoint(), c.adjoint());
    return out;
}

inline NCSeries real_part(const NCSeries& a) {
    require(a.square(), ErrorKind::dimension_mismatch, "real_part needs square coefficients");
    return scalar_mul(0.5, a + series_adjoint(a));
}

inline NCSeries truncate(const NCSeries& a, int maxdeg) {
    return a.with_maxdeg(std::min(maxdeg, a.maxdeg()));
}

/// Terms with lo <= |w| <= hi.
inline NCSeries degree_filter(const NCSeries& a, int lo, int hi) {
    NCSeries out(a.d(), a.rows(), a.cols(), a.maxdeg());
    for (const auto& [w, c] : a.terms()) {
        const int L = static_cast<int>(w.size());
        if (L >= lo && L <= hi) out.add_term(w, c);
    }
    return out;
}

inline NCSeries filter_words(const NCSeries& a, const std::function<bool(const Word&)>& keep) {
    NCSeries out(a.d(), a.rows(), a.cols(), a.maxdeg());
    for (const auto& [w, c] : a.terms())
        if (keep(w)) out.add_term(w, c);
    return out;
}

// The empty word belongs to the analytic part; the three parts partition the terms.
inline NCSeries analytic_part(const NCSeries& a) {
    return filter_words(a, [](const Word& w) { return w.is_analytic(); });
}
inline NCSeries coanalytic_part(const NCSeries& a) {
    return filter_words(a, [](const Word& w) { return !w.empty() && w.is_coanalytic(); });
}
inline NCSeries mixed_part(const NCSeries& a) {
    return filter_words(a, [](const Word& w) { return !w.is_analytic() && !w.is_coanalytic(); });
}

inline NCSeries series_pow(const NCSeries& a, int n) {
    require(n >= 0, ErrorKind::invalid_input, "negative power");
    require(a.square(), ErrorKind::dimension_mismatch, "power of a rectangular series");
    NCSeries out = NCSeries::scalar(a.d(), a.rows(), 1.0, a.maxdeg());
    for (int i = 0; i < n; ++i) out = out * a;
    return out;
}

/// Largest coefficientwise operator-norm difference.
inline double max_coeff_diff(const NCSeries& a, const NCSeries& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::dimension_mismatch,
            "max_coeff_diff shapes");
    double m = 0.0;
    for (const auto& [w, c] : a.terms()) m = std::max(m, op_norm(c - b.coeff(w)));
    for (const auto& [w, c] : b.terms())
        if (!a.has(w)) m = std::max(m, op_norm(c));
    return m;
}

inline bool exactly_equal(const NCSeries& a, const NCSeries& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() != b.size()) return false;
    for (const auto& [w, c] : a.terms()) {
        auto it = b.terms().find(w);
        if (it == b.terms().end() || it->second != c) return false;
    }
    return true;
}

// ---- formal functions of a series ----------------------------------------------

/// (c0 + p)^{-1} = sum_m (-c0^{-1} p)^m c0^{-1}, with c0 the constant term.
inline NCSeries neumann_inverse(const NCSeries& a) {
    require(a.square(), ErrorKind::dimension_mismatch, "inverse of a rectangular series");
    const Matrix c0 = a.coeff(Word{});
    Eigen::FullPivLU<Matrix> lu(c0);
    if (c0.size() == 0 || !lu.isInvertible())
        fail(ErrorKind::not_expandable, "constant term is not invertible");
    const Matrix c0inv = lu.inverse();
    const NCSeries p = degree_filter(a, 1, a.maxdeg());
    const NCSeries step = lmul(-c0inv, p);
    NCSeries term = NCSeries::constant(a.d(), c0inv, a.maxdeg());
    NCSeries acc = term;
    for (int m = 1; m <= a.maxdeg() && !term.is_zero(); ++m) {
        term = step * term;
        acc = acc + term;
    }
    return acc;
}

/// Scalar constant term lambda I; returns (lambda, p) with a = lambda + p.
inline std::pair<cd, NCSeries> split_scalar_constant(const NCSeries& a, const char* fn) {
    require(a.square(), ErrorKind::dimension_mismatch, std::string(fn) + " of a rectangular series");
    const Matrix c0 = a.coeff(Word{});
    const int k = a.rows();
    const cd lam = k > 0 ? c0(0, 0) : cd(0.0);
    if ((c0 - lam * Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > 0.0)
        fail(ErrorKind::not_expandable,
             std::string(fn) + ": constant term must be a scalar multiple of the identity");
    return {lam, degree_filter(a, 1, a.maxdeg())};
}

inline NCSeries series_exp(const NCSeries& a) {
    auto [lam, p] = split_scalar_constant(a, "exp");
    NCSeries term = NCSeries::scalar(a.d(), a.rows(), 1.0, a.maxdeg());
    NCSeries acc = term;
    for (int m = 1; m <= a.maxdeg() && !term.is_zero(); ++m) {
        term = scalar_mul(1.0 / m, term * p);
        acc = acc + term;
    }
    return scalar_mul(std::exp(lam), acc);
}

/// log(lambda + p) = log(lambda) + sum (-1)^{m+1}/m (p/lambda)^m, principal log(lambda).
inline NCSeries series_log(const NCSeries& a) {
    auto [lam, p] = split_scalar_constant(a, "log");
    if (std::abs(lam.imag()) == 0.0 && lam.real() <= 0.0)
        fail(ErrorKind::not_expandable, "log: constant term on the closed negative real axis");
    const NCSeries q = scalar_mul(1.0 / lam, p);
    NCSeries acc = NCSeries::scalar(a.d(), a.rows(), std::log(lam), a.maxdeg());
    NCSeries power = q;
    for (int m = 1; m <= a.maxdeg() && !power.is_zero(); ++m) {
        acc = acc + scalar_mul((m % 2 ? 1.0 : -1.0) / m, power);
        power = power * q;
    }
    return acc;
}

/// z_i -> z_i + w_i, z_i^* -> z_i^* + conj(w_i) (a scalar translation).
inline NCSeries translate(const NCSeries& a, const std::vector<cd>& w) {
    require(static_cast<int>(w.size()) == a.d(), ErrorKind::dimension_mismatch,
            "translate: shift length must equal d");
    NCSeries out(a.d(), a.rows(), a.cols(), a.maxdeg());
    for (const auto& [word, c] : a.terms()) {
        const std::size_t L = word.size();
        // each subset of positions keeps its letter; the rest become scalars
        const std::size_t subsets = std::size_t{1} << L;
        for (std::size_t mask = 0; mask < subsets; ++mask) {
            cd factor = 1.0;
            Word kept;
            for (std::size_t i = 0; i < L; ++i) {
                const Letter l = word[i];
                if (mask & (std::size_t{1} << i)) {
                    kept.push_back(l);
                } else {
                    const cd s = w[static_cast<std::size_t>(l.var)];
                    factor *= l.starred ? std::conj(s) : s;
                }
            }
            if (factor != cd(0.0)) out.add_term(kept, factor * c);
        }
    }
    return out;
}

}  // namespace ncfree
