#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "eval.hpp"
#include "expr.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace ncfree {

// ---- log f for f(z) = [[1, z], [z, 1 + z^2]] -------------------------------------------

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

struct LogRadiusReport {
    int N = 0;
    std::vector<Eigen::Matrix2d> coeffs;  // c_0 .. c_N
    std::vector<double> norms;            // ||c_n||
    std::vector<double> roots;            // ||c_n||^{1/n}, 0 where c_n = 0
    double max_trace = 0.0;               // max_n |tr c_n|
    bool trace_exactly_zero = true;       // from the exact integers
    int window_lo = 0, window_hi = 0;
    double root_test = 0.0;   // geometric mean of ||c_n||^{1/n} over the window
    double slope_test = 0.0;  // exp of the least-squares slope of log ||c_n|| over the window
    double radius() const { return root_test > 0 ? 1.0 / root_test : 0.0; }
};

/// Coefficients of log f = sum (-1)^{n+1}/n M(z)^n, M = [[0, z], [z, z^2]],
/// in exact integer arithmetic scaled by lcm(1..N).
inline LogRadiusReport log_radius_experiment(int N) {
    require(N >= 10, ErrorKind::invalid_input, "log radius needs N >= 10");
    const std::size_t len = static_cast<std::size_t>(N) + 1;
    using Poly = std::vector<BigInt>;
    using PMat = std::array<Poly, 4>;  // row-major 2x2

    BigInt lcm = 1;
    for (int n = 2; n <= N; ++n) lcm = boost::multiprecision::lcm(lcm, BigInt(n));

    PMat power;  // M^n truncated at degree N
    for (auto& p : power) p.assign(len, 0);
    power[0][0] = 1;
    power[3][0] = 1;
    PMat acc;  // lcm * sum (-1)^{n+1}/n M^n
    for (auto& p : acc) p.assign(len, 0);

    for (int n = 1; n <= N; ++n) {
        // power <- power * M; column 0 of M is (0, z), column 1 is (z, z^2)
        PMat next;
        for (auto& p : next) p.assign(len, 0);
        for (int r = 0; r < 2; ++r) {
            const Poly& a0 = power[static_cast<std::size_t>(2 * r)];
            const Poly& a1 = power[static_cast<std::size_t>(2 * r + 1)];
            Poly& o0 = next[static_cast<std::size_t>(2 * r)];
            Poly& o1 = next[static_cast<std::size_t>(2 * r + 1)];
            for (std::size_t j = 0; j + 1 < len; ++j) {
                o0[j + 1] += a1[j];
                o1[j + 1] += a0[j];
                if (j + 2 < len) o1[j + 2] += a1[j];
            }
        }
        power = std::move(next);
        const BigInt w = (n % 2 ? 1 : -1) * (lcm / n);
        for (std::size_t e = 0; e < 4; ++e)
            for (std::size_t j = static_cast<std::size_t>(n); j < len; ++j)
                if (!power[e][j].is_zero()) acc[e][j] += w * power[e][j];
    }

    LogRadiusReport rep;
    rep.N = N;
    for (std::size_t j = 0; j < len; ++j) {
        Eigen::Matrix2d c;
        for (std::size_t e = 0; e < 4; ++e)
            c(static_cast<Eigen::Index>(e / 2), static_cast<Eigen::Index>(e % 2)) =
                BigRational(acc[e][j], lcm).convert_to<double>();
        if (acc[0][j] + acc[3][j] != 0) rep.trace_exactly_zero = false;
        rep.max_trace = std::max(rep.max_trace, std::abs(c.trace()));
        const double nrm = c.jacobiSvd().singularValues()(0);
        rep.coeffs.push_back(c);
        rep.norms.push_back(nrm);
        rep.roots.push_back(j > 0 && nrm > 0 ? std::pow(nrm, 1.0 / static_cast<double>(j)) : 0.0);
    }

    rep.window_lo = N / 2;
    rep.window_hi = N;
    double log_sum = 0.0;
    int count = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n = rep.window_lo; n <= rep.window_hi; ++n) {
        const double nrm = rep.norms[static_cast<std::size_t>(n)];
        if (nrm <= 0) continue;
        log_sum += std::log(nrm) / n;
        const double x = n, y = std::log(nrm);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count > 0) rep.root_test = std::exp(log_sum / count);
    if (count > 1) rep.slope_test = std::exp((count * sxy - sx * sy) / (count * sxx - sx * sx));
    return rep;
}

inline std::string log_radius_csv(const LogRadiusReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "n,norm,root\n";
    for (std::size_t n = 1; n < r.norms.size(); ++n) os << n << ',' << r.norms[n] << ',' << r.roots[n] << '\n';
    return os.str();
}

/// f(z) and its principal log; the log fails where f(z) meets the branch cut.
inline Matrix log_example_value(cd z) {
    Matrix f(2, 2);
    f << 1.0, z, z, 1.0 + z * z;
    return f;
}

/// Partial sums sum_{n <= m} c_n z^n, m = 0..N, as operator norms.
inline std::vector<double> partial_sum_norms(const std::vector<Eigen::Matrix2d>& c, cd z) {
    std::vector<double> out;
    Matrix acc = Matrix::Zero(2, 2);
    cd zn = 1.0;
    for (const auto& cn : c) {
        acc += cn.cast<cd>() * zn;
        out.push_back(op_norm(acc));
        zn *= z;
    }
    return out;
}

// ---- BCH and the Martin-Shamovich substitution ---------------------------------------

/// log(exp(x1) exp(x2)) truncated at maxdeg, scalar coefficients, only x1, x2 used.
inline NCSeries bch_series(int maxdeg, int d = 2) {
    require(d >= 2, ErrorKind::invalid_input, "bch needs two letters");
    require(maxdeg >= 1 && maxdeg <= 16, ErrorKind::invalid_input, "bch maxdeg must be in 1..16");
    const NCSeries x = NCSeries::variable(d, 1, 0, false, maxdeg);
    const NCSeries y = NCSeries::variable(d, 1, 1, false, maxdeg);
    return series_log(series_exp(x) * series_exp(y));
}

struct BchSample {
    double norm_sum = 0.0;  // ||X|| + ||Y||
    double deviation = 0.0;
};

/// Truncated BCH against principal_log(exp X exp Y) at seeded points with
/// ||X|| + ||Y|| = radius_sum.
inline std::vector<BchSample> bch_numeric_check(const NCSeries& bch, int samples, double radius_sum,
                                                std::uint64_t seed, int n = 3) {
    std::vector<BchSample> out;
    Rng rng(seed);
    std::uniform_real_distribution<double> split(0.1, 0.9);
    for (int s = 0; s < samples; ++s) {
        const double a = split(rng) * radius_sum;
        Matrix x = random_contraction(n, rng, a);
        Matrix y = random_contraction(n, rng, radius_sum - a);
        std::vector<Matrix> m{x, y};
        for (int i = 2; i < bch.d(); ++i) m.push_back(Matrix::Zero(n, n));
        const Matrix series = eval_series(bch, MatrixTuple(n, m));
        const Matrix exact = principal_log(matrix_exp(x) * matrix_exp(y));
        out.push_back({op_norm(x) + op_norm(y), (series - exact).norm() / (1.0 + exact.norm())});
    }
    return out;
}

struct MartinShamovichReport {
    int maxdeg = 0;
    double product_deviation = 0.0;  // exp(X) exp(Y) vs f(z) at a sample z
    std::vector<Eigen::Matrix2d> substituted;  // z-coefficients of bch(X(z), Y(z))
    double max_coeff_deviation = 0.0;          // against the log-radius coefficients
    int matched_through = -1;                  // largest degree matched within tol
    // divergence evidence from the degree-`divergence_N` coefficients
    int divergence_N = 0;
    double partial_inside = 0.0;   // max partial-sum norm at 1.8i
    double partial_outside = 0.0;  // max partial-sum norm at 2.2i
    double growth_ratio = 0.0;
    bool log_inside_ok = false;       // principal_log(f(1.8i)) exists
    bool log_at_branch_fails = false;  // principal_log(f(2i)) raises LogBranchViolation
};

inline MartinShamovichReport martin_shamovich_check(int maxdeg, int divergence_N = 200, double tol = 1e-10) {
    MartinShamovichReport rep;
    rep.maxdeg = maxdeg;
    const NCSeries bch = bch_series(maxdeg);

    // X = z E21, Y = z E12: the word w contributes z^{|w|} E_w
    Matrix e21 = Matrix::Zero(2, 2), e12 = Matrix::Zero(2, 2);
    e21(1, 0) = 1.0;
    e12(0, 1) = 1.0;
    rep.substituted.assign(static_cast<std::size_t>(maxdeg) + 1, Eigen::Matrix2d::Zero());
    for (const auto& [w, c] : bch.terms()) {
        Matrix prod = Matrix::Identity(2, 2);
        for (std::size_t i = 0; i < w.size(); ++i) prod = prod * (w[i].var == 0 ? e21 : e12);
        rep.substituted[w.size()] += (c(0, 0) * prod).real();
    }
    const cd z0(0.3, -0.2);
    rep.product_deviation = (matrix_exp(z0 * e21) * matrix_exp(z0 * e12) - log_example_value(z0)).norm();

    const LogRadiusReport lr = log_radius_experiment(std::max(divergence_N, std::max(maxdeg, 10)));
    for (int n = 0; n <= maxdeg; ++n) {
        const double dev = (rep.substituted[static_cast<std::size_t>(n)] - lr.coeffs[static_cast<std::size_t>(n)]).norm();
        rep.max_coeff_deviation = std::max(rep.max_coeff_deviation, dev);
        if (dev <= tol && rep.matched_through == n - 1) rep.matched_through = n;
    }

    rep.divergence_N = lr.N;
    auto inside = partial_sum_norms(lr.coeffs, cd(0, 1.8));
    auto outside = partial_sum_norms(lr.coeffs, cd(0, 2.2));
    rep.partial_inside = *std::max_element(inside.begin(), inside.end());
    rep.partial_outside = *std::max_element(outside.begin(), outside.end());
    rep.growth_ratio = rep.partial_outside / rep.partial_inside;
    try {
        principal_log(log_example_value(cd(0, 1.8)));
        rep.log_inside_ok = true;
    } catch (const Error&) {
    }
    try {
        principal_log(log_example_value(cd(0, 2.0)));
    } catch (const Error& e) {
        rep.log_at_branch_fails = e.kind() == ErrorKind::log_branch_violation;
    }
    return rep;
}

// ---- similarity identity on block upper-triangular points ------------------------------

inline MatrixTuple triangular_point(const MatrixTuple& x, const MatrixTuple& y, cd c) {
    require(x.n == y.n && x.d() == y.d(), ErrorKind::dimension_mismatch, "X and Y must have the same shape");
    std::vector<Matrix> m;
    for (int i = 0; i < x.d(); ++i) {
        const auto& xi = x[static_cast<std::size_t>(i)];
        const auto& yi = y[static_cast<std::size_t>(i)];
        Matrix b = Matrix::Zero(2 * x.n, 2 * x.n);
        b.topLeftCorner(x.n, x.n) = xi;
        b.topRightCorner(x.n, x.n) = c * (xi - yi);
        b.bottomRightCorner(x.n, x.n) = yi;
        m.push_back(b);
    }
    return MatrixTuple(2 * x.n, m);
}

struct TriangularReport {
    double deviation = 0.0;  // relative, blockwise max
    double off_diagonal = 0.0;
};

/// f([[X, c(X-Y)], [0, Y]]) against [[f(X), c(f(X)-f(Y))], [0, f(Y)]].
inline TriangularReport triangular_continuation_check(const Expr& e, const MatrixTuple& x, const MatrixTuple& y, cd c) {
    if (has_adjoint(e)) fail(ErrorKind::precondition_violated, "the similarity identity needs an analytic expression");
    const int k = coefficient_size(e);
    const Matrix fx = eval_expr(e, x, k);
    const Matrix fy = eval_expr(e, y, k);
    const Matrix fb = eval_expr(e, triangular_point(x, y, c), k);
    const Eigen::Index m = fx.rows();
    Matrix expect = Matrix::Zero(2 * m, 2 * m);
    expect.topLeftCorner(m, m) = fx;
    expect.topRightCorner(m, m) = c * (fx - fy);
    expect.bottomRightCorner(m, m) = fy;
    TriangularReport rep;
    const double scale = 1.0 + expect.cwiseAbs().maxCoeff();
    rep.deviation = (fb - expect).cwiseAbs().maxCoeff() / scale;
    rep.off_diagonal = fb.topRightCorner(m, m).norm();
    return rep;
}

// ---- SO2 orbits of direct sums of two paths -------------------------------------------

struct SphereSample {
    std::size_t t_index = 0;
    double theta = 0.0;  // (a, b) = (cos theta, sin theta)
    MatrixTuple point;
};

/// [[a, b], [-b, a]] (g1(t) (+) g2(t)) [[a, -b], [b, a]] over a theta grid on [0, pi).
inline std::vector<SphereSample> so2_sphere_samples(const std::vector<MatrixTuple>& g1, const std::vector<MatrixTuple>& g2,
                                                    int grid, double tol = 1e-12) {
    require(!g1.empty() && g1.size() == g2.size(), ErrorKind::invalid_input, "paths need the same number of samples");
    require(grid >= 1, ErrorKind::invalid_input, "grid must be positive");
    auto close = [&](const MatrixTuple& a, const MatrixTuple& b) {
        if (a.n != b.n || a.d() != b.d()) return false;
        for (int i = 0; i < a.d(); ++i)
            if ((a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]).norm() > tol) return false;
        return true;
    };
    if (!close(g1.front(), g2.front()) || !close(g1.back(), g2.back()))
        fail(ErrorKind::endpoint_mismatch, "paths must share both endpoints");
    std::vector<SphereSample> out;
    for (std::size_t t = 0; t < g1.size(); ++t) {
        require(g1[t].n == g1.front().n && g2[t].n == g1.front().n, ErrorKind::dimension_mismatch,
                "path samples must have one size");
        const MatrixTuple sum = direct_sum(g1[t], g2[t]);
        const int n = g1[t].n;
        for (int j = 0; j < grid; ++j) {
            const double theta = std::numbers::pi * j / grid;
            const double a = std::cos(theta), b = std::sin(theta);
            Matrix r(2, 2);
            r << a, b, -b, a;
            const Matrix big = kron(r, Matrix::Identity(n, n));
            // R X R^T = U^* X U with U = R^T
            out.push_back({t, theta, unitary_conjugate(sum, big.adjoint())});
        }
    }
    return out;
}

}  // namespace ncfree
