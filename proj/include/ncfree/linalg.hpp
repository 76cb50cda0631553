#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"

namespace ncfree {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

/// A point of the matrix universe: d matrices, all n x n.
struct MatrixTuple {
    int n = 0;
    std::vector<Matrix> mats;

    MatrixTuple() = default;
    MatrixTuple(int n_, std::vector<Matrix> m) : n(n_), mats(std::move(m)) { validate(); }

    static MatrixTuple zero(int d, int n) {
        return MatrixTuple(n, std::vector<Matrix>(static_cast<std::size_t>(d), Matrix::Zero(n, n)));
    }

    int d() const { return static_cast<int>(mats.size()); }
    const Matrix& operator[](std::size_t i) const { return mats[i]; }
    Matrix& operator[](std::size_t i) { return mats[i]; }

    void validate() const {
        for (const auto& m : mats)
            require(m.rows() == n && m.cols() == n, ErrorKind::dimension_mismatch,
                    "tuple matrices must all be " + std::to_string(n) + "x" + std::to_string(n));
    }

    MatrixTuple operator+(const MatrixTuple& o) const {
        require(o.n == n && o.d() == d(), ErrorKind::dimension_mismatch, "tuple sum");
        MatrixTuple r = *this;
        for (std::size_t i = 0; i < mats.size(); ++i) r.mats[i] += o.mats[i];
        return r;
    }
    MatrixTuple operator-(const MatrixTuple& o) const { return *this + o * cd(-1.0); }
    MatrixTuple operator*(cd s) const {
        MatrixTuple r = *this;
        for (auto& m : r.mats) m *= s;
        return r;
    }

    double max_norm() const;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double op_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

inline double MatrixTuple::max_norm() const {
    double r = 0.0;
    for (const auto& m : mats) r = std::max(r, op_norm(m));
    return r;
}

inline Matrix direct_sum(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

inline MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y) {
    require(x.d() == y.d(), ErrorKind::dimension_mismatch, "direct sum of tuples of different length");
    std::vector<Matrix> m;
    for (int i = 0; i < x.d(); ++i) m.push_back(direct_sum(x.mats[i], y.mats[i]));
    return MatrixTuple(x.n + y.n, std::move(m));
}

/// U^* X_i U for each i.
inline MatrixTuple unitary_conjugate(const MatrixTuple& x, const Matrix& u) {
    std::vector<Matrix> m;
    for (const auto& xi : x.mats) m.push_back(u.adjoint() * xi * u);
    return MatrixTuple(x.n, std::move(m));
}

inline double hermitian_asymmetry(const Matrix& m) {
    return (m - m.adjoint()).norm();
}

struct PsdReport {
    bool psd = true;
    double min_eigenvalue = 0.0;
    double asymmetry = 0.0;
    Vector witness;  // unit eigenvector for the min eigenvalue; empty when psd
};

/// Symmetrizes, then PSD iff min eig >= -tol * ||M||.
inline PsdReport psd_check(const Matrix& m, double tol = 1e-9) {
    require(m.rows() == m.cols(), ErrorKind::dimension_mismatch, "psd_check needs a square matrix");
    PsdReport rep;
    if (m.size() == 0) return rep;
    const double scale = std::max(op_norm(m), 1e-300);
    rep.asymmetry = hermitian_asymmetry(m);
    if (rep.asymmetry > tol * scale && rep.asymmetry > 1e-14)
        fail(ErrorKind::not_hermitian,
             "asymmetry " + std::to_string(rep.asymmetry) + " exceeds tolerance");
    const Matrix h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    rep.min_eigenvalue = es.eigenvalues()(0);
    if (rep.min_eigenvalue < -tol * scale) {
        rep.psd = false;
        rep.witness = es.eigenvectors().col(0);
    }
    return rep;
}

inline double min_hermitian_eig(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

inline Matrix matrix_exp(const Matrix& m) { return m.exp(); }

/// Principal logarithm. Rejects spectra touching the closed negative real axis.
/// A defective eigenvalue on the cut is only resolved to about sqrt(eps), hence
/// the loose imaginary-part tolerance.
inline Matrix principal_log(const Matrix& m, double cut_tol = 1e-6) {
    require(m.rows() == m.cols(), ErrorKind::dimension_mismatch, "principal_log needs a square matrix");
    if (m.size() == 0) return m;
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cd lam = es.eigenvalues()(i);
        if (std::abs(lam.imag()) <= cut_tol * scale && lam.real() <= cut_tol * scale)
            fail(ErrorKind::log_branch_violation,
                 "eigenvalue (" + std::to_string(lam.real()) + ", " + std::to_string(lam.imag()) +
                     ") on the closed negative real axis");
    }
    return m.log();
}

/// Square root of a Hermitian PSD matrix.
inline Matrix hermitian_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
    require(es.eigenvalues()(0) >= -1e-12 * std::max(1.0, std::abs(es.eigenvalues()(es.eigenvalues().size() - 1))),
            ErrorKind::precondition_violated, "hermitian_sqrt of an indefinite matrix");
    Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Inverse with an rcond check; throws `kind` when numerically singular.
inline Matrix checked_inverse(const Matrix& m, ErrorKind kind = ErrorKind::singular_inverse,
                              double rcond_tol = 1e-13) {
    require(m.rows() == m.cols(), ErrorKind::dimension_mismatch, "inverse of a non-square matrix");
    if (m.size() == 0) return m;
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc > rcond_tol)) fail(kind, "matrix is numerically singular (rcond " + std::to_string(rc) + ")");
    return lu.inverse();
}

// ---- seeded random generators -------------------------------------------------

inline cd complex_normal(Rng& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

/// i.i.d. CN(0,1) entries scaled by 1/sqrt(n).
inline Matrix random_ginibre(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    const double s = 1.0 / std::sqrt(static_cast<double>(std::max(rows, 1)));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = s * complex_normal(rng);
    return m;
}

inline Matrix random_ginibre(int n, Rng& rng) { return random_ginibre(n, n, rng); }

/// Haar unitary: QR of a Ginibre matrix with the phase of R's diagonal removed.
inline Matrix random_unitary(int n, Rng& rng) {
    Matrix g = random_ginibre(n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        const cd dii = r(i, i);
        const double a = std::abs(dii);
        if (a > 0) q.col(i) *= dii / a;
    }
    return q;
}

/// Tuple of d Ginibre matrices rescaled so that every ||X_i|| <= radius.
inline MatrixTuple random_tuple(int d, int n, Rng& rng, double radius = 1.0) {
    std::uniform_real_distribution<double> ud(0.1, 1.0);
    std::vector<Matrix> m;
    for (int i = 0; i < d; ++i) {
        Matrix g = random_ginibre(n, rng);
        const double nrm = op_norm(g);
        m.push_back(g * (radius * ud(rng) / std::max(nrm, 1e-300)));
    }
    return MatrixTuple(n, std::move(m));
}

/// Random matrix with operator norm exactly `norm`.
inline Matrix random_contraction(int n, Rng& rng, double norm = 0.9) {
    Matrix g = random_ginibre(n, rng);
    return g * (norm / std::max(op_norm(g), 1e-300));
}

/// Random square A with 1 - A - A^* >= margin * I, margin drawn from [0.05, 1].
inline Matrix random_posreal(int n, Rng& rng) {
    std::uniform_real_distribution<double> ud(0.05, 1.0);
    const double margin = ud(rng);
    Matrix y = random_ginibre(n, rng);
    Matrix p = y.adjoint() * y;
    Matrix k = random_ginibre(n, rng);
    k = (k + k.adjoint()).eval() / 2.0;
    // A = B + iK with B Hermitian and 2B = (1 - margin) - 2P
    Matrix b = ((1.0 - margin) / 2.0) * Matrix::Identity(n, n) - p;
    return b + cd(0, 1) * k;
}

/// Deterministic child seed for sample `index` of a run seeded with `root`.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint64_t out[1];
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    return out[0];
}

}  // namespace ncfree
