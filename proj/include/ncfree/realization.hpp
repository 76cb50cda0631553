#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calculus.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "linalg.hpp"
#include "middle.hpp"
#include "series.hpp"

namespace ncfree {

// ---- block assembly of series ------------------------------------------------------

/// [top; bottom] coefficientwise.
inline NCSeries vstack(const NCSeries& top, const NCSeries& bottom) {
    require(top.d() == bottom.d() && top.cols() == bottom.cols(), ErrorKind::dimension_mismatch, "vstack");
    NCSeries out(top.d(), top.rows() + bottom.rows(), top.cols(), std::min(top.maxdeg(), bottom.maxdeg()));
    for (const auto& [w, c] : top.terms()) {
        Matrix m = Matrix::Zero(out.rows(), out.cols());
        m.topRows(top.rows()) = c;
        out.add_term(w, m);
    }
    for (const auto& [w, c] : bottom.terms()) {
        Matrix m = Matrix::Zero(out.rows(), out.cols());
        m.bottomRows(bottom.rows()) = c;
        out.add_term(w, m);
    }
    return out;
}

/// Places `s` at block (row0, col0) of a rows x cols series.
inline NCSeries embed(const NCSeries& s, int rows, int cols, int row0, int col0) {
    require(row0 + s.rows() <= rows && col0 + s.cols() <= cols, ErrorKind::dimension_mismatch, "embed");
    NCSeries out(s.d(), rows, cols, s.maxdeg());
    for (const auto& [w, c] : s.terms()) {
        Matrix m = Matrix::Zero(rows, cols);
        m.block(row0, col0, s.rows(), s.cols()) = c;
        out.add_term(w, m);
    }
    return out;
}

inline std::vector<double> norms_by_word(const NCSeries& s, std::map<Word, double>* out) {
    std::vector<double> v;
    for (const auto& [w, c] : s.terms()) {
        const double nrm = op_norm(c);
        v.push_back(nrm);
        if (out) (*out)[w] = nrm;
    }
    return v;
}

// ---- the realization -----------------------------------------------------------------

/// Gram-side data kept from the construction.
struct GnsData {
    MiddleMatrix plus;   // full index mode
    MiddleMatrix minus;
    double null_cutoff = 1e-10;
    int rank_plus = 0;
    int rank_minus = 0;
    double min_eig_plus = 0.0;
    double min_eig_minus = 0.0;
    Matrix coords_plus;   // r+ x |I+|: column (eta, a) is the vector of eta (x) e_a
    Matrix coords_minus;  // r- x |I-|
    int dropped_entries = 0;  // action-table entries beyond the series truncation
};

/// f(P) = Re g(Z) + [v+(Z); v-(Z)]^* [[1, -T(Z)], [-T(Z)^*, 1]]^{-1} [v+(Z); v-(Z)]
/// with Z = P - center. v+ is r+ x k analytic, v- is r- x k coanalytic,
/// T is r+ x r- analytic, g is k x k analytic; T, v+, v- vanish at 0.
struct Realization {
    int d = 0;
    int k = 1;
    int N = 0;
    int maxdeg = 0;
    std::vector<cd> center;
    NCSeries g;
    NCSeries vplus;
    NCSeries vminus;
    NCSeries T;
    std::optional<GnsData> gns;
    double growth = 0.0;  // max over stored alpha of ||T_alpha||^{1/|alpha|}

    int dim_plus() const { return vplus.rows(); }
    int dim_minus() const { return vminus.rows(); }

    Matrix Q(const Word& alpha) const {
        if (alpha.is_analytic()) return vplus.coeff(alpha);
        require(alpha.is_coanalytic(), ErrorKind::invalid_input, "Q is indexed by analytic or coanalytic words");
        return vminus.coeff(alpha);
    }
    Matrix T_alpha(const Word& alpha) const { return T.coeff(alpha); }
};

inline double growth_diagnostic(const NCSeries& t) {
    double g = 0.0;
    for (const auto& [w, c] : t.terms())
        if (!w.empty()) g = std::max(g, std::pow(op_norm(c), 1.0 / static_cast<double>(w.size())));
    return g;
}

struct BuildOptions {
    double null_cutoff = 1e-10;
    double psd_tol = 1e-9;
    /// Rotates both Gram coordinate systems by seeded Haar unitaries; the
    /// realization changes, its coefficients and values must not.
    std::optional<std::uint64_t> rotation_seed;
};

namespace detail {

struct Coordinates {
    Matrix J;      // r x |I|
    Matrix Jplus;  // |I| x r, right inverse: J * Jplus = 1
    int rank = 0;
    double min_eig = 0.0;
};

inline Coordinates gram_coordinates(const Matrix& gram, double cutoff, double tol, const char* which) {
    Coordinates c;
    if (gram.rows() == 0) return c;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double lmax = lam(lam.size() - 1);
    c.min_eig = lam(0);
    if (lam(0) < -tol * std::max(lmax, 1e-300) && lam(0) < -1e-300)
        fail(ErrorKind::gram_not_psd, std::string(which) + " Gram matrix has eigenvalue " + std::to_string(lam(0)));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = lam.size() - 1; i >= 0; --i)
        if (lmax > 0 && lam(i) > cutoff * lmax) keep.push_back(i);
    c.rank = static_cast<int>(keep.size());
    c.J.resize(c.rank, gram.rows());
    c.Jplus.resize(gram.rows(), c.rank);
    for (int r = 0; r < c.rank; ++r) {
        const Eigen::Index i = keep[static_cast<std::size_t>(r)];
        const double s = std::sqrt(lam(i));
        c.J.row(r) = s * es.eigenvectors().col(i).adjoint();
        c.Jplus.col(r) = es.eigenvectors().col(i) / s;
    }
    return c;
}

inline void rotate(Coordinates& c, Rng& rng) {
    if (c.rank == 0) return;
    const Matrix u = random_unitary(c.rank, rng);
    c.J = u * c.J;
    c.Jplus = c.Jplus * u.adjoint();
}

}  // namespace detail

/// The GNS construction on the truncated middle matrices. Words index
/// H+ (first letter unstarred) and H- (first letter starred) up to length N.
inline Realization build_realization(const NCSeries& s, int N, const BuildOptions& opt = {}) {
    require(s.square(), ErrorKind::dimension_mismatch, "realization needs square coefficients");
    const int k = s.k();
    const int d = s.d();
    const Matrix c0 = s.coeff(Word{});
    if (hermitian_asymmetry(c0) > 1e-10 * std::max(1.0, op_norm(c0)))
        fail(ErrorKind::precondition_violated, "constant coefficient is not self-adjoint");

    GnsData gns;
    gns.null_cutoff = opt.null_cutoff;
    gns.plus = build_middle(s, MiddleKind::plus, N, IndexMode::full);
    gns.minus = build_middle(s, MiddleKind::minus, N, IndexMode::full);
    auto cp = detail::gram_coordinates(gns.plus.gram, opt.null_cutoff, opt.psd_tol, "C+");
    auto cm = detail::gram_coordinates(gns.minus.gram, opt.null_cutoff, opt.psd_tol, "C-");
    if (opt.rotation_seed) {
        Rng rng(*opt.rotation_seed);
        detail::rotate(cp, rng);
        detail::rotate(cm, rng);
    }
    gns.rank_plus = cp.rank;
    gns.rank_minus = cm.rank;
    gns.min_eig_plus = cp.min_eig;
    gns.min_eig_minus = cm.min_eig;
    gns.coords_plus = cp.J;
    gns.coords_minus = cm.J;

    Realization r;
    r.d = d;
    r.k = k;
    r.N = N;
    r.maxdeg = s.maxdeg();
    r.center.assign(static_cast<std::size_t>(d), 0.0);
    r.vplus = NCSeries(d, cp.rank, k, s.maxdeg());
    r.vminus = NCSeries(d, cm.rank, k, s.maxdeg());
    r.T = NCSeries(d, cp.rank, cm.rank, s.maxdeg());
    r.g = NCSeries(d, k, s.maxdeg());

    std::map<Word, Eigen::Index> idx_plus, idx_minus;
    for (std::size_t i = 0; i < gns.plus.words.size(); ++i) idx_plus[gns.plus.words[i]] = static_cast<Eigen::Index>(i);
    for (std::size_t i = 0; i < gns.minus.words.size(); ++i) idx_minus[gns.minus.words[i]] = static_cast<Eigen::Index>(i);

    for (const auto& alpha : analytic_words(d, 1, N)) {
        r.vplus.add_term(alpha, cp.J.middleCols(idx_plus.at(alpha) * k, k));
        const Word beta = alpha.adjoint();
        r.vminus.add_term(beta, cm.J.middleCols(idx_minus.at(beta) * k, k));
    }

    // T_alpha = (J+^+)^* K_alpha J-^+ with K_alpha[(eta,a),(gamma,b)] = c_{eta^* alpha gamma}
    const auto& wp = gns.plus.words;
    const auto& wm = gns.minus.words;
    for (const auto& alpha : analytic_words(d, 1, N)) {
        Matrix K = Matrix::Zero(static_cast<Eigen::Index>(wp.size()) * k, static_cast<Eigen::Index>(wm.size()) * k);
        for (std::size_t p = 0; p < wp.size(); ++p) {
            const Word left = wp[p].adjoint() + alpha;
            for (std::size_t q = 0; q < wm.size(); ++q) {
                const Word w = left + wm[q];
                if (static_cast<int>(w.size()) > s.maxdeg()) {
                    ++gns.dropped_entries;
                    continue;
                }
                auto it = s.terms().find(w);
                if (it != s.terms().end())
                    K.block(static_cast<Eigen::Index>(p) * k, static_cast<Eigen::Index>(q) * k, k, k) = it->second;
            }
        }
        r.T.add_term(alpha, cp.Jplus.adjoint() * K * cm.Jplus);
    }

    for (const auto& [w, c] : s.terms()) {
        if (w.empty()) r.g.add_term(w, c);
        else if (w.is_analytic()) r.g.add_term(w, 2.0 * c);
    }
    r.growth = growth_diagnostic(r.T);
    r.gns = std::move(gns);
    return r;
}

/// Coefficient of Z^beta in the realization's expansion: the Re g part for a
/// single block, Q_{b0^*}^* X_1 ... X_{n-1} Q_{bn} for blocks b0 ... bn, where
/// X_j is T_{bj} for an analytic block and T_{bj^*}^* for a coanalytic one.
inline Matrix reconstruct_coefficient(const Realization& r, const Word& beta) {
    if (static_cast<int>(beta.size()) > r.N)
        fail(ErrorKind::out_of_truncation,
             "|beta|=" + std::to_string(beta.size()) + " exceeds N=" + std::to_string(r.N));
    require(beta.max_var() < r.d, ErrorKind::invalid_input, "word uses a variable beyond d");
    if (beta.empty()) {
        const Matrix g0 = r.g.coeff(beta);
        return (g0 + g0.adjoint()) / 2.0;
    }
    const auto blocks = alternating_blocks(beta);
    if (blocks.size() == 1) {
        if (beta.is_analytic()) return r.g.coeff(beta) / 2.0;
        return r.g.coeff(beta.adjoint()).adjoint() / 2.0;
    }
    Matrix acc = r.Q(blocks.front().adjoint()).adjoint();
    for (std::size_t j = 1; j + 1 < blocks.size(); ++j) {
        const Word& b = blocks[j];
        acc = acc * (b.is_analytic() ? r.T_alpha(b) : Matrix(r.T_alpha(b.adjoint()).adjoint()));
    }
    return acc * r.Q(blocks.back());
}

inline MatrixTuple shift_to_local(const Realization& r, const MatrixTuple& p) {
    require(p.d() == r.d, ErrorKind::dimension_mismatch, "point has the wrong number of variables");
    MatrixTuple z = p;
    for (int i = 0; i < r.d; ++i)
        z.mats[static_cast<std::size_t>(i)] -= r.center[static_cast<std::size_t>(i)] * Matrix::Identity(p.n, p.n);
    return z;
}

struct RealizationValues {
    Matrix T;       // T(Z)
    Matrix V;       // [v+(Z); v-(Z)]
    Matrix R;       // [[1, -T], [-T^*, 1]]^{-1}
    double t_norm = 0.0;
};

inline RealizationValues realization_values(const Realization& r, const MatrixTuple& z, double contract_tol = 0.0) {
    RealizationValues out;
    out.T = eval_series(r.T, z);
    out.t_norm = op_norm(out.T);
    if (!(out.t_norm < 1.0 - contract_tol))
        fail(ErrorKind::t_not_contractive, "||T(Z)|| = " + std::to_string(out.t_norm));
    const Matrix vp = eval_series(r.vplus, z);
    const Matrix vm = eval_series(r.vminus, z);
    out.V.resize(vp.rows() + vm.rows(), vp.cols());
    out.V << vp, vm;
    const Eigen::Index a = out.T.rows(), b = out.T.cols();
    Matrix m(a + b, a + b);
    m << Matrix::Identity(a, a), -out.T, -out.T.adjoint(), Matrix::Identity(b, b);
    out.R = checked_inverse(m, ErrorKind::t_not_contractive);
    return out;
}

inline Matrix eval_realization(const Realization& r, const MatrixTuple& p) {
    const MatrixTuple z = shift_to_local(r, p);
    const RealizationValues v = realization_values(r, z);
    const Matrix gz = eval_series(r.g, z);
    return (gz + gz.adjoint()) / 2.0 + v.V.adjoint() * v.R * v.V;
}

/// Delta f(Z)[H] = w+^* R w+ + w-^* R w-, with
/// w+ = [Dv+[H] + DT[H] (RV)_-; 0] and w- = [0; D^*v-[H] + DT[H]^* (RV)_+].
inline Matrix realization_hessian(const Realization& r, const MatrixTuple& p, const MatrixTuple& h) {
    const MatrixTuple z = shift_to_local(r, p);
    const RealizationValues v = realization_values(r, z);
    const Matrix RV = v.R * v.V;
    const Eigen::Index a = v.T.rows(), b = v.T.cols();
    const Matrix dT = eval_form(derivative(r.T), z, h);
    const Matrix dvp = eval_form(derivative(r.vplus), z, h);
    const Matrix dvm = eval_form(conj_derivative(r.vminus), z, h);
    Matrix wp = Matrix::Zero(a + b, RV.cols());
    Matrix wm = Matrix::Zero(a + b, RV.cols());
    wp.topRows(a) = dvp + dT * RV.bottomRows(b);
    wm.bottomRows(b) = dvm + dT.adjoint() * RV.topRows(a);
    return wp.adjoint() * v.R * wp + wm.adjoint() * v.R * wm;
}

/// Power-series expansion of the realization around its center.
inline NCSeries realization_series(const Realization& r, int maxdeg) {
    const int a = r.dim_plus(), b = r.dim_minus();
    const NCSeries V = vstack(r.vplus, r.vminus).with_maxdeg(maxdeg);
    NCSeries S = embed(r.T, a + b, a + b, 0, a) + embed(series_adjoint(r.T), a + b, a + b, a, 0);
    S = S.with_maxdeg(maxdeg);
    const NCSeries R = neumann_inverse(NCSeries::scalar(r.d, a + b, 1.0, maxdeg) - S);
    return real_part(r.g.with_maxdeg(maxdeg)) + series_adjoint(V) * R * V;
}

// ---- convex (butterfly) form -----------------------------------------------------------

/// a0 + L(X) + Lambda(X)^* (I - Gamma(X))^{-1} Lambda(X), with L (k x k),
/// Lambda (m x k), Gamma (m x m) linear in X, X^* (words of length 1 only).
struct Butterfly {
    Matrix a0;
    NCSeries L;
    NCSeries Lambda;
    NCSeries Gamma;
};

inline void check_linear(const NCSeries& s, const char* what) {
    for (const auto& [w, c] : s.terms())
        require(w.size() == 1, ErrorKind::invalid_input, std::string(what) + " must be linear in X, X^*");
}

inline Matrix butterfly_resolvent(const Butterfly& b, const MatrixTuple& x) {
    check_linear(b.Gamma, "Gamma");
    const Matrix g = eval_series(b.Gamma, x);
    const Matrix m = Matrix::Identity(g.rows(), g.cols()) - g;
    if (hermitian_asymmetry(m) > 1e-10 * std::max(1.0, op_norm(m)) || min_hermitian_eig(m) <= 1e-12)
        fail(ErrorKind::resolvent_singular, "I - Gamma(X) is not positive definite");
    return checked_inverse(m, ErrorKind::resolvent_singular);
}

inline Matrix butterfly_eval(const Butterfly& b, const MatrixTuple& x) {
    check_linear(b.L, "L");
    check_linear(b.Lambda, "Lambda");
    const Matrix R = butterfly_resolvent(b, x);
    const Matrix lam = eval_series(b.Lambda, x);
    return lift_constant(b.a0, x.n) + eval_series(b.L, x) + lam.adjoint() * R * lam;
}

/// 2 v^* R v with v = Gamma(H) R Lambda(X) + Lambda(H).
inline Matrix butterfly_second_derivative(const Butterfly& b, const MatrixTuple& x, const MatrixTuple& h) {
    const Matrix R = butterfly_resolvent(b, x);
    const Matrix v = eval_series(b.Gamma, h) * R * eval_series(b.Lambda, x) + eval_series(b.Lambda, h);
    return 2.0 * v.adjoint() * R * v;
}

}  // namespace ncfree
