#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "eval.hpp"
#include "linalg.hpp"
#include "realization.hpp"
#include "series.hpp"

namespace ncfree {

inline double posreal_margin(const Matrix& a) {
    return min_hermitian_eig(Matrix::Identity(a.rows(), a.cols()) - a - a.adjoint());
}

/// A (1 - A)^{-1}; a strict contraction whenever 1 - A - A^* > 0.
inline Matrix schur_contraction(const Matrix& a, double tol = 1e-12) {
    require(a.rows() == a.cols(), ErrorKind::dimension_mismatch, "schur_contraction needs a square matrix");
    const double m = posreal_margin(a);
    if (!(m > tol)) fail(ErrorKind::precondition_violated, "1 - A - A^* has eigenvalue " + std::to_string(m));
    const Matrix one = Matrix::Identity(a.rows(), a.cols());
    return a * checked_inverse(one - a, ErrorKind::precondition_violated);
}

// ---- the ten expressions for D^* (1 - A - A^*)^{-1} C ------------------------------

struct TenIdentityReport {
    std::array<Matrix, 10> values;
    std::array<double, 10> deviation{};  // ||e_i - e_1||, raw
    double max_deviation = 0.0;
    double scale = 1.0;  // (1 + ||A||) ||C|| ||D||
    double relative() const { return max_deviation / std::max(scale, 1e-300); }
};

inline TenIdentityReport ten_identities(const Matrix& A, const Matrix& C, const Matrix& D, double tol = 1e-12) {
    require(A.rows() == A.cols() && C.rows() == A.rows() && D.rows() == A.rows(), ErrorKind::dimension_mismatch,
            "ten identities: A is m x m, C and D have m rows");
    const double margin = posreal_margin(A);
    if (!(margin > tol)) fail(ErrorKind::precondition_violated, "1 - A - A^* has eigenvalue " + std::to_string(margin));
    const Eigen::Index m = A.rows();
    const Matrix I = Matrix::Identity(m, m);
    const Matrix As = A.adjoint();
    const Matrix P = checked_inverse(I - A, ErrorKind::precondition_violated);
    const Matrix Ps = checked_inverse(I - As, ErrorKind::precondition_violated);
    const Matrix B = A * P, Bs = As * Ps;
    Matrix blk(2 * m, 2 * m);
    blk << I, -B, -Bs, I;
    const Matrix Mi = checked_inverse(blk, ErrorKind::precondition_violated);
    auto top = [&](const Matrix& x) {
        Matrix s = Matrix::Zero(2 * m, x.cols());
        s.topRows(m) = x;
        return s;
    };
    auto bot = [&](const Matrix& x) {
        Matrix s = Matrix::Zero(2 * m, x.cols());
        s.bottomRows(m) = x;
        return s;
    };
    auto both = [&](const Matrix& x) {
        Matrix s(2 * m, x.cols());
        s << A * P * x, As * Ps * x;
        return s;
    };
    auto bil = [&](const Matrix& l, const Matrix& r) -> Matrix { return l.adjoint() * Mi * r; };
    const Matrix Ds = D.adjoint();

    TenIdentityReport rep;
    auto& e = rep.values;
    e[0] = Ds * checked_inverse(I - A - As, ErrorKind::precondition_violated) * C;
    e[1] = bil(top(P * D), top(P * C));
    e[2] = bil(bot(Ps * D), top(P * C)) + Ds * P * C;
    e[3] = bil(top(P * D), bot(Ps * C)) + Ds * Ps * C;
    e[4] = bil(bot(Ps * D), bot(Ps * C));
    e[5] = bil(both(D), top(P * C)) + Ds * P * C;
    e[6] = bil(both(D), bot(Ps * C)) + Ds * Ps * C;
    e[7] = bil(top(P * D), both(C)) + Ds * Ps * C;
    e[8] = bil(bot(Ps * D), both(C)) + Ds * P * C;
    e[9] = bil(both(D), both(C)) + Ds * (P + Ps - I) * C;
    for (std::size_t i = 0; i < 10; ++i) {
        rep.deviation[i] = (e[i] - e[0]).norm();
        rep.max_deviation = std::max(rep.max_deviation, rep.deviation[i]);
    }
    rep.scale = (1.0 + op_norm(A)) * op_norm(C) * op_norm(D);
    return rep;
}

/// Max deviation of the ten expressions from the first, scale-relative.
inline double verify_ten_identities(const Matrix& A, const Matrix& C, const Matrix& D) {
    return ten_identities(A, C, D).relative();
}

// ---- affine realizations -----------------------------------------------------------

/// f(Z) = (v+(Z) + v-(Z) + v0)^* (1 - T(Z) - T(Z)^*)^{-1} (v+(Z) + v-(Z) + v0),
/// v+ analytic, v- coanalytic, both m x k; T analytic m x m; v+, v-, T vanish at 0.
struct AffineRealizationData {
    NCSeries v_plus;
    NCSeries v_minus;
    Matrix v0;
    NCSeries T;

    int d() const { return T.d(); }
    int m() const { return T.rows(); }
    int k() const { return v_plus.cols(); }

    void validate() const {
        require(T.square() && v_plus.rows() == m() && v_minus.rows() == m() && v0.rows() == m() &&
                    v_minus.cols() == k() && v0.cols() == k() && v_plus.d() == d() && v_minus.d() == d(),
                ErrorKind::dimension_mismatch, "affine realization shapes");
        for (const auto& [w, c] : v_plus.terms())
            require(!w.empty() && w.is_analytic(), ErrorKind::invalid_input, "v+ must be analytic and vanish at 0");
        for (const auto& [w, c] : v_minus.terms())
            require(!w.empty() && w.is_coanalytic(), ErrorKind::invalid_input, "v- must be coanalytic and vanish at 0");
        for (const auto& [w, c] : T.terms())
            require(!w.empty() && w.is_analytic(), ErrorKind::invalid_input, "T must be analytic and vanish at 0");
    }
};

/// The realization's quadratic part as an affine realization on H+ (+) H-.
inline AffineRealizationData affine_embedding(const Realization& r) {
    const int a = r.dim_plus(), b = r.dim_minus(), m = a + b;
    AffineRealizationData out;
    out.v_plus = embed(r.vplus, m, r.k, 0, 0);
    out.v_minus = embed(r.vminus, m, r.k, a, 0);
    out.v0 = Matrix::Zero(m, r.k);
    out.T = embed(r.T, m, m, 0, a);
    return out;
}

/// Values of the data at one point (level n, lifted).
struct AffineValues {
    Matrix vp, vm, v0, T;
};

inline AffineValues affine_values(const AffineRealizationData& a, const MatrixTuple& z) {
    return {eval_series(a.v_plus, z), eval_series(a.v_minus, z), lift_constant(a.v0, z.n), eval_series(a.T, z)};
}

inline Matrix affine_form(const AffineValues& v, double tol = 0.0) {
    const Eigen::Index m = v.T.rows();
    const Matrix den = Matrix::Identity(m, m) - v.T - v.T.adjoint();
    const double margin = min_hermitian_eig(den);
    if (!(margin > tol)) fail(ErrorKind::precondition_violated, "1 - T - T^* has eigenvalue " + std::to_string(margin));
    const Matrix x = v.vp + v.vm + v.v0;
    return x.adjoint() * checked_inverse(den, ErrorKind::precondition_violated) * x;
}

inline Matrix affine_eval(const AffineRealizationData& a, const MatrixTuple& z) {
    return affine_form(affine_values(a, z));
}

// ---- restructuring -----------------------------------------------------------------

/// v+^ = (1-T)^{-1}(v+ + T v0), v-^ = (1-T^*)^{-1}(v- + T^* v0), T^ = T(1-T)^{-1},
/// g^ = 2 (v- + v0)^* (1-T)^{-1} (v+ + v0) - v0^* v0.
/// The inverses are Neumann expansions truncated at maxdeg.
inline Realization restructure(const AffineRealizationData& a) {
    a.validate();
    const int d = a.d(), m = a.m(), k = a.k(), deg = a.T.maxdeg();
    const NCSeries one = NCSeries::scalar(d, m, 1.0, deg);
    const NCSeries P = neumann_inverse(one - a.T);
    const NCSeries Ts = series_adjoint(a.T);
    const NCSeries Ps = series_adjoint(P);
    const NCSeries v0 = NCSeries::constant(d, a.v0, deg);

    Realization r;
    r.d = d;
    r.k = k;
    r.N = deg;
    r.maxdeg = deg;
    r.center.assign(static_cast<std::size_t>(d), 0.0);
    r.vplus = P * (a.v_plus + a.T * v0);
    r.vminus = Ps * (a.v_minus + Ts * v0);
    r.T = a.T * P;
    r.g = scalar_mul(2.0, series_adjoint(a.v_minus + v0) * P * (a.v_plus + v0)) -
          NCSeries::constant(d, (a.v0.adjoint() * a.v0).eval(), deg);
    r.growth = growth_diagnostic(r.T);
    return r;
}

/// Pointwise restructuring with exact inverses: Re g^ + [v+^; v-^]^* [[1,-T^],[-T^*,1]]^{-1} [v+^; v-^].
inline Matrix restructured_form(const AffineValues& v, double tol = 0.0) {
    const Eigen::Index m = v.T.rows();
    const Matrix I = Matrix::Identity(m, m);
    const double margin = min_hermitian_eig(I - v.T - v.T.adjoint());
    if (!(margin > tol)) fail(ErrorKind::precondition_violated, "1 - T - T^* has eigenvalue " + std::to_string(margin));
    const Matrix P = checked_inverse(I - v.T, ErrorKind::precondition_violated);
    const Matrix Ps = P.adjoint();
    const Matrix vhp = P * (v.vp + v.T * v.v0);
    const Matrix vhm = Ps * (v.vm + v.T.adjoint() * v.v0);
    const Matrix Th = v.T * P;
    const Matrix g = 2.0 * (v.vm + v.v0).adjoint() * P * (v.vp + v.v0) - v.v0.adjoint() * v.v0;
    Matrix V(2 * m, vhp.cols());
    V << vhp, vhm;
    Matrix blk(2 * m, 2 * m);
    blk << I, -Th, -Th.adjoint(), I;
    return (g + g.adjoint()) / 2.0 + V.adjoint() * checked_inverse(blk, ErrorKind::precondition_violated) * V;
}

// ---- recentering --------------------------------------------------------------------

inline Matrix recenter_factor(const Matrix& tw, double tol) {
    const Matrix den = Matrix::Identity(tw.rows(), tw.cols()) - tw - tw.adjoint();
    const double margin = min_hermitian_eig(den);
    if (!(margin > tol))
        fail(ErrorKind::precondition_violated, "1 - T(W) - T(W)^* has eigenvalue " + std::to_string(margin));
    return hermitian_sqrt(den);
}

/// The recentered data evaluated at Z for a general level-n center W:
/// T^(Z) = u^{-1}(T(Z+W) - T(W))u^{-1}, v^(Z) = u^{-1}(v(Z+W) - v(W)),
/// v0^ = u^{-1}(v+(W) + v-(W) + v0), u = sqrt(1 - T(W) - T(W)^*).
inline AffineValues movecenter_values(const AffineRealizationData& a, const MatrixTuple& w, const MatrixTuple& z,
                                      double tol = 1e-12) {
    require(w.n == z.n && w.d() == z.d(), ErrorKind::dimension_mismatch, "center and point differ in size");
    const AffineValues at_w = affine_values(a, w);
    const AffineValues at_zw = affine_values(a, z + w);
    const Matrix ui = checked_inverse(recenter_factor(at_w.T, tol), ErrorKind::precondition_violated);
    AffineValues out;
    out.T = ui * (at_zw.T - at_w.T) * ui;
    out.vp = ui * (at_zw.vp - at_w.vp);
    out.vm = ui * (at_zw.vm - at_w.vm);
    out.v0 = ui * (at_w.vp + at_w.vm + at_w.v0);
    return out;
}

/// Series-level recentering at a scalar point w (W_i = w_i I).
inline AffineRealizationData movecenter(const AffineRealizationData& a, const std::vector<cd>& w, double tol = 1e-12) {
    a.validate();
    require(static_cast<int>(w.size()) == a.d(), ErrorKind::dimension_mismatch, "center has the wrong length");
    const NCSeries tt = translate(a.T, w), tp = translate(a.v_plus, w), tm = translate(a.v_minus, w);
    const Matrix tw = tt.coeff(Word{});
    const Matrix ui = checked_inverse(recenter_factor(tw, tol), ErrorKind::precondition_violated);
    auto strip = [](const NCSeries& s) { return degree_filter(s, 1, s.maxdeg()); };
    AffineRealizationData out;
    out.T = rmul(lmul(ui, strip(tt)), ui);
    out.v_plus = lmul(ui, strip(tp));
    out.v_minus = lmul(ui, strip(tm));
    out.v0 = ui * (tp.coeff(Word{}) + tm.coeff(Word{}) + a.v0);
    return out;
}

/// A matrix-tuple center accepted by the series transforms: every W_i must be
/// a multiple of the identity.
inline std::vector<cd> scalar_center(const MatrixTuple& w, double tol = 1e-14) {
    std::vector<cd> out;
    for (const auto& m : w.mats) {
        const cd s = m.size() ? m(0, 0) : cd(0.0);
        if ((m - s * Matrix::Identity(m.rows(), m.cols())).norm() > tol * std::max(1.0, std::abs(s)))
            fail(ErrorKind::precondition_violated, "series continuation needs scalar centers (W_i = w_i I)");
        out.push_back(s);
    }
    return out;
}

// ---- continuation --------------------------------------------------------------------

struct ContinuationOptions {
    int grid = 16;
    int bisection_steps = 40;
    double tol = 1e-9;  // minimum margin of 1 - T - T^* along the segment
    int maxdeg = 0;     // 0: keep the realization's truncation
    bool rebuild = false;
    int rebuild_N = 0;  // 0: keep N
};

struct SegmentValidity {
    bool valid = true;
    double t_max = 1.0;       // validity holds on [0, t_max]
    double min_margin = 1.0;  // smallest margin seen on the grid
};

/// Margin of [[1, -T(tw)], [-T(tw)^*, 1]] along t in [0, 1]; grid plus
/// bisection on the first failing cell.
inline SegmentValidity segment_validity(const Realization& r, const std::vector<cd>& w,
                                        const ContinuationOptions& opt = {}) {
    auto margin = [&](double t) {
        std::vector<Matrix> mats;
        for (int i = 0; i < r.d; ++i) mats.push_back(Matrix::Constant(1, 1, t * w[static_cast<std::size_t>(i)]));
        const Matrix tz = eval_series(r.T, MatrixTuple(1, mats));
        return 1.0 - op_norm(tz);
    };
    SegmentValidity out;
    double good = 0.0;
    for (int j = 1; j <= opt.grid; ++j) {
        const double t = static_cast<double>(j) / opt.grid;
        const double mg = margin(t);
        out.min_margin = std::min(out.min_margin, mg);
        if (!(mg > opt.tol)) {
            double lo = good, hi = t;
            for (int s = 0; s < opt.bisection_steps; ++s) {
                const double mid = (lo + hi) / 2;
                (margin(mid) > opt.tol ? lo : hi) = mid;
            }
            out.valid = false;
            out.t_max = lo;
            return out;
        }
        good = t;
    }
    return out;
}

struct ContinuationResult {
    Realization next;
    SegmentValidity validity;
};

/// Moves the center by a scalar w: recenter the quadratic part, restructure it
/// and fold the translated Re g into the new g.
inline ContinuationResult continuation_step(const Realization& r, const std::vector<cd>& w,
                                            const ContinuationOptions& opt = {}) {
    require(static_cast<int>(w.size()) == r.d, ErrorKind::dimension_mismatch, "step has the wrong length");
    ContinuationResult res;
    res.validity = segment_validity(r, w, opt);
    if (!res.validity.valid)
        fail(ErrorKind::precondition_violated,
             "step leaves the validity region at t = " + std::to_string(res.validity.t_max));
    const int deg = opt.maxdeg > 0 ? opt.maxdeg : r.maxdeg;
    Realization src = r;
    src.g = src.g.with_maxdeg(deg);
    src.vplus = src.vplus.with_maxdeg(deg);
    src.vminus = src.vminus.with_maxdeg(deg);
    src.T = src.T.with_maxdeg(deg);

    const AffineRealizationData moved = movecenter(affine_embedding(src), w, opt.tol);
    Realization next = restructure(moved);
    next.g = translate(src.g, w) + next.g;
    next.N = r.N;
    next.center = r.center;
    for (std::size_t i = 0; i < w.size(); ++i) next.center[i] += w[i];
    if (opt.rebuild) {
        const NCSeries s = real_part(realization_series(next, deg));
        Realization rebuilt = build_realization(s, opt.rebuild_N > 0 ? opt.rebuild_N : r.N);
        rebuilt.center = next.center;
        next = std::move(rebuilt);
    }
    res.next = std::move(next);
    return res;
}

inline ContinuationResult continuation_step(const Realization& r, const MatrixTuple& w,
                                            const ContinuationOptions& opt = {}) {
    return continuation_step(r, scalar_center(w), opt);
}

/// Max deviation of two realizations at sampled points P = center + Z,
/// ||Z_i|| <= radius, skipping points where either is not contractive.
struct OverlapReport {
    int compared = 0;
    int skipped = 0;
    double max_deviation = 0.0;
};

inline OverlapReport overlap_check(const Realization& a, const Realization& b, const std::vector<cd>& center,
                                   int samples, double radius, std::uint64_t seed, int n = 2) {
    OverlapReport rep;
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
        MatrixTuple p = random_tuple(a.d, n, rng, radius);
        for (int i = 0; i < a.d; ++i) p.mats[static_cast<std::size_t>(i)] += center[static_cast<std::size_t>(i)] * Matrix::Identity(n, n);
        try {
            const Matrix fa = eval_realization(a, p);
            const Matrix fb = eval_realization(b, p);
            rep.max_deviation = std::max(rep.max_deviation, (fa - fb).norm() / (1.0 + fa.norm()));
            ++rep.compared;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::t_not_contractive) throw;
            ++rep.skipped;
        }
    }
    return rep;
}

}  // namespace ncfree
