#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "error.hpp"
#include "eval.hpp"
#include "expr.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace ncfree {

enum class DiffOp { D, Dstar, Hessian, DR, DR2 };

inline std::string_view to_string(DiffOp op) {
    switch (op) {
        case DiffOp::D: return "D";
        case DiffOp::Dstar: return "Dstar";
        case DiffOp::Hessian: return "hessian";
        case DiffOp::DR: return "DR";
        case DiffOp::DR2: return "DR2";
    }
    return "?";
}

inline DiffOp parse_diff_op(std::string_view s) {
    if (s == "D") return DiffOp::D;
    if (s == "Dstar" || s == "D*") return DiffOp::Dstar;
    if (s == "hessian" || s == "Hessian" || s == "Delta") return DiffOp::Hessian;
    if (s == "DR" || s == "D_R") return DiffOp::DR;
    if (s == "DR2" || s == "D_R2") return DiffOp::DR2;
    fail(ErrorKind::invalid_input, "unknown derivative operator '" + std::string(s) + "'");
}

/// A series on the doubled alphabet: letters 0..d-1 are Z, letters d..2d-1
/// are H. Each stored word has `h_deg` unstarred and `hstar_deg` starred H
/// letters; the real operators only fix the total (`total_deg`).
struct DirectionalForm {
    int d = 0;
    int h_deg = 0;
    int hstar_deg = 0;
    int total_deg = 0;
    bool real = false;  // true: only the total H-degree is meaningful
    NCSeries series;

    static Letter h_letter(int d, Letter z) { return {z.var + d, z.starred}; }

    static DirectionalForm lift(const NCSeries& s) {
        DirectionalForm f;
        f.d = s.d();
        f.series = s.with_d(2 * s.d());
        return f;
    }

    /// Counts (H, H*) letters of a doubled-alphabet word.
    std::pair<int, int> h_degrees(const Word& w) const {
        int h = 0, hs = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const Letter l = w[i];
            if (l.var >= d) (l.starred ? hs : h) += 1;
        }
        return {h, hs};
    }

    bool homogeneous() const {
        for (const auto& [w, c] : series.terms()) {
            auto [h, hs] = h_degrees(w);
            if (real ? (h + hs != total_deg) : (h != h_deg || hs != hstar_deg)) return false;
        }
        return true;
    }
};

namespace detail {

/// Sum over ordered tuples of distinct positions `count` in {1,2}, where each chosen
/// Z-letter passes `pick` and is replaced by its H-letter.
inline NCSeries replace_letters(const NCSeries& s, int d, int count,
                                const std::function<bool(Letter, int)>& pick) {
    NCSeries out(s.d(), s.rows(), s.cols(), s.maxdeg());
    for (const auto& [w, c] : s.terms()) {
        const std::size_t L = w.size();
        for (std::size_t p = 0; p < L; ++p) {
            const Letter lp = w[p];
            if (lp.var >= d || !pick(lp, 0)) continue;
            Word w1 = w;
            w1.set(p, DirectionalForm::h_letter(d, lp));
            if (count == 1) {
                out.add_term(w1, c);
                continue;
            }
            for (std::size_t q = 0; q < L; ++q) {
                if (q == p) continue;
                const Letter lq = w[q];
                if (lq.var >= d || !pick(lq, 1)) continue;
                Word w2 = w1;
                w2.set(q, DirectionalForm::h_letter(d, lq));
                out.add_term(w2, c);
            }
        }
    }
    return out;
}

inline DirectionalForm apply(const DirectionalForm& f, int count, int dh, int dhs, bool real,
                             const std::function<bool(Letter, int)>& pick) {
    DirectionalForm out;
    out.d = f.d;
    out.h_deg = f.h_deg + dh;
    out.hstar_deg = f.hstar_deg + dhs;
    out.real = f.real || real;
    out.total_deg = f.total_deg + count;
    out.series = replace_letters(f.series, f.d, count, pick);
    return out;
}

}  // namespace detail

/// DZ_i[H] = H_i, DZ_i^*[H] = 0, with the product rule.
inline DirectionalForm derivative(const DirectionalForm& f) {
    return detail::apply(f, 1, 1, 0, false, [](Letter l, int) { return !l.starred; });
}
inline DirectionalForm conj_derivative(const DirectionalForm& f) {
    return detail::apply(f, 1, 0, 1, false, [](Letter l, int) { return l.starred; });
}
/// One unstarred letter to H and one starred letter to H^*.
inline DirectionalForm complex_hessian(const DirectionalForm& f) {
    return detail::apply(f, 2, 1, 1, false, [](Letter l, int slot) { return slot == 0 ? !l.starred : l.starred; });
}
inline DirectionalForm real_derivative(const DirectionalForm& f) {
    return detail::apply(f, 1, 0, 0, true, [](Letter, int) { return true; });
}
/// d^2/dt^2 f(Z + tH) at t = 0: ordered pairs of distinct letters.
inline DirectionalForm real_second_derivative(const DirectionalForm& f) {
    return detail::apply(f, 2, 0, 0, true, [](Letter, int) { return true; });
}

inline DirectionalForm derivative(const NCSeries& s) { return derivative(DirectionalForm::lift(s)); }
inline DirectionalForm conj_derivative(const NCSeries& s) { return conj_derivative(DirectionalForm::lift(s)); }
inline DirectionalForm complex_hessian(const NCSeries& s) { return complex_hessian(DirectionalForm::lift(s)); }
inline DirectionalForm real_derivative(const NCSeries& s) { return real_derivative(DirectionalForm::lift(s)); }
inline DirectionalForm real_second_derivative(const NCSeries& s) {
    return real_second_derivative(DirectionalForm::lift(s));
}

inline DirectionalForm symbolic_derivative(const NCSeries& s, DiffOp op) {
    switch (op) {
        case DiffOp::D: return derivative(s);
        case DiffOp::Dstar: return conj_derivative(s);
        case DiffOp::Hessian: return complex_hessian(s);
        case DiffOp::DR: return real_derivative(s);
        case DiffOp::DR2: return real_second_derivative(s);
    }
    fail(ErrorKind::invalid_input, "unknown operator");
}

inline MatrixTuple concat_tuples(const MatrixTuple& z, const MatrixTuple& h) {
    require(z.n == h.n && z.d() == h.d(), ErrorKind::dimension_mismatch,
            "point and direction must have the same shape");
    std::vector<Matrix> m = z.mats;
    m.insert(m.end(), h.mats.begin(), h.mats.end());
    return MatrixTuple(z.n, std::move(m));
}

inline Matrix eval_form(const DirectionalForm& f, const MatrixTuple& z, const MatrixTuple& h) {
    require(z.d() == f.d, ErrorKind::dimension_mismatch, "form and point disagree on d");
    return eval_series(f.series, concat_tuples(z, h));
}

// ---- finite differences ------------------------------------------------------------

struct FdOptions {
    double step = 1e-3;
    bool richardson = true;
};

using PointFunction = std::function<Matrix(const MatrixTuple&)>;

/// Central complex finite differences of z -> f(Z + zH) at z = 0.
inline Matrix fd_derivative(const PointFunction& f, const MatrixTuple& z, const MatrixTuple& h, DiffOp op,
                            const FdOptions& opt = {}) {
    auto at = [&](cd t) {
        try {
            return f(z + h * t);
        } catch (const Error& e) {
            fail(ErrorKind::evaluation_failure, std::string("inside the stencil: ") + e.what());
        }
    };
    const Matrix f0 = (op == DiffOp::Hessian || op == DiffOp::DR2) ? at(0.0) : Matrix();
    auto stencil = [&](double s) -> Matrix {
        const cd I(0.0, 1.0);
        switch (op) {
            case DiffOp::DR: return (at(s) - at(-s)) / (2 * s);
            case DiffOp::DR2: return (at(s) - 2.0 * f0 + at(-s)) / (s * s);
            case DiffOp::D:
            case DiffOp::Dstar: {
                const Matrix dx = (at(s) - at(-s)) / (2 * s);
                const Matrix dy = (at(I * s) - at(-I * s)) / (2 * s);
                return op == DiffOp::D ? Matrix(0.5 * (dx - I * dy)) : Matrix(0.5 * (dx + I * dy));
            }
            case DiffOp::Hessian:
                return (at(s) + at(-s) + at(I * s) + at(-I * s) - 4.0 * f0) / (4 * s * s);
        }
        fail(ErrorKind::invalid_input, "unknown operator");
    };
    const Matrix coarse = stencil(opt.step);
    if (!opt.richardson) return coarse;
    return (4.0 * stencil(opt.step / 2) - coarse) / 3.0;
}

inline Matrix fd_derivative(const NCSeries& s, const MatrixTuple& z, const MatrixTuple& h, DiffOp op,
                            const FdOptions& opt = {}) {
    return fd_derivative([&](const MatrixTuple& x) { return eval_series(s, x); }, z, h, op, opt);
}

inline Matrix fd_derivative(const Expr& e, const MatrixTuple& z, const MatrixTuple& h, DiffOp op,
                            const FdOptions& opt = {}) {
    const int k = coefficient_size(e);
    return fd_derivative([&](const MatrixTuple& x) { return eval_expr(e, x, k); }, z, h, op, opt);
}

// ---- sampling for negativity witnesses ------------------------------------------------

struct SamplerConfig {
    int samples = 200;
    double radius = 0.5;
    std::vector<int> sizes{1, 2, 3, 4};
    std::uint64_t seed = 1;
    int workers = 1;
    double tol = 1e-9;
};

struct PshSample {
    MatrixTuple z;
    MatrixTuple h;
};

struct PshWitness {
    std::size_t index = 0;
    MatrixTuple z;
    MatrixTuple h;
    double min_eig = 0.0;
    Vector vector;
};

/// Sample `index` of a run: Ginibre point with ||Z_i|| <= radius and a
/// Ginibre direction normalized to ||H_i|| <= 1.
inline PshSample draw_sample(int d, const SamplerConfig& cfg, std::size_t index) {
    Rng rng(derive_seed(cfg.seed, index));
    const auto& sizes = cfg.sizes;
    require(!sizes.empty(), ErrorKind::invalid_input, "sampler needs at least one size");
    const int n = sizes[std::uniform_int_distribution<std::size_t>(0, sizes.size() - 1)(rng)];
    PshSample s;
    s.z = random_tuple(d, n, rng, cfg.radius);
    s.h = random_tuple(d, n, rng, 1.0);
    return s;
}

inline std::optional<PshWitness> check_hessian_at(const DirectionalForm& hess, const MatrixTuple& z,
                                                  const MatrixTuple& h, double tol, std::size_t index) {
    const Matrix m = eval_form(hess, z, h);
    const Matrix herm = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    const double lo = es.eigenvalues()(0);
    const double scale = std::max(1.0, op_norm(herm));
    if (lo < -tol * scale) return PshWitness{index, z, h, lo, es.eigenvectors().col(0)};
    return std::nullopt;
}

/// Scans explicit (Z, H) pairs; returns the lowest-index negativity witness.
inline std::optional<PshWitness> psh_sample_test(const NCSeries& s, const std::vector<PshSample>& points,
                                                 double tol = 1e-9) {
    const DirectionalForm hess = complex_hessian(s);
    for (std::size_t i = 0; i < points.size(); ++i)
        if (auto w = check_hessian_at(hess, points[i].z, points[i].h, tol, i)) return w;
    return std::nullopt;
}

/// Random sampling. With several workers the samples are split by index and
/// the lowest-index witness wins, so the outcome does not depend on `workers`.
inline std::optional<PshWitness> psh_sample_test(const NCSeries& s, const SamplerConfig& cfg) {
    const DirectionalForm hess = complex_hessian(s);
    const std::size_t total = static_cast<std::size_t>(std::max(cfg.samples, 0));
    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < total; ++i) {
            const PshSample p = draw_sample(s.d(), cfg, i);
            if (auto w = check_hessian_at(hess, p.z, p.h, cfg.tol, i)) return w;
        }
        return std::nullopt;
    }
    std::vector<std::optional<PshWitness>> found(static_cast<std::size_t>(workers));
    std::atomic<std::size_t> best{total};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = static_cast<std::size_t>(t); i < total; i += static_cast<std::size_t>(workers)) {
                if (i >= best.load()) return;
                const PshSample p = draw_sample(s.d(), cfg, i);
                if (auto w = check_hessian_at(hess, p.z, p.h, cfg.tol, i)) {
                    found[static_cast<std::size_t>(t)] = std::move(w);
                    std::size_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    std::optional<PshWitness> out;
    for (auto& f : found)
        if (f && (!out || f->index < out->index)) out = std::move(f);
    return out;
}

// ---- pluriharmonic conjugates ---------------------------------------------------------

inline std::optional<Word> first_mixed_word(const NCSeries& u) {
    for (const auto& [w, c] : u.terms())
        if (!w.is_analytic() && !w.is_coanalytic()) return w;
    return std::nullopt;
}

/// Analytic f with Re f = u: f = c_0 + 2 sum_{alpha analytic, nonempty} c_alpha z^alpha.
inline NCSeries pluriharmonic_conjugate(const NCSeries& u, double tol = 1e-12) {
    require(u.square(), ErrorKind::dimension_mismatch, "pluriharmonic_conjugate needs square coefficients");
    double scale = 1.0;
    for (const auto& [w, c] : u.terms()) scale = std::max(scale, op_norm(c));
    const double asym = max_coeff_diff(u, series_adjoint(u));
    if (asym > tol * scale)
        fail(ErrorKind::precondition_violated,
             "series is not self-adjoint (deviation " + std::to_string(asym) + ")");
    if (auto w = first_mixed_word(u))
        fail(ErrorKind::not_pluriharmonic, "mixed word '" + format_word(*w) + "' has nonzero coefficient");
    NCSeries f(u.d(), u.rows(), u.cols(), u.maxdeg());
    for (const auto& [w, c] : u.terms()) {
        if (w.empty()) f.add_term(w, c);
        else if (w.is_analytic()) f.add_term(w, 2.0 * c);
    }
    return f;
}

}  // namespace ncfree
