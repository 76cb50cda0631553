// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Runtime limits count toward the verdict.

#include <ncfree/ncfree.hpp>

#include "../support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

using namespace ncfree;

namespace {

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / (1.0 + b.norm()); }

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.ok && secs < limit_s;
    if (!ok) ++failures;
    std::printf("%s %2d %s | %s | %.2fs (limit %gs)\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
                limit_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

// terms with coefficient 1 on the doubled alphabet
NCSeries unit_terms(int letters, std::initializer_list<const char*> words, int maxdeg) {
    NCSeries s(letters, 1, maxdeg);
    for (const char* w : words) s.add_term(parse_word(w), 1.0);
    return s;
}

bool same_terms(const NCSeries& a, const NCSeries& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [w, c] : a.terms())
        if (!b.has(w) || b.coeff(w) != c) return false;
    return true;
}

NCSeries random_poly(Rng& rng, int d, int deg) {
    std::uniform_real_distribution<double> u(0, 1);
    NCSeries s(d, 1, deg);
    for (int L = 0; L <= deg; ++L)
        for (const auto& w : words_of_length(d, L, true, true))
            if (u(rng) < 0.3) s.add_term(w, complex_normal(rng));
    if (s.is_zero()) s.add_term(Word::letter(0), 1.0);
    return s;
}

AffineRealizationData random_affine(Rng& rng, int d, int m, int k, int maxdeg, double t_scale) {
    AffineRealizationData a;
    a.v_plus = NCSeries(d, m, k, maxdeg);
    a.v_minus = NCSeries(d, m, k, maxdeg);
    a.T = NCSeries(d, m, m, maxdeg);
    a.v0 = random_ginibre(m, k, rng);
    for (int i = 0; i < d; ++i) {
        a.v_plus.add_term(Word::letter(i), random_ginibre(m, k, rng));
        a.v_minus.add_term(Word::letter(i, true), random_ginibre(m, k, rng));
        a.T.add_term(Word::letter(i), random_contraction(m, rng, t_scale));
    }
    a.T.add_term(Word{Letter{0, false}, Letter{d - 1, false}}, random_contraction(m, rng, t_scale / 2));
    a.v_plus.add_term(Word{Letter{d - 1, false}, Letter{0, false}}, 0.5 * random_ginibre(m, k, rng));
    return a;
}

MatrixTuple shifted(const MatrixTuple& z, const MatrixTuple& w) {
    MatrixTuple out = z;
    for (std::size_t i = 0; i < out.mats.size(); ++i) out.mats[i] += w.mats[i];
    return out;
}

const std::vector<DiffOp> all_ops{DiffOp::D, DiffOp::Dstar, DiffOp::Hessian, DiffOp::DR, DiffOp::DR2};

// ---- criteria ----------------------------------------------------------------------

Outcome log_abs_hessian() {
    // log|Z| = log(Z^* Z)/2 around Z = 1 + W, evaluated at W = 0
    const ExprPtr e = parse("log(1 + x1 + x1' + x1' x1) / 2");
    const NCSeries s = expand(*e, 4);
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = 1.0;
    const MatrixTuple w0 = MatrixTuple::zero(1, 2), dir(2, {h});
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = -0.25;
    expect(1, 1) = 0.25;
    const double sym = (eval_form(complex_hessian(s), w0, dir) - expect).norm();
    const double fd = (fd_derivative(*e, w0, dir, DiffOp::Hessian) - expect).norm();
    return {sym <= 1e-8 && fd <= 1e-5, fmt("symbolic dev %.1e, fd dev %.1e", sym, fd)};
}

Outcome worked_example_derivatives() {
    const NCSeries f = expand(*parse("x1 + x1' + x2 x2' x1 + x2' x2 x1'"), 6);
    // doubled alphabet: z1 z2 are Z, z3 z4 are H
    const bool d = same_terms(derivative(f).series, unit_terms(4, {"z3", "z4 z2* z1", "z2 z2* z3", "z2* z4 z1*"}, 8));
    const bool ds =
        same_terms(conj_derivative(f).series, unit_terms(4, {"z3*", "z4* z2 z1*", "z2* z2 z3*", "z2 z4* z1"}, 8));
    const bool hs =
        same_terms(complex_hessian(f).series, unit_terms(4, {"z4 z4* z1", "z2 z4* z3", "z4* z4 z1*", "z2* z4 z3*"}, 8));
    return {d && ds && hs, std::string("D ") + (d ? "exact" : "differs") + ", D* " + (ds ? "exact" : "differs") +
                               ", hessian " + (hs ? "exact" : "differs")};
}

Outcome derivative_cross_validation() {
    Rng rng(301);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = 1 + t % 3, n = 1 + (t / 3) % 4, deg = 1 + t % 4;
        const NCSeries s = random_poly(rng, d, deg);
        const MatrixTuple z = random_tuple(d, n, rng), h = random_tuple(d, n, rng);
        for (DiffOp op : all_ops) {
            const Matrix a = eval_form(symbolic_derivative(s, op), z, h);
            const Matrix b = fd_derivative(s, z, h, op);
            const double dev = a.norm() > 0 ? (a - b).norm() / a.norm() : b.norm();
            worst = std::max(worst, dev);
        }
    }
    return {worst <= 1e-6, fmt("100 series x 5 operators, max relative dev %.1e", worst)};
}

Outcome middle_matrix_soundness() {
    Rng rng(401);
    double min_eig = 1.0;
    for (int t = 0; t < 50; ++t) {
        const int d = 1 + t % 2, k = 1 + (t / 2) % 2;
        const NCSeries s = testing::random_hereditary(rng, d, k, 2, 6);
        const CertificateReport c = psh_certificate(s, 3, 1e-9);
        min_eig = std::min({min_eig, c.cplus.min_eigenvalue, c.cminus.min_eigenvalue});
    }
    const bool psd_ok = min_eig >= -1e-9;

    // perturbations: hereditary data minus a multiple of a hereditary square of
    // a linear analytic l (or antihereditary); kept only if the sampler flags them
    int flagged = 0, candidates = 0, certified = 0, confirmed = 0;
    SamplerConfig sc;
    sc.samples = 100;
    sc.sizes = {1, 2, 3};
    while (flagged < 50 && candidates < 1000) {
        ++candidates;
        const int d = 1 + candidates % 2;
        NCSeries s = testing::random_hereditary(rng, d, 1, 2, 8, 1);
        const NCSeries l = testing::random_analytic_poly(rng, d, 1, 1, 1, 8);
        const double a = 2.0 + 2.0 * std::uniform_real_distribution<double>(0, 1)(rng);
        s = s - scalar_mul(a, candidates % 3 == 0 ? series_adjoint(l) * l : l * series_adjoint(l));
        sc.seed = derive_seed(402, static_cast<std::uint64_t>(candidates));
        if (!psh_sample_test(s, sc)) continue;
        ++flagged;
        for (int N = 1; N <= 4; ++N) {
            const CertificateReport c = psh_certificate(s, N, 1e-9);
            if (c.psd()) continue;
            ++certified;
            const WitnessConfirmation conf = confirm_witness(s, *c.witness, 1e-9);
            if (conf.confirmed) {
                const WitnessPoint pt = witness_point(s.d(), *c.witness, conf.eps);
                if (psh_sample_test(s, std::vector<PshSample>{pt.sample}, 1e-9)) ++confirmed;
            }
            break;
        }
    }
    const bool ok = psd_ok && flagged == 50 && certified == 50 && confirmed == 50;
    return {ok, fmt("PSD min eig %.1e; flagged %g of %g candidates, ", min_eig, flagged, candidates) +
                    fmt("NotPSD %g, witness confirmed %g", certified, confirmed)};
}

struct RealizationSuite {
    std::vector<NCSeries> series;
    std::vector<Realization> reals;
};

RealizationSuite& realization_suite() {
    static RealizationSuite suite;
    if (suite.series.empty()) {
        Rng rng(501);
        for (int t = 0; t < 25; ++t) {
            const int d = 1 + t % 2, k = 1 + (t / 2) % 2;
            suite.series.push_back(testing::random_psh_series(rng, d, k, 9));
            suite.reals.push_back(build_realization(suite.series.back(), 3));
        }
    }
    return suite;
}

Outcome realization_reconstruction() {
    const RealizationSuite& s = realization_suite();
    Rng rng(502);
    double coeff = 0.0, eval = 0.0;
    for (std::size_t i = 0; i < s.series.size(); ++i) {
        const Realization& r = s.reals[i];
        for (int L = 0; L <= 3; ++L)
            for (const auto& b : words_of_length(r.d, L, true, true))
                coeff = std::max(coeff, rel(reconstruct_coefficient(r, b), s.series[i].coeff(b)));
        for (int p = 0; p < 20; ++p) {
            const MatrixTuple z = random_tuple(r.d, 1 + p % 3, rng, 0.1);
            eval = std::max(eval, rel(eval_realization(r, z), eval_series(s.series[i], z)));
        }
    }
    return {coeff <= 1e-8 && eval <= 1e-6, fmt("25 series, coefficient dev %.1e, eval dev %.1e", coeff, eval)};
}

Outcome realization_hessian_check() {
    const RealizationSuite& s = realization_suite();
    Rng rng(601);
    double min_eig = std::numeric_limits<double>::infinity(), dev = 0.0;
    for (const Realization& r : s.reals)
        for (int p = 0; p < 20; ++p) {
            const MatrixTuple z = random_tuple(r.d, 1 + p % 3, rng, 0.1);
            const MatrixTuple h = random_tuple(r.d, z.n, rng);
            const Matrix hs = realization_hessian(r, z, h);
            const Matrix fd =
                fd_derivative([&](const MatrixTuple& x) { return eval_realization(r, x); }, z, h, DiffOp::Hessian);
            min_eig = std::min(min_eig, min_hermitian_eig(hs));
            dev = std::max(dev, rel(hs, fd));
        }
    return {min_eig >= -1e-8 && dev <= 1e-5, fmt("min eig %.1e, fd dev %.1e", min_eig, dev)};
}

Outcome ten_identities_check() {
    Rng rng(701);
    double worst = 0.0, contraction = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int m = 1 + t % 8;
        const Matrix a = random_posreal(m, rng);
        worst = std::max(worst, verify_ten_identities(a, random_ginibre(m, 1 + t % 3, rng), random_ginibre(m, 1 + t % 2, rng)));
        contraction = std::max(contraction, op_norm(a * checked_inverse(Matrix::Identity(m, m) - a)));
    }
    return {worst < 1e-10 && contraction < 1.0,
            fmt("1000 instances, max relative dev %.1e, max ||A(1-A)^-1|| %.6f", worst, contraction)};
}

Outcome recentering_restructuring() {
    Rng rng(801);
    double pointwise = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = 1 + t % 2, m = 1 + t % 3, k = 1 + t % 2, n = 1 + t % 3;
        const auto a = random_affine(rng, d, m, k, 6, 0.3);
        const MatrixTuple z = random_tuple(d, n, rng, 0.4);
        pointwise = std::max(pointwise, rel(restructured_form(affine_values(a, z)), affine_form(affine_values(a, z))));
        const MatrixTuple w = random_tuple(d, n, rng, 0.3), zz = random_tuple(d, n, rng, 0.2);
        pointwise = std::max(pointwise, rel(affine_form(movecenter_values(a, w, zz)), affine_eval(a, shifted(zz, w))));
    }
    // path independence: two steps against one, and there and back
    double path = 0.0;
    int compared = 0;
    for (int t = 0; t < 3; ++t) {
        const Realization model = testing::random_model(rng, 1, 1, 1, 1, 16, 0.3);
        const Realization r = build_realization(real_part(realization_series(model, 16)), 4);
        const cd w1(0.04, 0.02), w2(-0.01, 0.03);
        const Realization one = continuation_step(r, std::vector<cd>{w1 + w2}).next;
        const Realization two = continuation_step(continuation_step(r, std::vector<cd>{w1}).next, std::vector<cd>{w2}).next;
        const OverlapReport ov = overlap_check(one, two, one.center, 10, 0.05, derive_seed(802, t));
        const Realization back = continuation_step(one, std::vector<cd>{-(w1 + w2)}).next;
        const OverlapReport rt = overlap_check(r, back, r.center, 10, 0.05, derive_seed(803, t));
        path = std::max({path, ov.max_deviation, rt.max_deviation});
        compared += ov.compared + rt.compared;
    }
    return {pointwise <= 1e-8 && path <= 1e-7 && compared > 0,
            fmt("pointwise dev %.1e on 100, path dev %.1e over %g overlap points", pointwise, path, compared)};
}

Outcome log_radius() {
    const LogRadiusReport r = log_radius_experiment(200);
    const bool ok = std::abs(r.root_test - 0.5) <= 0.02 && r.max_trace <= 1e-12 && r.trace_exactly_zero;
    return {ok, fmt("root test %.4f over [%g, %g], max |trace| %.1e", r.root_test, r.window_lo, r.window_hi,
                    r.max_trace)};
}

Outcome bch() {
    const NCSeries b = bch_series(12);
    NCSeries half(2, 1, 12);
    half.add_term(parse_word("z1 z2"), 0.5);
    half.add_term(parse_word("z2 z1"), -0.5);
    const bool deg2 = exactly_equal(degree_filter(b, 2, 2), half);
    double dev = 0.0;
    for (const auto& s : bch_numeric_check(b, 20, 0.3466, 1001)) dev = std::max(dev, s.deviation);
    const MartinShamovichReport ms = martin_shamovich_check(12, 200, 1e-10);
    const bool ok = deg2 && dev <= 1e-4 && ms.matched_through == 12 && ms.max_coeff_deviation <= 1e-10;
    return {ok, std::string("degree 2 ") + (deg2 ? "exact" : "differs") +
                    fmt("; numeric dev %.1e; substitution dev %.1e, matched through %g", dev, ms.max_coeff_deviation,
                        ms.matched_through)};
}

Outcome triangular() {
    Rng rng(1101);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int d = 1 + t % 2, k = 1 + t % 2, n = 1 + t % 3;
        const ExprPtr e = testing::random_analytic_expr(rng, d, 3, k);
        const MatrixTuple x = random_tuple(d, n, rng, 0.3), y = random_tuple(d, n, rng, 0.3);
        const cd c = complex_normal(rng);
        worst = std::max(worst, triangular_continuation_check(*e, x, y, c).deviation);
    }
    return {worst <= 1e-9, fmt("50 expressions, max dev %.1e", worst)};
}

Outcome free_axioms() {
    Rng rng(1201);
    double ds = 0.0, uc = 0.0, sim = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = 1 + t % 3, k = 1 + t % 2, n1 = 1 + t % 3, n2 = 1 + (t / 3) % 3;
        NCSeries s(d, k, 3);
        for (int L = 0; L <= 3; ++L)
            for (const auto& w : words_of_length(d, L, true, true)) s.add_term(w, random_ginibre(k, rng));
        const MatrixTuple x = random_tuple(d, n1, rng), y = random_tuple(d, n2, rng);
        const Matrix fx = eval_series(s, x);
        ds = std::max(ds, rel(eval_series(s, direct_sum(x, y)), direct_sum(fx, eval_series(s, y))));

        const Matrix u = random_unitary(n1, rng);
        const Matrix uk = kron(u, Matrix::Identity(k, k));
        uc = std::max(uc, rel(eval_series(s, unitary_conjugate(x, u)), uk.adjoint() * fx * uk));

        // similarity S X S^-1 on the analytic part
        const NCSeries a = analytic_part(s);
        const Matrix sm = Matrix::Identity(n1, n1) + 0.3 * random_ginibre(n1, rng);
        const Matrix si = checked_inverse(sm);
        MatrixTuple xs = x;
        for (auto& m : xs.mats) m = sm * m * si;
        const Matrix sk = kron(sm, Matrix::Identity(k, k)), sik = kron(si, Matrix::Identity(k, k));
        sim = std::max(sim, rel(eval_series(a, xs), sk * eval_series(a, x) * sik));
    }
    return {ds <= 1e-10 && uc <= 1e-10 && sim <= 1e-10,
            fmt("direct sum %.1e, unitary %.1e, similarity %.1e", ds, uc, sim)};
}

}  // namespace

int main() {
    run(1, "log|Z| Hessian at the identity", 1, log_abs_hessian);
    run(2, "worked example derivatives", 1, worked_example_derivatives);
    run(3, "derivative cross-validation", 30, derivative_cross_validation);
    run(4, "middle-matrix soundness", 120, middle_matrix_soundness);
    run(5, "realization reconstruction", 120, realization_reconstruction);
    run(6, "realization Hessian", 120, realization_hessian_check);
    run(7, "ten identities and contraction", 30, ten_identities_check);
    run(8, "recentering, restructuring, path independence", 60, recentering_restructuring);
    run(9, "log radius", 10, log_radius);
    run(10, "BCH and substitution", 60, bch);
    run(11, "triangular continuation identity", 30, triangular);
    run(12, "free-function axioms", 30, free_axioms);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
