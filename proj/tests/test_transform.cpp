#include <catch_amalgamated.hpp>

#include <ncfree/transform.hpp>

#include "support.hpp"

using namespace ncfree;

namespace {

NCSeries S(const char* text, int maxdeg) { return expand(*parse(text), maxdeg); }

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / (1.0 + b.norm()); }

Matrix M1(cd x) { return Matrix::Constant(1, 1, x); }

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

}  // namespace

TEST_CASE("schur contraction") {
    CHECK(schur_contraction(Matrix::Zero(3, 3)).norm() == 0.0);
    CHECK(schur_contraction(M1(0.4))(0, 0).real() == Catch::Approx(2.0 / 3.0));
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        const Matrix a = random_posreal(1 + t % 8, rng);
        CHECK(op_norm(schur_contraction(a)) < 1 - 1e-12);
    }
    try {
        schur_contraction(M1(0.5));
        FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::precondition_violated);
    }
}

TEST_CASE("ten identities") {
    Rng rng(2);
    SECTION("A = 0") {
        const Matrix c = random_ginibre(3, 2, rng), d = random_ginibre(3, 2, rng);
        auto rep = ten_identities(Matrix::Zero(3, 3), c, d);
        for (const auto& e : rep.values) CHECK((e - d.adjoint() * c).norm() < 1e-15);
    }
    SECTION("scalar") {
        auto rep = ten_identities(M1(0.3), M1(1.0), M1(1.0));
        for (const auto& e : rep.values) CHECK(std::abs(e(0, 0) - 2.5) < 1e-14);
    }
    SECTION("random") {
        for (int t = 0; t < 100; ++t) {
            const int m = 1 + t % 8;
            const Matrix a = random_posreal(m, rng);
            CHECK(verify_ten_identities(a, random_ginibre(m, 1 + t % 3, rng), random_ginibre(m, 2, rng)) < 1e-10);
        }
    }
}

TEST_CASE("restructure examples") {
    const int maxdeg = 6;
    SECTION("T = 0, v0 = 0") {
        AffineRealizationData a{S("x1 + 2 x1 x2", maxdeg), S("x2' - x1'", maxdeg), Matrix::Zero(1, 1), NCSeries(2, 1, maxdeg)};
        auto r = restructure(a);
        CHECK(r.T.is_zero());
        CHECK(max_coeff_diff(r.vplus, a.v_plus) == 0.0);
        CHECK(max_coeff_diff(r.vminus, a.v_minus) == 0.0);
        CHECK(max_coeff_diff(r.g, scalar_mul(2.0, series_adjoint(a.v_minus) * a.v_plus)) < 1e-15);
        Rng rng(4);
        auto z = random_tuple(2, 3, rng, 0.5);
        const Matrix x = eval_series(a.v_plus + a.v_minus, z);
        CHECK(rel(eval_realization(r, z), x.adjoint() * x) < 1e-12);
    }
    SECTION("v+ = v- = 0, v0 = 1, T = tZ") {
        const cd t(0.3, 0.1);
        AffineRealizationData a{NCSeries(1, 1, 30), NCSeries(1, 1, 30), Matrix::Identity(1, 1),
                                scalar_mul(t, S("x1", 30))};
        auto r = restructure(a);
        for (cd z : {cd(0.2, 0.1), cd(-0.3, 0.4), cd(0.0, -0.5)}) {
            const double expect = 1.0 / (1.0 - 2.0 * (t * z).real());
            CHECK(eval_realization(r, MatrixTuple(1, {M1(z)}))(0, 0).real() == Catch::Approx(expect).epsilon(1e-10));
        }
    }
    SECTION("zero data") {
        AffineRealizationData a{NCSeries(1, 2, 4), NCSeries(1, 2, 4), Matrix::Zero(2, 2), NCSeries(1, 2, 4)};
        auto r = restructure(a);
        CHECK(r.g.is_zero());
        CHECK(eval_realization(r, MatrixTuple(1, {M1(0.3)})).norm() == 0.0);
    }
}

TEST_CASE("pointwise restructure and recentering identities") {
    Rng rng(6);
    for (int t = 0; t < 30; ++t) {
        const int d = 1 + t % 2, m = 1 + t % 3, k = 1 + t % 2, n = 1 + t % 3;
        const auto a = random_affine(rng, d, m, k, 6, 0.3);
        const auto z = random_tuple(d, n, rng, 0.4);
        const AffineValues v = affine_values(a, z);
        CHECK(rel(restructured_form(v), affine_form(v)) < 1e-10);

        const auto w = random_tuple(d, n, rng, 0.3);
        const auto zz = random_tuple(d, n, rng, 0.2);
        const AffineValues moved = movecenter_values(a, w, zz);
        CHECK(rel(affine_form(moved), affine_eval(a, zz + w)) < 1e-10);
        // hatted data vanishes at 0
        const AffineValues at0 = movecenter_values(a, w, MatrixTuple::zero(d, n));
        CHECK(at0.T.norm() < 1e-14);
        CHECK((at0.vp + at0.vm).norm() < 1e-14);
    }
}

TEST_CASE("series recentering") {
    Rng rng(7);
    const auto a = random_affine(rng, 2, 2, 1, 8, 0.3);
    SECTION("w = 0 leaves the data unchanged") {
        auto b = movecenter(a, {0.0, 0.0});
        CHECK(max_coeff_diff(b.T, a.T) < 1e-15);
        CHECK(max_coeff_diff(b.v_plus, a.v_plus) < 1e-15);
        CHECK((b.v0 - a.v0).norm() < 1e-15);
    }
    SECTION("matches the shifted form") {
        const std::vector<cd> w{cd(0.1, 0.05), cd(-0.08, 0.02)};
        auto b = movecenter(a, w);
        for (int i = 0; i < 5; ++i) {
            auto z = random_tuple(2, 2, rng, 0.2);
            auto zw = z;
            for (int j = 0; j < 2; ++j) zw.mats[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(j)] * Matrix::Identity(2, 2);
            CHECK(rel(affine_eval(b, z), affine_eval(a, zw)) < 1e-10);
        }
        // and back again
        auto c = movecenter(b, {-w[0], -w[1]});
        auto z = random_tuple(2, 2, rng, 0.2);
        CHECK(rel(affine_eval(c, z), affine_eval(a, z)) < 1e-10);
    }
    SECTION("scalar d = 1 case") {
        const cd t(0.4, 0.0), w(0.1, -0.2);
        AffineRealizationData s{S("x1", 4), NCSeries(1, 1, 4), Matrix::Zero(1, 1), scalar_mul(t, S("x1", 4))};
        auto b = movecenter(s, {w});
        for (cd z : {cd(0.05, 0.0), cd(-0.1, 0.2)}) {
            const cd x = z + w;
            const double expect = std::norm(x) / (1.0 - 2.0 * (t * x).real());
            CHECK(affine_eval(b, MatrixTuple(1, {M1(z)}))(0, 0).real() == Catch::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("continuation") {
    SECTION("Z^* Z is continued exactly") {
        auto r = build_realization(S("x1' x1", 6), 3);
        for (cd w : {cd(0.0), cd(0.7, -0.2), cd(-3.0, 1.0)}) {
            auto c = continuation_step(r, std::vector<cd>{w}).next;
            CHECK(c.center[0] == w);
            Rng rng(1);
            for (int i = 0; i < 3; ++i) {
                auto p = random_tuple(1, 2, rng, 2.0);
                CHECK((eval_realization(c, p) - p[0].adjoint() * p[0]).norm() < 1e-12);
            }
        }
    }
    SECTION("w = 0") {
        Rng rng(11);
        auto m = testing::random_model(rng, 1, 1, 1, 1, 10);
        auto r = build_realization(real_part(realization_series(m, 10)), 3);
        auto c = continuation_step(r, std::vector<cd>{0.0}).next;
        auto ov = overlap_check(r, c, {0.0}, 10, 0.2, 5);
        CHECK(ov.compared == 10);
        CHECK(ov.max_deviation < 1e-10);
    }
    SECTION("two steps against one") {
        Rng rng(12);
        for (int t = 0; t < 3; ++t) {
            auto m = testing::random_model(rng, 1, 1, 1, 1, 16, 0.3);
            auto r = build_realization(real_part(realization_series(m, 16)), 4);
            const cd w1(0.04, 0.02), w2(-0.01, 0.03);
            auto one = continuation_step(r, std::vector<cd>{w1 + w2}).next;
            auto two = continuation_step(continuation_step(r, std::vector<cd>{w1}).next, std::vector<cd>{w2}).next;
            CHECK(std::abs(one.center[0] - two.center[0]) < 1e-15);
            auto ov = overlap_check(one, two, one.center, 10, 0.05, 9);
            CHECK(ov.compared > 0);
            CHECK(ov.max_deviation < 1e-7);
            auto ov0 = overlap_check(r, one, one.center, 10, 0.05, 10);
            CHECK(ov0.max_deviation < 1e-7);
        }
    }
    SECTION("leaving the validity region") {
        Rng rng(13);
        auto m = testing::random_model(rng, 1, 1, 1, 1, 8, 0.5);
        auto r = build_realization(real_part(realization_series(m, 8)), 3);
        auto v = segment_validity(r, {cd(100.0)});
        CHECK_FALSE(v.valid);
        CHECK(v.t_max > 0.0);
        CHECK(v.t_max < 1.0);
        try {
            continuation_step(r, std::vector<cd>{100.0});
            FAIL("expected PreconditionViolated");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::precondition_violated);
        }
    }
    SECTION("non-scalar centers are rejected") {
        auto r = build_realization(S("x1' x1", 4), 2);
        Matrix w(2, 2);
        w << 0.1, 0.2, 0, 0.1;
        try {
            continuation_step(r, MatrixTuple(2, {w}));
            FAIL("expected PreconditionViolated");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::precondition_violated);
        }
    }
}
