#include <catch_amalgamated.hpp>

#include <ncfree/ncfree.hpp>

#include "support.hpp"

using namespace ncfree;

TEST_CASE("complex and matrix round trips") {
    CHECK(complex_from_json(json::parse("[1.5, -2]")) == cd(1.5, -2));
    CHECK(complex_from_json(json::parse("3")) == cd(3));
    CHECK(complex_from_json(json("2 - 1i")) == cd(2, -1));
    Rng rng(1);
    const Matrix m = random_ginibre(3, 2, rng);
    CHECK(matrix_from_json(json::parse(to_json(m).dump())) == m);
    CHECK(matrix_from_json(json::parse("[[1, [0, 1]], [2, 3]]"))(0, 1) == cd(0, 1));
    CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]")), Error);
}

TEST_CASE("series round trip and the expr shorthand") {
    auto s = expand(*parse("x1' x1 + (2 - i) x2 x1'"), 4);
    auto back = series_from_json(json::parse(to_json(s).dump()));
    CHECK(exactly_equal(s, back));
    auto e = series_from_json(json::parse(R"({"expr": "x1' x1", "maxdeg": 4, "d": 2})"));
    CHECK(e.d() == 2);
    CHECK(e.coeff(parse_word("z1* z1"))(0, 0) == cd(1));
    CHECK_THROWS_AS(series_from_json(json::parse(R"({"d": 1, "maxdeg": 2, "terms": [{"word": "z2", "coeff": 1}]})")),
                    Error);
}

TEST_CASE("realization round trip") {
    Rng rng(2);
    auto s = testing::random_psh_series(rng, 2, 1, 8);
    auto r = build_realization(s, 3);
    auto back = realization_from_json(json::parse(to_json(r).dump()));
    CHECK(back.gns.has_value());
    CHECK((back.gns->plus.gram - r.gns->plus.gram).norm() == 0.0);
    auto z = random_tuple(2, 2, rng, 0.1);
    CHECK((eval_realization(back, z) - eval_realization(r, z)).norm() == 0.0);
    CHECK(to_json(back).dump() == to_json(r).dump());
}

TEST_CASE("paths") {
    auto p = path_from_json(json::parse(R"({"steps": [{"w": [[0.1, 0]], "tol": 1e-6}, [[0, 0.2]],
        {"W": [[[0.5, 0], [0, 0.5]]]}]})"));
    REQUIRE(p.size() == 3);
    CHECK(p[0].tol.value() == 1e-6);
    CHECK(p[1].w[0] == cd(0, 0.2));
    CHECK(p[2].w[0] == cd(0.5));
    CHECK_THROWS_AS(path_from_json(json::parse(R"({"steps": [{"W": [[[0.5, 1], [0, 0.5]]]}]})")), Error);
}
