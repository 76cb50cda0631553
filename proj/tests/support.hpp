#pragma once
// Seeded generators shared by the unit and acceptance suites.

#include <ncfree/expr.hpp>
#include <ncfree/realization.hpp>

namespace ncfree::testing {

inline NCSeries random_analytic_poly(Rng& rng, int d, int k, int min_deg, int max_deg, int maxdeg,
                                     double density = 0.7, double scale = 1.0) {
    std::uniform_real_distribution<double> u(0, 1);
    NCSeries s(d, k, maxdeg);
    for (int L = min_deg; L <= max_deg; ++L)
        for (const auto& w : words_of_length(d, L, true, false))
            if (u(rng) < density) s.add_term(w, scale * random_ginibre(k, rng));
    if (s.is_zero()) s.add_term(Word::letter(0), scale * random_ginibre(k, rng));
    return s;
}

/// sum h_i h_i^* + sum g_i^* g_i with analytic h_i, g_i of degree <= deg.
inline NCSeries random_hereditary(Rng& rng, int d, int k, int deg, int maxdeg, int terms = 2) {
    NCSeries f(d, k, maxdeg);
    for (int i = 0; i < terms; ++i) {
        auto h = random_analytic_poly(rng, d, k, 0, deg, maxdeg);
        auto g = random_analytic_poly(rng, d, k, 0, deg, maxdeg);
        f = f + h * series_adjoint(h) + series_adjoint(g) * g;
    }
    return f;
}

/// Random model realization with T linear and small, v+ / v- of degree <= 2,
/// and a pluriharmonic part Re g; returns the model itself.
inline Realization random_model(Rng& rng, int d, int k, int dim_plus, int dim_minus, int maxdeg,
                                double t_scale = 0.3) {
    Realization m;
    m.d = d;
    m.k = k;
    m.N = maxdeg;
    m.maxdeg = maxdeg;
    m.center.assign(static_cast<std::size_t>(d), 0.0);
    m.vplus = NCSeries(d, dim_plus, k, maxdeg);
    m.vminus = NCSeries(d, dim_minus, k, maxdeg);
    m.T = NCSeries(d, dim_plus, dim_minus, maxdeg);
    for (int i = 0; i < d; ++i) {
        m.vplus.add_term(Word::letter(i), random_ginibre(dim_plus, k, rng));
        m.vminus.add_term(Word::letter(i, true), random_ginibre(dim_minus, k, rng));
        m.T.add_term(Word::letter(i), random_contraction(std::max(dim_plus, dim_minus), rng, t_scale)
                                          .topLeftCorner(dim_plus, dim_minus));
    }
    m.vplus.add_term(Word{Letter{0, false}, Letter{d - 1, false}}, 0.5 * random_ginibre(dim_plus, k, rng));
    m.vminus.add_term(Word{Letter{d - 1, true}, Letter{0, true}}, 0.5 * random_ginibre(dim_minus, k, rng));
    Matrix c0 = random_ginibre(k, rng);
    m.g = NCSeries::constant(d, (c0 + c0.adjoint()).eval(), maxdeg);
    m.g = m.g + random_analytic_poly(rng, d, k, 1, 2, maxdeg, 0.5);
    return m;
}

/// Series of a random model: plurisubharmonic near 0 by construction.
inline NCSeries random_psh_series(Rng& rng, int d, int k, int maxdeg) {
    std::uniform_int_distribution<int> dim(1, 2);
    const Realization m = random_model(rng, d, k, dim(rng), dim(rng), maxdeg);
    NCSeries s = realization_series(m, maxdeg);
    // exact self-adjointness: average with the adjoint
    return real_part(s);
}


/// Random analytic expression (no adjoints) built from variables, small
/// constants, sums, products, squares, inverses of 1 - (.)/4 and exponentials.
inline ExprPtr random_analytic_expr(Rng& rng, int d, int depth, int k = 1) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_int_distribution<int> var(0, d - 1);
    auto coeff = [&]() -> ExprPtr {
        if (k == 1) return ex::constant(0.5 * complex_normal(rng));
        return ex::constant(Matrix(0.5 * random_ginibre(k, rng)));
    };
    switch (pick(rng)) {
        case 0: return ex::var(var(rng));
        case 1: return ex::add(ex::var(var(rng)), coeff());
        case 2: return ex::add(random_analytic_expr(rng, d, depth - 1, k), random_analytic_expr(rng, d, depth - 1, k));
        case 3: return ex::mul(random_analytic_expr(rng, d, depth - 1, k), random_analytic_expr(rng, d, depth - 1, k));
        case 4: return ex::pow(random_analytic_expr(rng, d, depth - 1, k), 2);
        case 5:
            return ex::inv(ex::sub(ex::constant(1.0), ex::scale(0.25, random_analytic_expr(rng, d, depth - 1, k))));
        default: return ex::exp(ex::scale(0.5, random_analytic_expr(rng, d, depth - 1, k)));
    }
}

}  // namespace ncfree::testing
