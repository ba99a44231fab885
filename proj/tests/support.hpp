#pragma once
// Random inputs shared by the test binaries.

#include "lcsmech/exterior.hpp"
#include "lcsmech/sampling.hpp"

namespace lcsmech::test {

/// Sum of `terms` random monomials of total degree <= max_degree with small
/// integer coefficients.
inline expr::ScalarExpr random_polynomial(const Chart& chart, Sampler& rng, int max_degree, int terms,
                                          bool with_time = false) {
    std::vector<std::string> vars = chart.names();
    if (with_time) vars.emplace_back(kTimeSymbol);
    expr::ScalarExpr out;
    for (int k = 0; k < terms; ++k) {
        expr::ScalarExpr m(rng.integer(-3, 3));
        const long deg = rng.integer(0, max_degree);
        for (long d = 0; d < deg; ++d)
            m *= expr::ScalarExpr::variable(vars[static_cast<std::size_t>(rng.integer(0, static_cast<long>(vars.size()) - 1))]);
        out += m;
    }
    return out;
}

/// Random form of the given degree with polynomial coefficients.
inline forms::DifferentialForm random_form(const Chart& chart, Sampler& rng, int degree, int max_degree = 2) {
    forms::DifferentialForm a(chart, degree);
    const int n = chart.dim();
    for (int k = 0; k < 3; ++k) {
        forms::IndexTuple idx;
        for (int j = 0; j < degree; ++j) idx.push_back(static_cast<int>(rng.integer(0, n - 1)));
        a.add_term(idx, random_polynomial(chart, rng, max_degree, 3));
    }
    return a;
}

inline forms::VectorFieldExpr random_field(const Chart& chart, Sampler& rng, int max_degree = 2) {
    std::vector<expr::ScalarExpr> c;
    for (int i = 0; i < chart.dim(); ++i) c.push_back(random_polynomial(chart, rng, max_degree, 3));
    return {chart, std::move(c)};
}

}  // namespace lcsmech::test
