#include "doctest.h"

#include "lcsmech/expr.hpp"
#include "support.hpp"

using namespace lcsmech;
using namespace lcsmech::expr;

namespace {
const Chart kX({"x1", "x2", "x3", "x4"});
ScalarExpr P(const char* s) { return parse(s, kX, true); }
}  // namespace

TEST_CASE("parse basics") {
    CHECK(P("0").is_zero());
    const ScalarExpr v = P("x2");
    CHECK(v.is_monomial());
    CHECK(v.str() == "x2");
    CHECK_THROWS_AS(parse("p1*p1/(2*m)", Chart::cotangent(1), false), ParseError);
    CHECK_THROWS_AS(parse("x1 + t", kX, false), ParseError);
    CHECK_THROWS_AS(P("x1/x2"), ParseError);
    CHECK_THROWS_AS(P("x1 +"), ParseError);
    CHECK_THROWS_AS(P("x1/0"), ParseError);
    CHECK_THROWS_AS(P("foo(x1)"), ParseError);
}

TEST_CASE("parse error carries position") {
    try {
        P("x1 + y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 5);
    }
}

TEST_CASE("exact decimals and powers") {
    CHECK(*P("1e-3").constant_value() == Rational(1, 1000));
    CHECK(*P("0.25").constant_value() == Rational(1, 4));
    CHECK(identical(P("x1^-2"), P("x1^(-2)")));
    CHECK(identical(P("x1^-2 * x1^2"), ScalarExpr(1L)));
    CHECK(identical(P("(x1+x2)^2"), P("x1^2 + 2*x1*x2 + x2^2")));
    CHECK(identical(P("(x1+1)^(-1)*(x1+1)^(-1)"), P("(x1+1)^(-2)")));
}

TEST_CASE("differentiate") {
    CHECK(identical(differentiate(P("x1^2"), "x1"), P("2*x1")));
    CHECK(differentiate(P("x1"), "t").is_zero());
    CHECK(identical(differentiate(P("x2*x3 + sin(t)"), "x2"), P("x3")));
    CHECK(identical(differentiate(P("sin(x1*x2)"), "x1"), P("x2*cos(x1*x2)")));
    CHECK(identical(differentiate(P("exp(x1)"), "x1"), P("exp(x1)")));
    CHECK(identical(differentiate(P("(1+x1^2)^(-1)"), "x1"), P("-2*x1*(1+x1^2)^(-2)")));
    CHECK(expr_equal(differentiate(P("ln(1+x1^2)"), "x1"), P("2*x1*(1+x1^2)^(-1)")).equal);
}

TEST_CASE("evaluate") {
    const std::vector<double> x{0, 1, 2, 3};
    CHECK(evaluate(P("x2*x3"), kX, x) == doctest::Approx(2));
    CHECK(evaluate(P("exp(0)"), kX, x) == 1.0);
    CHECK(evaluate(P("sin(t)"), kX, x, 0.0) == 0.0);
    CHECK_THROWS_AS(evaluate(P("sin(t)"), kX, x), EvaluationError);
    CHECK_THROWS_AS(evaluate(P("ln(x1)"), kX, x), EvaluationError);
    CHECK(evaluate_exact(P("x1/3 + x2^2"), {{"x1", Rational(1)}, {"x2", Rational(1, 2)}}) == Rational(7, 12));
}

TEST_CASE("expr_equal paths") {
    auto v = expr_equal(P("x1*x2"), P("x2*x1"));
    CHECK(v.equal);
    CHECK(v.path == EqualityPath::exact);
    v = expr_equal(P("x1+x1"), P("2*x1"));
    CHECK(v.equal);
    CHECK(v.path == EqualityPath::exact);
    v = expr_equal(P("sin(t)^2 + cos(t)^2"), ScalarExpr(1L));
    CHECK(v.equal);
    CHECK(v.path == EqualityPath::sampled);
    CHECK(v.seed == kDefaultSeed);
    CHECK(v.samples == 32);
    CHECK_FALSE(expr_equal(P("sin(x1)"), P("cos(x1)")).equal);
    CHECK_FALSE(expr_equal(P("x1"), P("x2")).equal);
}

TEST_CASE("print round trip") {
    for (const char* s : {"3/2*x1^3 - x2*x4 + 7", "sin(x1*t)^2 - exp(-x2)", "(x1^2+1)^(-3)*x3 - ln(2+x4^2)",
                          "x1^(-2)*x2 - 1/7", "cos(sin(x1) + 1/2)"}) {
        const ScalarExpr e = P(s);
        const ScalarExpr back = P(e.str().c_str());
        CHECK_MESSAGE(identical(e, back), s, " -> ", e.str());
    }
}

TEST_CASE("properties on random polynomials") {
    Sampler rng(11);
    for (int k = 0; k < 40; ++k) {
        const ScalarExpr e1 = test::random_polynomial(kX, rng, 3, 5);
        const ScalarExpr e2 = test::random_polynomial(kX, rng, 3, 5);
        const Rational a(rng.integer(-5, 5)), b(rng.integer(1, 4), 3);
        for (const auto& v : kX.names()) {
            CHECK(expr_equal(differentiate(ScalarExpr(a) * e1 + ScalarExpr(b) * e2, v),
                             ScalarExpr(a) * differentiate(e1, v) + ScalarExpr(b) * differentiate(e2, v))
                      .equal);
        }
        CHECK(identical(differentiate(differentiate(e1, "x1"), "x3"), differentiate(differentiate(e1, "x3"), "x1")));
        CHECK(identical(P(e1.str().c_str()), e1));
    }
}
