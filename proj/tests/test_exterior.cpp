#include "doctest.h"

#include "lcsmech/exterior.hpp"
#include "support.hpp"

using namespace lcsmech;
using namespace lcsmech::forms;
using expr::ScalarExpr;

namespace {
const Chart kX({"x1", "x2", "x3", "x4"});
ScalarExpr P(const char* s) { return expr::parse(s, kX, true); }
DifferentialForm dx(int i) { return DifferentialForm::basis(kX, i - 1); }
bool same(const DifferentialForm& a, const DifferentialForm& b) { return form_equal(a, b).equal; }
}  // namespace

TEST_CASE("wedge signs") {
    CHECK(wedge(dx(1), dx(1)).is_zero());
    CHECK(same(wedge(dx(3), dx(1)), -wedge(dx(1), dx(3))));
    const auto a = dx(1) - P("x2") * dx(4);
    CHECK(same(wedge(a, dx(3)), wedge(dx(1), dx(3)) - P("x2") * wedge(dx(4), dx(3))));
    CHECK(wedge(wedge(dx(1), dx(2)), wedge(dx(3), wedge(dx(4), dx(1)))).is_zero());
}

TEST_CASE("exterior derivative") {
    CHECK(exterior_derivative(DifferentialForm::function(kX, P("7/3"))).is_zero());
    CHECK(same(exterior_derivative(P("x2") * wedge(dx(4), dx(3))), wedge(dx(2), wedge(dx(4), dx(3)))));
    CHECK(same(exterior_derivative(dx(1) - P("x2") * dx(4)), -wedge(dx(2), dx(4))));
}

TEST_CASE("ldr differential") {
    const auto a = P("x1*x3") * dx(2);
    CHECK(same(ldr_differential(a, DifferentialForm::zero(kX, 1)), exterior_derivative(a)));
    const auto theta = dx(3) + P("x4") * dx(4);  // closed
    const auto f = DifferentialForm::function(kX, P("x1^2*x3 - sin(x2)"));
    CHECK(same(ldr_differential(ldr_differential(f, theta), theta), DifferentialForm::zero(kX, 2)));
    const auto omega1 = -wedge(dx(2), dx(4)) + wedge(dx(1), dx(3)) - P("x2") * wedge(dx(4), dx(3));
    CHECK(ldr_differential(omega1, dx(3)).is_zero());
    CHECK_THROWS(ldr_differential(a, omega1));
}

TEST_CASE("interior product") {
    const auto e1 = VectorFieldExpr::basis(kX, 0), e2 = VectorFieldExpr::basis(kX, 1);
    CHECK(same(interior_product(e1, wedge(dx(1), dx(3))), dx(3)));
    CHECK(interior_product(e2, wedge(dx(1), dx(3))).is_zero());
    CHECK_THROWS(interior_product(e1, DifferentialForm::function(kX, P("x1"))));
    const Chart c = Chart::cotangent(1);
    const VectorFieldExpr z(c, {ScalarExpr::variable("q1") * 2, ScalarExpr::variable("p1") + 1});
    const auto dq = DifferentialForm::basis(c, 0), dp = DifferentialForm::basis(c, 1);
    CHECK(form_equal(interior_product(z, wedge(dq, dp)), z[0] * dp - z[1] * dq).equal);
}

TEST_CASE("pullback") {
    Sampler rng(5);
    const auto a = test::random_form(kX, rng, 2);
    CHECK(same(pullback(ChartMap::identity(kX), a), a));

    // Section of T*R^2: gamma*(dp_i) = d(gamma_i).
    const Chart c = Chart::cotangent(2), base = Chart::cotangent_base(2);
    const ScalarExpr g1 = expr::parse("q1^2*q2", base, false), g2 = expr::parse("q2 - q1^3", base, false);
    const ChartMap sec(base, c, {ScalarExpr::variable("q1"), ScalarExpr::variable("q2"), g1, g2});
    const auto pulled = pullback(sec, DifferentialForm::basis(c, 2));
    CHECK(form_equal(pulled, DifferentialForm::one_form(base, {expr::differentiate(g1, "q1"),
                                                             expr::differentiate(g1, "q2")}))
              .equal);
}

TEST_CASE("form matrix") {
    const Chart c = Chart::cotangent(1);
    const auto m = form_matrix_at(wedge(DifferentialForm::basis(c, 0), DifferentialForm::basis(c, 1)),
                                  std::vector<double>{0.3, -1.0});
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == -1.0);
    CHECK(m(0, 0) == 0.0);
    const auto omega1 = -wedge(dx(2), dx(4)) + wedge(dx(1), dx(3)) - P("x2") * wedge(dx(4), dx(3));
    const auto m0 = form_matrix_at(omega1, std::vector<double>{0, 0, 0, 0});
    Eigen::Matrix4d expect;
    expect << 0, 0, 1, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0;
    CHECK((m0 - expect).norm() == 0.0);
    Sampler rng(2);
    for (int k = 0; k < 10; ++k) {
        const auto w = test::random_form(kX, rng, 2);
        const auto mk = form_matrix_at(w, rng.point(4));
        CHECK((mk + mk.transpose()).norm() == 0.0);
    }
}

TEST_CASE("exterior calculus identities on random forms") {
    Sampler rng(31);
    const auto theta = exterior_derivative(DifferentialForm::function(kX, test::random_polynomial(kX, rng, 3, 4)));
    for (int trial = 0; trial < 12; ++trial) {
        for (int k = 0; k <= 2; ++k) {
            const auto a = test::random_form(kX, rng, k);
            CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
            CHECK(ldr_differential(ldr_differential(a, theta), theta).is_zero());
            const auto b = test::random_form(kX, rng, 1);
            const ScalarExpr sign(k % 2 == 0 ? 1L : -1L);
            CHECK(same(exterior_derivative(wedge(a, b)),
                       wedge(exterior_derivative(a), b) + sign * wedge(a, exterior_derivative(b))));
            if (k >= 1) {
                const auto x = test::random_field(kX, rng);
                CHECK(same(interior_product(x, wedge(a, b)),
                           wedge(interior_product(x, a), b) + sign * wedge(a, interior_product(x, b))));
            }
        }
        std::vector<ScalarExpr> comps;
        for (int i = 0; i < 4; ++i) comps.push_back(test::random_polynomial(kX, rng, 2, 2));
        const ChartMap phi(kX, kX, comps);
        const auto a = test::random_form(kX, rng, 1);
        CHECK(same(pullback(phi, exterior_derivative(a)), exterior_derivative(pullback(phi, a))));
    }
}

TEST_CASE("lie derivative and bracket") {
    Sampler rng(8);
    for (int k = 0; k < 6; ++k) {
        const auto x = test::random_field(kX, rng), y = test::random_field(kX, rng);
        const auto a = test::random_form(kX, rng, 1);
        // L_X ι_Y - ι_Y L_X = ι_[X,Y]
        CHECK(same(lie_derivative(x, interior_product(y, a)) - interior_product(y, lie_derivative(x, a)),
                   interior_product(bracket(x, y), a)));
        CHECK(field_equal(bracket(x, y), ScalarExpr(-1L) * bracket(y, x)).equal);
    }
}

TEST_CASE("time lift") {
    const auto a = P("x1*t") * wedge(dx(1), dx(2));
    const auto lifted = lift(a);
    CHECK(lifted.chart().is_time_extended());
    CHECK(lifted.chart().time_index() == 4);
    CHECK(exterior_derivative(a).is_zero());
    const auto da = exterior_derivative(lifted);
    CHECK(same(spatial_part(da), exterior_derivative(a)));
    // ι_∂t d(x1 t dx1^dx2) = x1 dx1^dx2
    CHECK(same(dt_component(da), P("x1") * wedge(dx(1), dx(2))));
}
