#include "lcsmech/lcs.hpp"

#include <cmath>
#include <limits>

namespace lcsmech::lcs {

using expr::ScalarExpr;

namespace {

linalg::ExprMatrix expr_matrix(const DifferentialForm& omega) {
    const auto n = static_cast<std::size_t>(omega.chart().dim());
    linalg::ExprMatrix m(n, std::vector<ScalarExpr>(n));
    for (const auto& [idx, c] : omega.terms()) {
        m[static_cast<std::size_t>(idx[0])][static_cast<std::size_t>(idx[1])] = c;
        m[static_cast<std::size_t>(idx[1])][static_cast<std::size_t>(idx[0])] = -c;
    }
    return m;
}

NondegeneracyReport sample_nondegeneracy(const DifferentialForm& omega, const ValidationOptions& options) {
    NondegeneracyReport r;
    r.seed = options.seed;
    r.min_abs_det = std::numeric_limits<double>::infinity();
    const forms::CompiledMatrix m(omega);
    Sampler sampler(options.seed);
    const int n = omega.chart().dim();
    for (int attempt = 0; attempt < options.samples * 10 && r.samples < options.samples; ++attempt) {
        const auto x = sampler.point(n);
        double det = 0.0;
        try {
            det = m(0.0, x).determinant();
        } catch (const expr::EvaluationError&) {
            continue;
        }
        if (!std::isfinite(det)) continue;
        ++r.samples;
        if (std::abs(det) < r.min_abs_det) {
            r.min_abs_det = std::abs(det);
            r.argmin = x;
        }
    }
    return r;
}

std::optional<linalg::ExprMatrix> symbolic_sharp(const DifferentialForm& omega, std::optional<Rational>& det_out) {
    if (omega.chart().dim() > linalg::kMaxSymbolicDim) return std::nullopt;
    const auto m = expr_matrix(omega);
    const ScalarExpr det = linalg::determinant(m);
    auto c = det.constant_value();
    if (!c || sgn(*c) == 0) return std::nullopt;
    det_out = *c;
    // Ω^♯ solves Mᵀv = α, so v = (M⁻¹)ᵀα = (cofactors / det)·α.
    auto n = linalg::cofactors(m);
    const ScalarExpr inv(Rational(1) / *c);
    for (auto& row : n)
        for (auto& e : row) e = inv * e;
    return n;
}

void require_chart(const LcsStructure& s, const Chart& c, const char* what) {
    if (!(s.chart() == c)) throw forms::ChartMismatch(std::string(what) + ": chart mismatch");
}

}  // namespace

ValidationReport check_lcs(const DifferentialForm& omega, const DifferentialForm& theta,
                           const ValidationOptions& options) {
    if (omega.degree() != 2) throw std::invalid_argument("Omega must be a 2-form");
    if (theta.degree() != 1) throw std::invalid_argument("theta must be a 1-form");
    if (!(omega.chart() == theta.chart())) throw forms::ChartMismatch("Omega and theta live on different charts");
    if (omega.chart().dim() % 2 != 0) throw OddDimension("lcs structures need an even-dimensional chart");
    ValidationReport r;
    const expr::EqualityOptions eq{32, 1e-10, options.seed};
    const Chart& chart = omega.chart();
    r.d_theta = forms::exterior_derivative(theta);
    r.theta_closed = forms::form_equal(r.d_theta, DifferentialForm::zero(chart, 2), eq);
    r.ldr_omega = forms::ldr_differential(omega, theta);
    r.ldr_omega_zero = forms::form_equal(r.ldr_omega, DifferentialForm::zero(chart, 3), eq);
    r.nondegeneracy = sample_nondegeneracy(omega, options);
    if (chart.dim() <= linalg::kMaxSymbolicDim) {
        std::optional<Rational> det;
        symbolic_sharp(omega, det);
        r.nondegeneracy.constant_det = det;
    }
    r.valid = r.theta_closed.equal && r.ldr_omega_zero.equal && r.nondegeneracy.samples > 0 &&
              r.nondegeneracy.min_abs_det > options.det_floor;
    return r;
}

LcsStructure validate_lcs(const DifferentialForm& omega, const DifferentialForm& theta,
                          const ValidationOptions& options) {
    ValidationReport r = check_lcs(omega, theta, options);
    if (!r.theta_closed.equal) throw ClosednessViolation("Lee form is not closed: d(theta) != 0", r.d_theta);
    if (!r.ldr_omega_zero.equal)
        throw ClosednessViolation("d(Omega) != theta^Omega", r.ldr_omega);
    if (r.nondegeneracy.samples == 0 || r.nondegeneracy.min_abs_det <= options.det_floor)
        throw DegeneracyDetected("Omega is degenerate at a sampled point", r.nondegeneracy.argmin,
                                 r.nondegeneracy.samples ? r.nondegeneracy.min_abs_det : 0.0);
    LcsStructure s;
    s.omega_ = omega;
    s.theta_ = theta;
    std::optional<Rational> det;
    s.sharp_ = symbolic_sharp(omega, det);
    s.report_ = std::move(r);
    return s;
}

DifferentialForm flat(const LcsStructure& s, const VectorFieldExpr& x) {
    require_chart(s, x.chart(), "flat");
    return forms::interior_product(x, s.omega());
}

namespace {

Eigen::VectorXd solve_sharp(const Eigen::MatrixXd& m, const Eigen::VectorXd& alpha, std::span<const double> x) {
    const Eigen::MatrixXd mt = m.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw SingularAtPoint("Omega is singular at the evaluation point", {x.begin(), x.end()});
    return lu.solve(alpha);
}

}  // namespace

Eigen::VectorXd sharp_at(const LcsStructure& s, const Eigen::VectorXd& alpha, std::span<const double> x) {
    return solve_sharp(forms::form_matrix_at(s.omega(), x), alpha, x);
}

TangentField sharp_field(const LcsStructure& s, const DifferentialForm& alpha) {
    require_chart(s, alpha.chart(), "sharp");
    if (alpha.degree() != 1) throw std::invalid_argument("sharp needs a 1-form");
    const Chart& chart = s.chart();
    if (s.sharp_matrix()) {
        const auto& n = *s.sharp_matrix();
        const auto a = alpha.components();
        std::vector<ScalarExpr> v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
                if (!n[i][j].is_zero() && !a[j].is_zero()) v[i] += n[i][j] * a[j];
        return TangentField::symbolic(VectorFieldExpr(chart, std::move(v)));
    }
    auto m = std::make_shared<forms::CompiledMatrix>(s.omega());
    auto a = std::make_shared<forms::CompiledVector>(chart, alpha.components());
    return TangentField::pointwise(chart, [m, a](double t, std::span<const double> x) {
        return solve_sharp((*m)(t, x), (*a)(t, x), x);
    });
}

TangentField lee_field(const LcsStructure& s) { return sharp_field(s, s.theta()); }

DifferentialForm liouville_form(const Chart& chart) {
    if (!chart.is_cotangent()) throw std::invalid_argument("Liouville form needs a cotangent chart");
    const int n = chart.base_dim();
    DifferentialForm theta(chart, 1);
    for (int i = 0; i < n; ++i) theta.add_term({i}, ScalarExpr::variable(chart.name(n + i)));
    return theta;
}

forms::ChartMap cotangent_projection(const Chart& chart) {
    const int n = chart.base_dim();
    const Chart base = Chart::cotangent_base(n);
    std::vector<ScalarExpr> c;
    for (int i = 0; i < n; ++i) c.push_back(ScalarExpr::variable(chart.name(i)));
    return {chart, base, std::move(c)};
}

forms::ChartMap section_map(const Chart& chart, const DifferentialForm& gamma) {
    const int n = chart.base_dim();
    const Chart base = Chart::cotangent_base(n);
    if (!(gamma.chart() == base)) throw forms::ChartMismatch("section must be a 1-form on the base chart");
    std::vector<ScalarExpr> c;
    for (int i = 0; i < n; ++i) c.push_back(ScalarExpr::variable(base.name(i)));
    for (const auto& g : gamma.components()) c.push_back(g);
    return {base, chart, std::move(c)};
}

LcsStructure cotangent_lcs(int base_dim, const DifferentialForm& vartheta, const ValidationOptions& options) {
    const Chart base = Chart::cotangent_base(base_dim);
    if (!(vartheta.chart() == base) || vartheta.degree() != 1)
        throw forms::ChartMismatch("vartheta must be a 1-form on (q1..qn)");
    const DifferentialForm dv = forms::exterior_derivative(vartheta);
    if (!forms::form_equal(dv, DifferentialForm::zero(base, 2), {32, 1e-10, options.seed}).equal)
        throw NonClosedBaseForm("base form vartheta is not closed", dv);
    const Chart chart = Chart::cotangent(base_dim);
    const DifferentialForm theta = forms::pullback(cotangent_projection(chart), vartheta);
    const DifferentialForm omega = -forms::ldr_differential(liouville_form(chart), theta);
    LcsStructure s = validate_lcs(omega, theta, options);
    s.vartheta_ = vartheta;
    return s;
}

SectionVerdict is_lagrangian_section(const LcsStructure& s, const DifferentialForm& gamma) {
    if (!s.is_cotangent()) throw std::invalid_argument("is_lagrangian_section needs a cotangent structure");
    SectionVerdict v;
    const Chart base = s.vartheta()->chart();
    v.d_vartheta_gamma = forms::ldr_differential(gamma, *s.vartheta());
    v.closed = forms::form_equal(v.d_vartheta_gamma, DifferentialForm::zero(base, 2));
    const DifferentialForm pulled = forms::pullback(section_map(s.chart(), gamma), s.omega());
    v.pullback_identity = forms::form_equal(pulled, -v.d_vartheta_gamma);
    v.lagrangian = v.closed.equal;
    return v;
}

MorphismVerdict verify_lcs_morphism(const forms::ChartMap& f, const LcsStructure& s1, const LcsStructure& s2) {
    if (s1.chart().dim() != s2.chart().dim()) throw std::invalid_argument("morphism: dimension mismatch");
    if (!(f.source() == s1.chart()) || !(f.target() == s2.chart()))
        throw forms::ChartMismatch("morphism: map charts do not match the structures");
    MorphismVerdict v;
    v.omega_residual = forms::pullback(f, s2.omega()) - s1.omega();
    v.theta_residual = forms::pullback(f, s2.theta()) - s1.theta();
    v.omega = forms::form_equal(v.omega_residual, DifferentialForm::zero(s1.chart(), 2));
    v.theta = forms::form_equal(v.theta_residual, DifferentialForm::zero(s1.chart(), 1));
    v.morphism = v.omega.equal;
    return v;
}

LocallyHamiltonianVerdict is_locally_hamiltonian(const LcsStructure& s, const VectorFieldExpr& x) {
    LocallyHamiltonianVerdict v;
    v.residual = forms::ldr_differential(flat(s, x), s.theta());
    v.verdict = forms::form_equal(v.residual, DifferentialForm::zero(s.chart(), 2));
    v.locally_hamiltonian = v.verdict.equal;
    return v;
}

}  // namespace lcsmech::lcs
