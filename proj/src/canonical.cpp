#include "lcsmech/canonical.hpp"

#include <cmath>

#include <Eigen/LU>

namespace lcsmech::canonical {

using forms::CompiledVector;
using forms::VectorFieldExpr;

namespace {

expr::EqualityOptions equality_options(const CheckOptions& o) {
    expr::EqualityOptions e;
    e.seed = o.seed;
    return e;
}

void require_charts(const ChartMap& f, const LcsStructure& s1, const LcsStructure& s2) {
    if (!(f.source() == s1.chart().time_extended()))
        throw DimensionMismatch("map source is not the time-extended chart of the first structure");
    if (!(f.target() == s2.chart().time_extended()))
        throw DimensionMismatch("map target is not the time-extended chart of the second structure");
}

DifferentialForm dt_on(const Chart& extended) { return DifferentialForm::basis(extended, extended.time_index()); }

/// d_θ̃K∧dt on the time-extended chart.
DifferentialForm kf_term(const LcsStructure& s1, const ScalarExpr& k) {
    const auto theta = forms::lift(s1.theta());
    const auto kf = DifferentialForm::function(theta.chart(), k);
    return forms::wedge(forms::ldr_differential(kf, theta), dt_on(theta.chart()));
}

DifferentialForm pulled_omega_difference(const ChartMap& f, const LcsStructure& s1, const LcsStructure& s2) {
    return forms::pullback(f, forms::lift(s2.omega())) - forms::lift(s1.omega());
}

/// Rows of the Jacobian compiled over the source slots.
std::vector<CompiledVector> compiled_jacobian(const ChartMap& f) {
    std::vector<CompiledVector> rows;
    for (const auto& row : f.jacobian()) rows.emplace_back(f.source(), row);
    return rows;
}

Eigen::MatrixXd jacobian_at(const std::vector<CompiledVector>& rows, std::span<const double> y) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) j.row(static_cast<Eigen::Index>(i)) = rows[i](0.0, y).transpose();
    return j;
}

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Sampled certificate of local invertibility.
void check_inversion(const CanonicalCandidate& c, const CheckOptions& options, CanonicalVerdict& v) {
    const int n = c.f.source().dim();
    const CompiledVector fv(c.f.source(), c.f.components());
    Sampler rng(options.seed);
    v.invertible = true;
    double worst = 0.0;
    int taken = 0;
    if (c.inverse) {
        v.inversion_method = "inverse";
        if (!(c.inverse->source() == c.f.target()) || !(c.inverse->target() == c.f.source()))
            throw DimensionMismatch("inverse map charts do not match the candidate");
        const CompiledVector gv(c.inverse->source(), c.inverse->components());
        for (int attempt = 0; attempt < options.samples * 10 && taken < options.samples; ++attempt) {
            const auto y = rng.point(n);
            Eigen::VectorXd back;
            try {
                const Eigen::VectorXd z = fv(0.0, y);
                back = gv(0.0, as_span(z));
            } catch (const expr::EvaluationError&) {
                continue;
            }
            ++taken;
            const Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
            const double err = (back - y0).cwiseAbs().maxCoeff() / (1.0 + y0.cwiseAbs().maxCoeff());
            worst = std::max(worst, err);
        }
        v.invertible = worst <= options.tolerance;
    } else {
        v.inversion_method = "newton";
        if (c.f.target().dim() != n) throw DimensionMismatch("map between charts of different dimension");
        const auto jac = compiled_jacobian(c.f);
        for (int attempt = 0; attempt < options.samples * 10 && taken < options.samples; ++attempt) {
            const auto y = rng.point(n);
            Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
            const Eigen::VectorXd y0 = w;
            Eigen::VectorXd z;
            try {
                z = fv(0.0, y);
                // Start off the sample so the solve has work to do.
                for (int i = 0; i < n; ++i) w(i) += 1e-2 * rng.uniform(-1.0, 1.0);
                bool converged = false;
                for (int it = 0; it < 60; ++it) {
                    const Eigen::VectorXd r = fv(0.0, as_span(w)) - z;
                    if (r.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + z.cwiseAbs().maxCoeff())) {
                        converged = true;
                        break;
                    }
                    const Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian_at(jac, as_span(w)));
                    if (!lu.isInvertible()) break;
                    w -= lu.solve(r);
                    if (!w.allFinite()) break;
                }
                ++taken;
                if (!converged) {
                    v.invertible = false;
                    worst = std::max(worst, 1.0);
                    continue;
                }
            } catch (const expr::EvaluationError&) {
                continue;
            }
            const double err = (w - y0).cwiseAbs().maxCoeff() / (1.0 + y0.cwiseAbs().maxCoeff());
            worst = std::max(worst, err);
            // Newton is quadratically convergent; a far-off root means F is not injective nearby.
            if (err > 1e-8) v.invertible = false;
        }
    }
    if (taken == 0) v.invertible = false;
    v.max_roundtrip = worst;
    v.samples = taken;
}

int spatial_degree(const expr::Monomial& m) {
    int d = 0;
    for (const auto& [atom, e] : m)
        if (atom.is_variable() && atom.name != kTimeSymbol) d += e;
    return d;
}

}  // namespace

CanonicalVerdict check_canonical(const CanonicalCandidate& c, const CheckOptions& options) {
    if (!c.k_f) throw MissingKF("candidate has no K_F");
    require_charts(c.f, c.s1, c.s2);
    for (const auto& v : c.k_f->variables())
        if (!c.f.source().index_of(v)) throw std::invalid_argument("K_F uses '" + v + "', which is not a coordinate of ℝ×M₁");

    CanonicalVerdict v;
    v.seed = options.seed;
    v.tolerance = options.tolerance;
    v.time_preserved = c.f.preserves_time();

    const auto eq = equality_options(options);
    v.theta_residual = forms::pullback(c.f, forms::lift(c.s2.theta())) - forms::lift(c.s1.theta());
    v.theta = forms::form_equal(v.theta_residual, DifferentialForm::zero(v.theta_residual.chart(), 1), eq);

    v.omega_residual = pulled_omega_difference(c.f, c.s1, c.s2) - kf_term(c.s1, *c.k_f);
    v.omega = forms::form_equal(v.omega_residual, DifferentialForm::zero(v.omega_residual.chart(), 2), eq);

    check_inversion(c, options, v);
    v.canonical = v.time_preserved && v.theta.equal && v.omega.equal && v.invertible;
    return v;
}

KfExtraction extract_kf(const ChartMap& f, const LcsStructure& s1, const LcsStructure& s2) {
    require_charts(f, s1, s2);
    KfExtraction out;
    const auto diff = pulled_omega_difference(f, s1, s2);
    out.remainder = diff;
    // diff = β∧dt + (spatial part); ι_∂t(β∧dt) = −β.
    const auto beta = -forms::dt_component(diff);
    const Chart& spatial = beta.chart();
    ScalarExpr k;
    const auto comps = beta.components();
    for (int i = 0; i < spatial.dim(); ++i) {
        const auto& bi = comps[static_cast<std::size_t>(i)];
        if (bi.is_zero()) continue;
        if (!bi.is_polynomial()) {
            out.message = "dt-component is not polynomial; no ray integral attempted";
            return out;
        }
        const auto xi = ScalarExpr::variable(spatial.name(i));
        for (const auto& [m, coeff] : bi.terms()) {
            expr::TermMap tm;
            tm.emplace(m, coeff / (spatial_degree(m) + 1));
            k += ScalarExpr::from_terms(std::move(tm)) * xi;
        }
    }
    out.remainder = diff - kf_term(s1, k);
    if (!forms::form_equal(out.remainder, DifferentialForm::zero(diff.chart(), 2)).equal) {
        out.message = "F*Ω̃₂ − Ω̃₁ is not of the form d_θ̃₁K∧dt for the integrated K";
        return out;
    }
    out.k_f = k;
    out.message = "extracted";
    return out;
}

ScalarExpr transported_hamiltonian(const CanonicalCandidate& c, const CanonicalVerdict& verdict, const ScalarExpr& h) {
    if (!verdict.canonical) throw UnverifiedCandidate("candidate did not pass check_canonical");
    if (!c.k_f) throw MissingKF("candidate has no K_F");
    for (const auto& v : h.variables())
        if (!c.f.target().index_of(v)) throw std::invalid_argument("H uses '" + v + "', which is not a coordinate of ℝ×M₂");
    return expr::substitute(h, c.f.substitution()) + *c.k_f;
}

NormalizedPotential normalize_potential(const LcsStructure& s, const DifferentialForm& potential) {
    if (potential.degree() != 1 || !(potential.chart() == s.chart()))
        throw std::invalid_argument("potential must be a 1-form on the structure's chart");
    const auto d = forms::ldr_differential(potential, s.theta());
    if (forms::form_equal(s.omega(), d).equal) return {potential, 1};
    if (forms::form_equal(s.omega(), -d).equal) return {-potential, -1};
    throw std::invalid_argument("potential satisfies neither Ω = d_θΘ nor Ω = −d_θΘ");
}

namespace {

DifferentialForm extended_potential(const DifferentialForm& p) {
    const auto lifted = forms::lift(p);
    return lifted + dt_on(lifted.chart());
}

/// F*Θ̃₂ − Θ̃₁ − K_F dt with normalized potentials.
DifferentialForm potential_difference(const CanonicalCandidate& c, const DifferentialForm& p1,
                                      const DifferentialForm& p2) {
    const auto t1 = extended_potential(p1);
    const auto dt = dt_on(t1.chart());
    return forms::pullback(c.f, extended_potential(p2)) - t1 - (*c.k_f) * dt;
}

}  // namespace

EquivalenceReport verify_equivalences(const CanonicalCandidate& c, const CanonicalVerdict& verdict,
                                      const ScalarExpr& h, const std::optional<Potentials>& potentials,
                                      const CheckOptions& options) {
    EquivalenceReport r;
    r.seed = options.seed;
    r.tolerance = options.tolerance;
    r.k = transported_hamiltonian(c, verdict, h);
    const auto eq = equality_options(options);

    const dynamics::HamiltonianSystem sys1(c.s1, r.k), sys2(c.s2, h);
    r.condition1_residual = forms::pullback(c.f, dynamics::omega_h(sys2)) - dynamics::omega_h(sys1);
    r.condition1 = forms::form_equal(r.condition1_residual, DifferentialForm::zero(c.f.source(), 2), eq);

    const auto xk = dynamics::suspension(sys1);
    const auto xh = dynamics::suspension(sys2);
    const CompiledVector fv(c.f.source(), c.f.components());
    const auto jac = compiled_jacobian(c.f);
    const int n = c.f.source().dim();
    const int tn = c.f.target().dim();
    Sampler rng(options.seed);
    for (int attempt = 0; attempt < options.samples * 10 && r.condition2_samples < options.samples; ++attempt) {
        const auto y = rng.point(n);
        const double t = y.back();
        try {
            const Eigen::VectorXd z = fv(t, y);
            const Eigen::VectorXd lhs = jacobian_at(jac, y) * xk(t, y);
            const Eigen::VectorXd rhs = xh(z(tn - 1), as_span(z));
            const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
            r.condition2_mismatch = std::max(r.condition2_mismatch, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
            ++r.condition2_samples;
        } catch (const expr::EvaluationError&) {
            ++r.condition2_skipped;
        } catch (const lcs::SingularAtPoint&) {
            ++r.condition2_skipped;
        }
    }
    r.condition2 = r.condition2_samples > 0 && r.condition2_mismatch <= options.tolerance;

    if (!potentials) {
        r.condition3_notice = "no potentials supplied; condition 3 skipped";
    } else {
        const auto p1 = normalize_potential(c.s1, potentials->theta1);
        const auto p2 = normalize_potential(c.s2, potentials->theta2);
        r.potential_sign1 = p1.sign;
        r.potential_sign2 = p2.sign;
        const auto diff = potential_difference(c, p1.potential, p2.potential);
        r.condition3_residual = forms::ldr_differential(diff, forms::lift(c.s1.theta()));
        r.condition3 = forms::form_equal(r.condition3_residual, DifferentialForm::zero(c.f.source(), 2), eq);
        r.condition3_checked = true;
    }
    r.all_pass = r.condition1.equal && r.condition2 && (!r.condition3_checked || r.condition3.equal);
    return r;
}

DifferentialForm generating_residual(const CanonicalCandidate& c, const ScalarExpr& w, const Potentials& potentials) {
    if (!c.k_f) throw MissingKF("candidate has no K_F");
    require_charts(c.f, c.s1, c.s2);
    const auto p1 = normalize_potential(c.s1, potentials.theta1);
    const auto p2 = normalize_potential(c.s2, potentials.theta2);
    const auto diff = potential_difference(c, p1.potential, p2.potential);
    const auto wf = DifferentialForm::function(c.f.source(), w);
    return diff - forms::ldr_differential(wf, forms::lift(c.s1.theta()));
}

GeneratingCheck check_generating_function(const CanonicalCandidate& c, const ScalarExpr& w,
                                          const Potentials& potentials) {
    GeneratingCheck g;
    g.residual = generating_residual(c, w, potentials);
    g.vanishes = forms::form_equal(g.residual, DifferentialForm::zero(c.f.source(), 1));
    const auto p2 = normalize_potential(c.s2, potentials.theta2);
    const auto pulled = forms::pullback(c.f, forms::lift(p2.potential));
    g.f_dot = pulled.coefficient({c.f.source().time_index()});
    // The dt-coefficient of F*Θ̃₂ − Θ̃₁ − K_F dt = d_θ̃₁W gives K_F = Ḟ − ∂W/∂t.
    g.k_from_w = g.f_dot - expr::differentiate(w, kTimeSymbol);
    g.k_matches = expr::expr_equal(g.k_from_w, *c.k_f);
    return g;
}

CanonicalCandidate compose(const CanonicalCandidate& outer, const CanonicalCandidate& inner) {
    if (!(inner.f.target() == outer.f.source())) throw DimensionMismatch("candidates do not compose");
    if (!outer.k_f || !inner.k_f) throw MissingKF("composition needs both K_F");
    CanonicalCandidate c;
    c.f = outer.f.compose(inner.f);
    if (outer.inverse && inner.inverse) c.inverse = inner.inverse->compose(*outer.inverse);
    c.s1 = inner.s1;
    c.s2 = outer.s2;
    c.k_f = *inner.k_f + expr::substitute(*outer.k_f, inner.f.substitution());
    return c;
}

}  // namespace lcsmech::canonical
