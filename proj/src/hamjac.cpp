#include "lcsmech/hamjac.hpp"

#include <cmath>

namespace lcsmech::hamjac {

using forms::CompiledVector;

TimeSection::TimeSection(Chart base, std::vector<ScalarExpr> components)
    : base_(std::move(base)), components_(std::move(components)) {
    if (base_.is_time_extended()) throw std::invalid_argument("section base must be a spatial chart");
    if (static_cast<int>(components_.size()) != base_.dim())
        throw std::invalid_argument("section needs one component per base coordinate");
    for (const auto& c : components_)
        for (const auto& v : c.variables())
            if (v != kTimeSymbol && !base_.index_of(v))
                throw std::invalid_argument("section uses '" + v + "', which is not a base coordinate");
}

namespace {

void require_cotangent_over(const Chart& cotangent, const Chart& base) {
    if (!cotangent.is_cotangent() || cotangent.base_dim() != base.dim())
        throw std::invalid_argument("section base does not match the cotangent chart");
    for (int i = 0; i < base.dim(); ++i)
        if (cotangent.name(i) != base.name(i)) throw std::invalid_argument("section base does not match the cotangent chart");
}

const DifferentialForm& base_theta(const LcsStructure& s) {
    if (!s.is_cotangent()) throw std::invalid_argument("Hamilton–Jacobi checks need a cotangent structure");
    return *s.vartheta();
}

/// Pieces of H along γ shared by the residuals.
struct AlongSection {
    std::vector<ScalarExpr> hq, hp, theta, dt_gamma;
    std::vector<std::vector<ScalarExpr>> dgamma;  // dgamma[i][j] = ∂γ_i/∂q^j
    ScalarExpr h;
};

AlongSection along(const HamiltonianSystem& sys, const TimeSection& gamma) {
    const Chart& cot = sys.chart();
    require_cotangent_over(cot, gamma.base());
    const int n = gamma.dim();
    const auto sub = gamma.substitution(cot);
    const auto& h = sys.hamiltonian();
    AlongSection a;
    a.h = expr::substitute(h, sub);
    a.theta = base_theta(sys.structure()).components();
    for (int i = 0; i < n; ++i) {
        a.hq.push_back(expr::substitute(expr::differentiate(h, cot.name(i)), sub));
        a.hp.push_back(expr::substitute(expr::differentiate(h, cot.name(n + i)), sub));
        a.dt_gamma.push_back(expr::differentiate(gamma[i], kTimeSymbol));
        std::vector<ScalarExpr> row;
        for (int j = 0; j < n; ++j) row.push_back(expr::differentiate(gamma[i], gamma.base().name(j)));
        a.dgamma.push_back(std::move(row));
    }
    return a;
}

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

std::map<std::string, ScalarExpr, std::less<>> TimeSection::substitution(const Chart& cotangent) const {
    require_cotangent_over(cotangent, base_);
    std::map<std::string, ScalarExpr, std::less<>> s;
    for (int i = 0; i < dim(); ++i) s.emplace(cotangent.name(dim() + i), (*this)[i]);
    return s;
}

forms::ChartMap TimeSection::graph(const Chart& cotangent) const {
    require_cotangent_over(cotangent, base_);
    std::vector<ScalarExpr> c;
    for (const auto& n : base_.names()) c.push_back(ScalarExpr::variable(n));
    for (const auto& g : components_) c.push_back(g);
    c.push_back(ScalarExpr::variable(std::string(kTimeSymbol)));
    return {base_.time_extended(), cotangent.time_extended(), std::move(c)};
}

DifferentialForm TimeSection::at_time() const { return DifferentialForm::one_form(base_, components_); }

std::vector<double> TimeSection::lift_point(double t, std::span<const double> q) const {
    std::vector<double> x(q.begin(), q.end());
    for (const auto& g : components_) x.push_back(expr::evaluate(g, base_, q, t));
    return x;
}

ThetaClosedVerdict check_theta_closed(const TimeSection& gamma, const LcsStructure& s) {
    const auto& vartheta = base_theta(s);
    if (!(vartheta.chart() == gamma.base())) throw std::invalid_argument("section base does not match the structure");
    const auto theta = vartheta.components();
    ThetaClosedVerdict v;
    v.closed = true;
    const int n = gamma.dim();
    for (int i = 0; i < n; ++i) {
        std::vector<ScalarExpr> row;
        for (int j = 0; j < n; ++j) {
            const auto r = expr::differentiate(gamma[i], gamma.base().name(j)) - theta[static_cast<std::size_t>(j)] * gamma[i];
            const auto eq = expr::expr_equal(r, ScalarExpr());
            v.closed = v.closed && eq.equal;
            v.exact = v.exact && eq.path == expr::EqualityPath::exact;
            row.push_back(r);
        }
        v.residual.push_back(std::move(row));
    }
    const auto d = forms::ldr_differential(gamma.at_time(), vartheta);
    v.form = forms::form_equal(d, DifferentialForm::zero(gamma.base(), 2));
    v.form_closed = v.form.equal;
    return v;
}

forms::VectorFieldExpr vertical_lift(const DifferentialForm& alpha, const LcsStructure& s) {
    const auto x = lcs::sharp_field(s, alpha);
    if (!x.is_symbolic()) throw std::logic_error("vertical lift needs a structure with a symbolic inverse");
    return x.expr();
}

std::vector<ScalarExpr> hj_residual(const HamiltonianSystem& sys, const TimeSection& gamma) {
    const auto a = along(sys, gamma);
    const int n = gamma.dim();
    std::vector<ScalarExpr> r;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        ScalarExpr ri = a.dt_gamma[ui] + a.hq[ui] - a.theta[ui] * a.h;
        for (int j = 0; j < n; ++j) ri += a.hp[static_cast<std::size_t>(j)] * a.dgamma[static_cast<std::size_t>(j)][ui];
        r.push_back(ri);
    }
    return r;
}

std::vector<ScalarExpr> relatedness_residual(const HamiltonianSystem& sys, const TimeSection& gamma) {
    const auto a = along(sys, gamma);
    const int n = gamma.dim();
    std::vector<ScalarExpr> r;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        // p-component of X̃_H at γ minus that of Tγ(∂t + H_p ∂q).
        ScalarExpr ri = -a.hq[ui] + a.theta[ui] * a.h - a.dt_gamma[ui];
        for (int j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            ri += a.hp[uj] * (a.theta[uj] * gamma[i] - a.theta[ui] * gamma[j]);
            ri -= a.hp[uj] * a.dgamma[ui][uj];
        }
        r.push_back(ri);
    }
    return r;
}

std::vector<ScalarExpr> lifted_hj_residual(const HamiltonianSystem& sys, const TimeSection& gamma) {
    auto r = hj_residual(sys, gamma);
    for (auto& e : r) e = -e;
    return r;
}

RelatednessReport gamma_relatedness(const HamiltonianSystem& sys, const TimeSection& gamma, int samples,
                                    std::uint64_t seed, double tolerance) {
    RelatednessReport rep;
    rep.seed = seed;
    const auto closed = check_theta_closed(gamma, sys.structure());
    rep.hypothesis_holds = closed.form_closed;
    rep.strongly_closed = closed.closed;

    const int n = gamma.dim();
    const Chart& base = gamma.base();
    const auto field = dynamics::hamiltonian_field(sys);
    std::vector<ScalarExpr> dt_gamma, jac;
    for (int i = 0; i < n; ++i) {
        dt_gamma.push_back(expr::differentiate(gamma[i], kTimeSymbol));
        for (int j = 0; j < n; ++j) jac.push_back(expr::differentiate(gamma[i], base.name(j)));
    }
    const CompiledVector dtg(base, dt_gamma), jg(base, jac);
    const CompiledVector hj(base, hj_residual(sys, gamma));
    std::vector<ScalarExpr> diff;
    {
        const auto e1 = relatedness_residual(sys, gamma);
        const auto e2 = lifted_hj_residual(sys, gamma);
        for (int i = 0; i < n; ++i) diff.push_back(e1[static_cast<std::size_t>(i)] - e2[static_cast<std::size_t>(i)]);
    }
    const CompiledVector dv(base, diff);

    // Size of the terms entering X_H, used to scale the mismatch.
    const Chart& cot = sys.chart();
    std::vector<ScalarExpr> h_parts{sys.hamiltonian()};
    for (int k = 0; k < cot.dim(); ++k) h_parts.push_back(expr::differentiate(sys.hamiltonian(), cot.name(k)));
    const CompiledVector hparts(cot, h_parts);

    Sampler rng(seed);
    rep.indicators_agree = true;
    for (int attempt = 0; attempt < samples * 10 && rep.samples < samples; ++attempt) {
        const double t = rng.uniform();
        const auto q = rng.point(n);
        RelatednessSample s;
        s.t = t;
        s.q = q;
        try {
            const auto x = gamma.lift_point(t, q);
            const Eigen::VectorXd v = field(t, as_span(x));
            const Eigen::VectorXd a = v.head(n);
            const Eigen::VectorXd jv = jg(t, q);
            const Eigen::Map<const Eigen::MatrixXd> jm(jv.data(), n, n);  // column-major: jm(j, i) = ∂γ_i/∂q^j
            const Eigen::VectorXd dg = dtg(t, q);
            const Eigen::VectorXd pushed = dg + jm.transpose() * a;
            // Relative to the largest summand (including those inside X_H), so
            // cancellation between large terms is not read as a mismatch.
            const Eigen::VectorXd terms = dg.cwiseAbs() + jm.cwiseAbs().transpose() * a.cwiseAbs();
            const Eigen::VectorXd hv = hparts(t, as_span(x));
            const Eigen::VectorXd theta = forms::covector_at(sys.structure().theta(), as_span(x), t);
            const Eigen::VectorXd cov = hv.tail(cot.dim()).cwiseAbs() + std::abs(hv(0)) * theta.cwiseAbs();
            const Eigen::MatrixXd sharp = forms::form_matrix_at(sys.structure().omega(), as_span(x), t).inverse();
            const double field_terms = (sharp.cwiseAbs() * cov).maxCoeff();
            const double scale =
                1.0 + std::max({v.tail(n).cwiseAbs().maxCoeff(), terms.maxCoeff(), field_terms});
            s.mismatch = (v.tail(n) - pushed).cwiseAbs().maxCoeff() / scale;
            s.hj_residual = hj(t, q).cwiseAbs().maxCoeff();
            s.hj_relative = s.hj_residual / scale;
            s.difference = dv(t, q).cwiseAbs().maxCoeff();
        } catch (const expr::EvaluationError&) {
            continue;
        } catch (const lcs::SingularAtPoint&) {
            continue;
        }
        if (!std::isfinite(s.mismatch) || !std::isfinite(s.hj_residual)) continue;
        ++rep.samples;
        rep.max_mismatch = std::max(rep.max_mismatch, s.mismatch);
        rep.max_hj_residual = std::max(rep.max_hj_residual, s.hj_residual);
        // Under the hypothesis both indicators measure the same vector, so
        // they are classified on one scale against one threshold.
        rep.indicators_agree = rep.indicators_agree && ((s.mismatch <= tolerance) == (s.hj_relative <= tolerance));
        rep.per_sample.push_back(std::move(s));
    }
    rep.related = rep.samples > 0 && rep.max_mismatch <= tolerance;
    return rep;
}

}  // namespace lcsmech::hamjac
