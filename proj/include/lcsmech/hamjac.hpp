#pragma once
// Hamilton–Jacobi residuals for time-dependent sections of cotangent lcs
// structures.

#include <vector>

#include "lcsmech/dynamics.hpp"

namespace lcsmech::hamjac {

using dynamics::HamiltonianSystem;
using expr::ScalarExpr;
using forms::DifferentialForm;
using forms::FormVerdict;
using lcs::LcsStructure;

/// γ(t, q) = (q, γ_1(t, q), ..., γ_n(t, q), t) over the base chart q1..qn.
class TimeSection {
public:
    TimeSection(Chart base, std::vector<ScalarExpr> components);

    const Chart& base() const { return base_; }
    int dim() const { return base_.dim(); }
    const std::vector<ScalarExpr>& components() const { return components_; }
    const ScalarExpr& operator[](int i) const { return components_.at(static_cast<std::size_t>(i)); }

    /// p_i -> γ_i, for composing functions on the cotangent chart with γ.
    std::map<std::string, ScalarExpr, std::less<>> substitution(const Chart& cotangent) const;
    /// (q, t) -> (q, γ(t, q), t) between time-extended charts.
    forms::ChartMap graph(const Chart& cotangent) const;
    /// γ_t: the 1-form γ_i dq^i on the base with t held as a parameter.
    DifferentialForm at_time() const;
    /// Point of the cotangent chart over q at time t.
    std::vector<double> lift_point(double t, std::span<const double> q) const;

private:
    Chart base_;
    std::vector<ScalarExpr> components_;
};

struct ThetaClosedVerdict {
    /// ∂γ_i/∂q^j = θ_j γ_i for all i, j.
    bool closed = false;
    bool exact = true;
    /// residual[i][j] = ∂γ_i/∂q^j − θ_j γ_i
    std::vector<std::vector<ScalarExpr>> residual;
    /// The weaker form condition d_θγ = 0 (antisymmetric part only).
    bool form_closed = false;
    FormVerdict form;
};
/// Needs a structure from cotangent_lcs.
ThetaClosedVerdict check_theta_closed(const TimeSection& gamma, const LcsStructure& s);

/// α^V with ι_{α^V}Ω_θ = α, for α on the cotangent chart.
forms::VectorFieldExpr vertical_lift(const DifferentialForm& alpha, const LcsStructure& s);

/// R_i = ∂γ_i/∂t + ∂H/∂q^i∘γ + (∂H/∂p_j∘γ)·∂γ_j/∂q^i − θ_i·(H∘γ), on the base chart and t.
std::vector<ScalarExpr> hj_residual(const HamiltonianSystem& sys, const TimeSection& gamma);

/// p-components of X̃_H∘γ − Tγ(X̃^γ_H): the γ-relatedness condition.
std::vector<ScalarExpr> relatedness_residual(const HamiltonianSystem& sys, const TimeSection& gamma);
/// The vertical-lift form of the HJ condition solved for ∂γ_i/∂t, as
/// (right side) − ∂γ_i/∂t.  Equals −hj_residual.
std::vector<ScalarExpr> lifted_hj_residual(const HamiltonianSystem& sys, const TimeSection& gamma);

struct RelatednessSample {
    double t = 0.0;
    std::vector<double> q;
    double mismatch = 0.0;      // max |Tγ(X̃^γ_H) − X̃_H∘γ|, relative to the largest summand
    double hj_residual = 0.0;   // max |R_i|
    double hj_relative = 0.0;   // hj_residual on the mismatch scale
    double difference = 0.0;    // max |relatedness − lifted| residual
};

struct RelatednessReport {
    /// d_θγ = 0, the theorem's hypothesis.
    bool hypothesis_holds = false;
    bool strongly_closed = false;
    int samples = 0;
    std::uint64_t seed = 0;
    double max_mismatch = 0.0;
    double max_hj_residual = 0.0;
    bool related = false;
    /// mismatch and hj_relative on the same side of the tolerance at every sample.
    bool indicators_agree = false;
    std::vector<RelatednessSample> per_sample;
};
RelatednessReport gamma_relatedness(const HamiltonianSystem& sys, const TimeSection& gamma, int samples = 100,
                                    std::uint64_t seed = kDefaultSeed, double tolerance = 1e-9);

}  // namespace lcsmech::hamjac
