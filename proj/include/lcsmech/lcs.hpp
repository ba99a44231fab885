#pragma once
// Locally conformal symplectic structures on a single chart.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcsmech/exterior.hpp"
#include "lcsmech/linalg.hpp"
#include "lcsmech/sampling.hpp"

namespace lcsmech::lcs {

using forms::DifferentialForm;
using forms::FormVerdict;
using forms::TangentField;
using forms::VectorFieldExpr;

// ---------------------------------------------------------------------------
// Errors

class ClosednessViolation : public std::runtime_error {
public:
    ClosednessViolation(const std::string& what, DifferentialForm residual)
        : std::runtime_error(what), residual_(std::move(residual)) {}
    const DifferentialForm& residual() const { return residual_; }

private:
    DifferentialForm residual_;
};

class DegeneracyDetected : public std::runtime_error {
public:
    DegeneracyDetected(const std::string& what, std::vector<double> point, double determinant)
        : std::runtime_error(what), point_(std::move(point)), determinant_(determinant) {}
    const std::vector<double>& point() const { return point_; }
    double determinant() const { return determinant_; }

private:
    std::vector<double> point_;
    double determinant_;
};

class OddDimension : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularAtPoint : public std::runtime_error {
public:
    SingularAtPoint(const std::string& what, std::vector<double> point)
        : std::runtime_error(what), point_(std::move(point)) {}
    const std::vector<double>& point() const { return point_; }

private:
    std::vector<double> point_;
};

class NonClosedBaseForm : public std::invalid_argument {
public:
    NonClosedBaseForm(const std::string& what, DifferentialForm residual)
        : std::invalid_argument(what), residual_(std::move(residual)) {}
    const DifferentialForm& residual() const { return residual_; }

private:
    DifferentialForm residual_;
};

// ---------------------------------------------------------------------------
// Structure

struct ValidationOptions {
    int samples = 100;
    std::uint64_t seed = kDefaultSeed;
    /// |det| at or below this counts as degenerate.
    double det_floor = 1e-12;
};

struct NondegeneracyReport {
    int samples = 0;
    std::uint64_t seed = 0;
    double min_abs_det = 0.0;
    std::vector<double> argmin;
    /// det Ω as an exact constant, when the symbolic determinant is one.
    std::optional<Rational> constant_det;
};

struct ValidationReport {
    bool valid = false;
    FormVerdict theta_closed;
    FormVerdict ldr_omega_zero;
    DifferentialForm d_theta;          // dθ
    DifferentialForm ldr_omega;        // dΩ − θ∧Ω
    NondegeneracyReport nondegeneracy;
};

class LcsStructure {
public:
    const Chart& chart() const { return omega_.chart(); }
    const DifferentialForm& omega() const { return omega_; }
    const DifferentialForm& theta() const { return theta_; }
    const ValidationReport& report() const { return report_; }

    /// N with Ω^♯(α) = N·α, present when det Ω is a nonzero constant.
    const std::optional<linalg::ExprMatrix>& sharp_matrix() const { return sharp_; }

    /// Base form ϑ for structures built by cotangent_lcs.
    const std::optional<DifferentialForm>& vartheta() const { return vartheta_; }
    bool is_cotangent() const { return vartheta_.has_value(); }

private:
    friend LcsStructure validate_lcs(const DifferentialForm&, const DifferentialForm&, const ValidationOptions&);
    friend LcsStructure cotangent_lcs(int, const DifferentialForm&, const ValidationOptions&);

    DifferentialForm omega_, theta_;
    ValidationReport report_;
    std::optional<linalg::ExprMatrix> sharp_;
    std::optional<DifferentialForm> vartheta_;
};

/// All checks, no throwing.
ValidationReport check_lcs(const DifferentialForm& omega, const DifferentialForm& theta,
                           const ValidationOptions& options = {});
/// Throws ClosednessViolation, DegeneracyDetected or OddDimension.
LcsStructure validate_lcs(const DifferentialForm& omega, const DifferentialForm& theta,
                          const ValidationOptions& options = {});

/// ι_X Ω.
DifferentialForm flat(const LcsStructure& s, const VectorFieldExpr& x);
/// v with ι_v Ω = α at a point.  Throws SingularAtPoint.
Eigen::VectorXd sharp_at(const LcsStructure& s, const Eigen::VectorXd& alpha, std::span<const double> x);
/// Ω^♯ of a 1-form: symbolic when the structure has a symbolic inverse.
TangentField sharp_field(const LcsStructure& s, const DifferentialForm& alpha);
/// Z_θ with ι_{Z_θ}Ω = θ.
TangentField lee_field(const LcsStructure& s);

/// Chart (q1..qn, p1..pn), Θ = p_i dq^i, θ = π*ϑ, Ω = −d_θΘ.
LcsStructure cotangent_lcs(int base_dim, const DifferentialForm& vartheta, const ValidationOptions& options = {});
/// Liouville form p_i dq^i on a cotangent chart.
DifferentialForm liouville_form(const Chart& cotangent_chart);
/// The bundle projection (q, p) -> q.
forms::ChartMap cotangent_projection(const Chart& cotangent_chart);
/// q -> (q, γ(q)) for a 1-form γ on the base.
forms::ChartMap section_map(const Chart& cotangent_chart, const DifferentialForm& gamma);

struct SectionVerdict {
    bool lagrangian = false;
    DifferentialForm d_vartheta_gamma;
    FormVerdict closed;
    /// γ*Ω_θ compared against −d_ϑγ.
    FormVerdict pullback_identity;
};
SectionVerdict is_lagrangian_section(const LcsStructure& s, const DifferentialForm& gamma);

struct MorphismVerdict {
    bool morphism = false;
    FormVerdict omega;
    FormVerdict theta;
    DifferentialForm omega_residual;  // F*Ω₂ − Ω₁
    DifferentialForm theta_residual;  // F*θ₂ − θ₁
};
MorphismVerdict verify_lcs_morphism(const forms::ChartMap& f, const LcsStructure& s1, const LcsStructure& s2);

struct LocallyHamiltonianVerdict {
    bool locally_hamiltonian = false;
    DifferentialForm residual;  // d_θ(ι_X Ω)
    FormVerdict verdict;
};
LocallyHamiltonianVerdict is_locally_hamiltonian(const LcsStructure& s, const VectorFieldExpr& x);

}  // namespace lcsmech::lcs
