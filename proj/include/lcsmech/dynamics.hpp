#pragma once
// Time-dependent Hamiltonian dynamics on lcs structures and fixed-step
// integration of the resulting fields.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcsmech/lcs.hpp"

namespace lcsmech::dynamics {

using expr::ScalarExpr;
using forms::DifferentialForm;
using forms::TangentField;
using lcs::LcsStructure;

class HamiltonianSystem {
public:
    /// H may use the chart coordinates and t.
    HamiltonianSystem(LcsStructure s, ScalarExpr h);

    const LcsStructure& structure() const { return s_; }
    const Chart& chart() const { return s_.chart(); }
    const ScalarExpr& hamiltonian() const { return h_; }

private:
    LcsStructure s_;
    ScalarExpr h_;
};

/// d_θH_t = dH_t − H_t θ on the spatial chart (t is a parameter).
DifferentialForm ldr_of_hamiltonian(const HamiltonianSystem& sys);

/// X_H with ι_{X_H}Ω = d_θH_t; symbolic when the structure has a symbolic Ω^♯.
TangentField hamiltonian_field(const HamiltonianSystem& sys);

/// Ω_H = Ω̃ + d_θ̃H ∧ dt on the time-extended chart.
DifferentialForm omega_h(const HamiltonianSystem& sys);

/// ∂/∂t + X_H on the time-extended chart.
TangentField suspension(const HamiltonianSystem& sys);

struct SuspensionCheck {
    int samples = 0;
    std::uint64_t seed = 0;
    double max_contraction = 0.0;  // max |ι_X̃ Ω_H| component
    double max_dt_error = 0.0;     // max |dt(X̃) − 1|
};
SuspensionCheck check_suspension(const HamiltonianSystem& sys, int samples = 100, std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Integration

enum class Method { rk4, euler };
const char* to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

struct IntegrationOptions {
    Method method = Method::rk4;
    double dt = 1e-3;
    bool diagnostics = false;
};

struct Trajectory {
    Chart chart;
    Method method = Method::rk4;
    double nominal_dt = 0.0;
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    std::vector<double> steps;     // steps[k] = t[k+1] − t[k]
    std::vector<double> residual;  // per sample, when diagnostics are on
};

/// Raised mid-run; carries the samples computed so far.
class IntegrationAborted : public std::runtime_error {
public:
    IntegrationAborted(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

class NonFiniteState : public IntegrationAborted {
public:
    using IntegrationAborted::IntegrationAborted;
};

class SingularDuringIntegration : public IntegrationAborted {
public:
    using IntegrationAborted::IntegrationAborted;
};

using Diagnostic = std::function<double(double t, std::span<const double> x)>;

/// Fixed-step integration from t0 to t1; the last step is shortened to land on t1.
Trajectory integrate(const TangentField& field, std::vector<double> x0, double t0, double t1,
                     const IntegrationOptions& options, const Diagnostic& diagnostic = {});
/// Integrates X_H; diagnostics record |ι_XΩ − d_θH_t| at every sample.
Trajectory integrate(const HamiltonianSystem& sys, std::vector<double> x0, double t0, double t1,
                     const IntegrationOptions& options);

/// |ι_XΩ − d_θH_t| (max norm) at one point for a field value.
double defining_residual(const HamiltonianSystem& sys, double t, std::span<const double> x,
                         const Eigen::VectorXd& field_value);

struct CoordinateCheck {
    Eigen::VectorXd coordinate;
    Eigen::VectorXd intrinsic;
    double discrepancy = 0.0;
};
/// Coordinate Hamilton equations on a cotangent chart, against the intrinsic solve.
CoordinateCheck hamilton_rhs_coordinates(const HamiltonianSystem& sys, double t, std::span<const double> x);

}  // namespace lcsmech::dynamics
