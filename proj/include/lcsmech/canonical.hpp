#pragma once
// Canonical transformations between time-extended lcs structures.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcsmech/dynamics.hpp"

namespace lcsmech::canonical {

using expr::ScalarExpr;
using forms::ChartMap;
using forms::DifferentialForm;
using forms::FormVerdict;
using lcs::LcsStructure;

class MissingKF : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnverifiedCandidate : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// F: ℝ×M₁ → ℝ×M₂ written on the time-extended charts of S1 and S2.
struct CanonicalCandidate {
    ChartMap f;
    std::optional<ChartMap> inverse;
    LcsStructure s1, s2;
    std::optional<ScalarExpr> k_f;  // on ℝ×M₁
};

struct CheckOptions {
    int samples = 100;
    std::uint64_t seed = kDefaultSeed;
    double tolerance = 1e-9;
};

struct CanonicalVerdict {
    bool canonical = false;
    bool time_preserved = false;       // (ii)
    FormVerdict theta;                 // (iii)
    DifferentialForm theta_residual;   // F*θ̃₂ − θ̃₁
    FormVerdict omega;                 // (iv)
    DifferentialForm omega_residual;   // F*Ω̃₂ − Ω̃₁ − d_θ̃₁K_F∧dt
    bool invertible = false;           // (i), on the sampled region
    std::string inversion_method;      // "inverse" or "newton"
    double max_roundtrip = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
};

/// Conditions i)–iv).  Throws MissingKF and DimensionMismatch.
CanonicalVerdict check_canonical(const CanonicalCandidate& c, const CheckOptions& options = {});

struct KfExtraction {
    std::optional<ScalarExpr> k_f;
    /// F*Ω̃₂ − Ω̃₁ − d_θ̃₁K∧dt for the candidate K (or F*Ω̃₂ − Ω̃₁ without one).
    DifferentialForm remainder;
    std::string message;
};
/// Reads β from F*Ω̃₂ − Ω̃₁ = β∧dt and integrates dK = β along rays from the
/// origin.  Succeeds only when the result verifies.
KfExtraction extract_kf(const ChartMap& f, const LcsStructure& s1, const LcsStructure& s2);

/// K = H∘F + K_F.  H lives on ℝ×M₂ (coordinates of S2 and t).
ScalarExpr transported_hamiltonian(const CanonicalCandidate& c, const CanonicalVerdict& verdict, const ScalarExpr& h);

/// Potentials with Ω_i = ±d_θᵢΘ_i on the spatial charts.
struct Potentials {
    DifferentialForm theta1, theta2;
};

/// Θ rescaled to Ω = d_θΘ, with the sign that was applied.  Throws
/// std::invalid_argument when neither sign reproduces Ω.
struct NormalizedPotential {
    DifferentialForm potential;
    int sign = 1;
};
NormalizedPotential normalize_potential(const LcsStructure& s, const DifferentialForm& potential);

struct EquivalenceReport {
    ScalarExpr k;
    FormVerdict condition1;
    DifferentialForm condition1_residual;  // F*Ω_H − Ω_K

    bool condition2 = false;
    int condition2_samples = 0;
    int condition2_skipped = 0;
    /// max |TF·X̃_K − X̃_H∘F| / (1 + |X̃_H∘F|)
    double condition2_mismatch = 0.0;

    bool condition3_checked = false;
    std::string condition3_notice;
    FormVerdict condition3;
    DifferentialForm condition3_residual;  // d_θ̃₁(F*Θ̃₂ − Θ̃₁ − K_F dt)
    int potential_sign1 = 1, potential_sign2 = 1;

    bool all_pass = false;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
};
EquivalenceReport verify_equivalences(const CanonicalCandidate& c, const CanonicalVerdict& verdict,
                                      const ScalarExpr& h, const std::optional<Potentials>& potentials,
                                      const CheckOptions& options = {});

/// F*Θ̃₂ − Θ̃₁ − K_F dt − d_θ̃₁W on ℝ×M₁, with Θ̃ = Θ + dt and potentials
/// normalized to Ω = d_θΘ.
DifferentialForm generating_residual(const CanonicalCandidate& c, const ScalarExpr& w, const Potentials& potentials);

struct GeneratingCheck {
    DifferentialForm residual;
    FormVerdict vanishes;
    ScalarExpr f_dot;      // dt-coefficient of F*Θ₂
    ScalarExpr k_from_w;   // Ḟ − ∂W/∂t
    expr::EqualityVerdict k_matches;
};
GeneratingCheck check_generating_function(const CanonicalCandidate& c, const ScalarExpr& w,
                                          const Potentials& potentials);

/// F∘G with K_{F∘G} = K_G + K_F∘G.  outer: S1→S2, inner: S0→S1.
CanonicalCandidate compose(const CanonicalCandidate& outer, const CanonicalCandidate& inner);

}  // namespace lcsmech::canonical
