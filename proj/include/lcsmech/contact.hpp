#pragma once
// Contact pairs, Reeb fields, lcs forms built from contact pairs, and the
// built-in g(4,1) representations with their Lie systems.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lcsmech/lcs.hpp"

namespace lcsmech::contact {

using expr::ScalarExpr;
using forms::DifferentialForm;
using forms::VectorFieldExpr;
using lcs::LcsStructure;

class RankDeficient : public std::runtime_error {
public:
    RankDeficient(const std::string& what, std::vector<double> point)
        : std::runtime_error(what), point_(std::move(point)) {}
    const std::vector<double>& point() const { return point_; }

private:
    std::vector<double> point_;
};

struct ContactPair {
    DifferentialForm alpha, beta;
    int h = 0, k = 0;
};

struct ContactVerdict {
    bool valid = false;
    bool alpha_nilpotent = false;  // (dα)^{h+1} = 0
    bool beta_nilpotent = false;   // (dβ)^{k+1} = 0
    DifferentialForm top_form;     // α∧(dα)^h∧β∧(dβ)^k
    int samples = 0;
    std::uint64_t seed = 0;
    double min_abs_top = 0.0;
    std::vector<double> argmin;
};
ContactVerdict verify_contact_pair(const ContactPair& cp, int samples = 100, std::uint64_t seed = kDefaultSeed);

struct ReebPair {
    Eigen::VectorXd a, b;
};
/// Unique A, B with α(A)=1, β(A)=0, α(B)=0, β(B)=1 and vanishing contractions
/// with dα and dβ.  Throws RankDeficient.
ReebPair reeb_fields(const ContactPair& cp, std::span<const double> x);

/// Largest violation of the defining conditions of (A, B) at x.
double reeb_residual(const ContactPair& cp, const ReebPair& r, std::span<const double> x);

/// Ω = dα + c·α∧β, θ = c·β, validated.  Needs k = 0.
LcsStructure lcs_from_pair(const ContactPair& cp, const Rational& c,
                           const lcs::ValidationOptions& options = {});

/// Sampled size of the two summands of Ω^{h+1} = (dα)^{h+1} + (h+1)c·(dα)^h∧α∧β
/// and of det Ω, for one value of c.
struct DegeneracyProfile {
    Rational c;
    double min_abs_det = 0.0;
    double max_first_summand = 0.0;  // |(dα)^{h+1}|
    double min_second_summand = 0.0; // |(h+1)c (dα)^h∧α∧β|
};
DegeneracyProfile degeneracy_profile(const ContactPair& cp, const Rational& c, int samples = 100,
                                     std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Built-in representations of g(4,1)

struct Representation {
    int id = 0;
    Chart chart;
    std::array<VectorFieldExpr, 4> x;  // X1..X4
    std::array<DifferentialForm, 4> eta;  // η1..η4 as printed
    DifferentialForm omega_display;
    DifferentialForm theta;  // η4
};

/// Identifiers accepted by the CLI: "g41-rep1", "g41-rep2", "g41-rep4".
std::string builtin_id(int rep);
std::optional<int> representation_from_id(std::string_view id);
const std::array<int, 3>& representation_ids();

/// Cross-checked built-in data.  The first call verifies coframe duality and
/// that dη² + η²∧η⁴ equals the transcribed Ω, throwing std::logic_error on
/// mismatch.
const Representation& representation(int rep);

struct BracketEntry {
    int i = 0, j = 0;  // 1-based generator labels
    VectorFieldExpr value;
};

struct RepresentationCheck {
    bool duality = false;
    bool omega_matches = false;
    DifferentialForm omega_recomputed;
    /// [X_i, X_j] for i < j.
    std::vector<BracketEntry> brackets;
    /// [X1,X4] = X3, [X1,X3] = X2, all others zero.
    bool brackets_match_g41 = false;
    std::vector<std::string> bracket_mismatches;
    /// Same table in the basis (Y1..Y4) = (X3, X2, −X1, X4).
    bool brackets_match_g41_relabelled = false;
};
RepresentationCheck check_representation(const Representation& rep);

/// Validated lcs structure (Ω from the transcription, θ = η⁴).
const LcsStructure& builtin_structure(int rep);
/// Contact pair (η², η⁴), type (1, 0).
ContactPair builtin_pair(int rep);

/// The time-dependent field of the displayed Lie system: a1, a2, a3, a4
/// multiply X2, X1, X4, X3 respectively.
VectorFieldExpr lie_system_field(int rep, const std::array<ScalarExpr, 4>& a);
/// Σ a_i X_i with the generators in their listed order.
VectorFieldExpr generator_combination(int rep, const std::array<ScalarExpr, 4>& a);

struct AutomorphismVerdict {
    bool lie_zero = false;
    DifferentialForm lie;  // L_X Ω
    ScalarExpr theta_of_x;
    bool theta_of_x_is_one = false;
    /// L_X Ω = 0 and θ(X) = 1.
    bool compatible = false;
    forms::FormVerdict verdict;
};
AutomorphismVerdict verify_lcs_automorphism(const LcsStructure& s, const VectorFieldExpr& x);

}  // namespace lcsmech::contact
