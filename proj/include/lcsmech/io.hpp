#pragma once
// JSON descriptors for structures, sections and candidates; trajectory output.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lcsmech/canonical.hpp"
#include "lcsmech/dynamics.hpp"
#include "lcsmech/hamjac.hpp"

namespace lcsmech::io {

using Json = nlohmann::ordered_json;

/// Malformed input: bad JSON, missing keys, unparsable expressions.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inline JSON when the text starts with '{', '[' or '"'; otherwise a file
/// path if one exists; otherwise the text itself as a JSON string.
Json load_argument(const std::string& text);
Json parse_json(const std::string& text);

Json form_to_json(const forms::DifferentialForm& a);
/// {degree, terms:[{indices:[0-based], coeff:"expr" | number}]}
forms::DifferentialForm form_from_json(const Json& j, const Chart& chart, int expected_degree = -1);
expr::ScalarExpr expr_from_json(const Json& j, const Chart& chart, bool allow_time);

struct StructureDescriptor {
    enum class Kind { builtin, forms, cotangent };
    Kind kind = Kind::forms;
    std::string label;
    int builtin_rep = 0;
    Chart chart;
    forms::DifferentialForm omega, theta;
    int base_dim = 0;
    forms::DifferentialForm vartheta;
};
/// "g41-repN" | {builtin} | {coordinates, omega, theta} | {cotangent:{base_dim, vartheta}}
StructureDescriptor parse_structure(const Json& j);
/// Validated structure; throws the lcs errors.
lcs::LcsStructure build_structure(const StructureDescriptor& d, const lcs::ValidationOptions& options = {});

/// {components:["expr(t,q)", ...]} or a bare array.
hamjac::TimeSection parse_section(const Json& j, const Chart& base);

struct CandidateDescriptor {
    StructureDescriptor s1, s2;
    std::vector<std::string> map;
    std::optional<std::vector<std::string>> inverse;
    std::optional<std::string> k_f;
    std::optional<std::string> hamiltonian;
    /// "liouville" or {theta1: form, theta2: form}
    std::optional<Json> potentials;
};
/// {structure | structures:{s1, s2}, map, inverse?, K_F?, hamiltonian?, potentials?}
CandidateDescriptor parse_candidate(const Json& j);

/// Charts of the structures must already be built.
canonical::CanonicalCandidate build_candidate(const CandidateDescriptor& d, const lcs::LcsStructure& s1,
                                              const lcs::LcsStructure& s2);
std::optional<canonical::Potentials> build_potentials(const CandidateDescriptor& d, const lcs::LcsStructure& s1,
                                                      const lcs::LcsStructure& s2);

/// Shortest round-trip text of a double.
std::string number(double v);

void write_trajectory_csv(std::ostream& out, const dynamics::Trajectory& tr);
Json trajectory_to_json(const dynamics::Trajectory& tr);

Json verdict_to_json(const forms::FormVerdict& v);

}  // namespace lcsmech::io
