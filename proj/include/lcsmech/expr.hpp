#pragma once
// Symbolic scalar expressions over a coordinate chart.
//
// A ScalarExpr is kept in a canonical form: a finite sum of monomials with
// exact rational coefficients, where each monomial is a product of integer
// powers of atoms.  Atoms are chart variables (or the time symbol t) and the
// unary functions sin, cos, exp, ln applied to a canonical argument.  A
// reciprocal of a non-monomial expression is carried as an opaque atom.
// On the polynomial subclass this representation is the unique normal form,
// so equality there is decided exactly.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace lcsmech {

using Rational = mpq_class;

/// Name of the time symbol accepted by expressions that allow time.
inline constexpr std::string_view kTimeSymbol = "t";

/// Ordered coordinate names of a chart.  Cheap to copy.
class Chart {
public:
    Chart() = default;
    explicit Chart(std::vector<std::string> coordinates);

    /// Cotangent chart (q1..qn, p1..pn) over an n-dimensional base.
    static Chart cotangent(int base_dim);
    /// Base chart (q1..qn) of cotangent(base_dim).
    static Chart cotangent_base(int base_dim);

    int dim() const { return impl_ ? static_cast<int>(impl_->names.size()) : 0; }
    const std::string& name(int i) const { return impl_->names.at(static_cast<std::size_t>(i)); }
    const std::vector<std::string>& names() const;
    std::optional<int> index_of(std::string_view name) const;

    bool is_cotangent() const { return impl_ && impl_->cotangent; }
    /// Number of base (q) coordinates of a cotangent chart.
    int base_dim() const { return is_cotangent() ? dim() / 2 : 0; }

    /// True when the chart carries t as an ordinary coordinate (the last one).
    bool is_time_extended() const { return impl_ && impl_->time_extended; }
    /// The chart with t appended as a coordinate.
    Chart time_extended() const;
    /// Index of t in a time-extended chart.
    int time_index() const;
    /// Chart with the trailing t removed.
    Chart spatial() const;

    friend bool operator==(const Chart& a, const Chart& b);

private:
    struct Impl {
        std::vector<std::string> names;
        bool cotangent = false;
        bool time_extended = false;
    };
    std::shared_ptr<const Impl> impl_;
};

namespace expr {

class ScalarExpr;

enum class AtomKind : std::uint8_t { variable, sin, cos, exp, ln, reciprocal };

/// Building block of a monomial.
struct Atom {
    AtomKind kind = AtomKind::variable;
    std::string name;                       // variable name (variable atoms only)
    std::shared_ptr<const ScalarExpr> arg;  // function argument (function atoms only)

    bool is_variable() const { return kind == AtomKind::variable; }
};

int compare(const Atom& a, const Atom& b);
inline bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }
inline bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }

/// Product of atom powers, sorted by atom with nonzero exponents.
using Monomial = std::vector<std::pair<Atom, int>>;

int compare(const Monomial& a, const Monomial& b);
struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

using TermMap = std::map<Monomial, Rational, MonomialLess>;

/// Immutable symbolic expression in canonical form.
class ScalarExpr {
public:
    ScalarExpr();  // zero
    ScalarExpr(long value);  // NOLINT(google-explicit-constructor)
    explicit ScalarExpr(const Rational& value);

    static ScalarExpr constant(const Rational& value) { return ScalarExpr(value); }
    static ScalarExpr variable(std::string name);
    static ScalarExpr from_terms(TermMap terms);

    const TermMap& terms() const { return *terms_; }

    bool is_zero() const { return terms_->empty(); }
    bool is_constant() const;
    /// Constant value when is_constant().
    std::optional<Rational> constant_value() const;
    /// Single monomial c * m (including constants).
    bool is_monomial() const { return terms_->size() == 1; }
    /// No function or reciprocal atoms anywhere (negative exponents allowed).
    bool is_laurent_polynomial() const;
    /// Polynomial subclass: Laurent polynomial with nonnegative exponents.
    bool is_polynomial() const;

    /// Free variable names, including those inside function arguments.
    std::set<std::string> variables() const;
    bool depends_on(std::string_view var) const;

    ScalarExpr operator-() const;
    friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
    ScalarExpr& operator+=(const ScalarExpr& o) { return *this = *this + o; }
    ScalarExpr& operator-=(const ScalarExpr& o) { return *this = *this - o; }
    ScalarExpr& operator*=(const ScalarExpr& o) { return *this = *this * o; }

    /// Structural identity of canonical forms.
    friend bool identical(const ScalarExpr& a, const ScalarExpr& b);

    /// Infix text in the parser grammar.
    std::string str() const;

private:
    std::shared_ptr<const TermMap> terms_;
};

int compare(const ScalarExpr& a, const ScalarExpr& b);

ScalarExpr pow(const ScalarExpr& base, int exponent);
ScalarExpr sin(const ScalarExpr& arg);
ScalarExpr cos(const ScalarExpr& arg);
ScalarExpr exp(const ScalarExpr& arg);
ScalarExpr ln(const ScalarExpr& arg);
/// Division by a nonzero constant.
ScalarExpr divide(const ScalarExpr& num, const Rational& den);

// ---------------------------------------------------------------------------
// Errors

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Operations

/// Parse infix text. Identifiers must be chart coordinates, or t when
/// allow_time is set.  Division is only by nonzero constants.
ScalarExpr parse(std::string_view source, const Chart& chart, bool allow_time);

/// Exact partial derivative with respect to a chart coordinate or t.
ScalarExpr differentiate(const ScalarExpr& e, std::string_view var);

/// Simultaneous substitution of variables by expressions.
ScalarExpr substitute(const ScalarExpr& e, const std::map<std::string, ScalarExpr, std::less<>>& replacement);

/// Numeric value with variables bound by name.  Throws EvaluationError on an
/// unbound variable or a domain error.
using Bindings = std::map<std::string, double, std::less<>>;
double evaluate(const ScalarExpr& e, const Bindings& values);
/// Numeric value at a chart point, with optional time.
double evaluate(const ScalarExpr& e, const Chart& chart, std::span<const double> x,
                std::optional<double> t = std::nullopt);

/// Exact value for a Laurent polynomial at rational inputs.
Rational evaluate_exact(const ScalarExpr& e, const std::map<std::string, Rational, std::less<>>& values);

/// Expression compiled against a fixed slot layout for repeated evaluation.
class CompiledExpr {
public:
    CompiledExpr() = default;
    /// Slots are `slots[i]`; unknown variables raise EvaluationError at compile time.
    CompiledExpr(const ScalarExpr& e, const std::vector<std::string>& slots);

    double operator()(std::span<const double> slot_values) const;

private:
    struct AtomCode {
        AtomKind kind;
        int slot = -1;
        std::shared_ptr<const CompiledExpr> arg;
    };
    struct TermCode {
        double coefficient;
        std::vector<std::pair<int, int>> powers;  // (atom index, exponent)
    };
    std::vector<AtomCode> atoms_;
    std::vector<TermCode> terms_;
};

/// Slot layout for a chart point followed by time: names..., t.
std::vector<std::string> chart_slots_with_time(const Chart& chart);

// ---------------------------------------------------------------------------
// Equality

enum class EqualityPath { exact, sampled };

struct EqualityOptions {
    int samples = 32;
    double tolerance = 1e-10;
    std::uint64_t seed = 1729;
};

struct EqualityVerdict {
    bool equal = false;
    EqualityPath path = EqualityPath::exact;
    double max_difference = 0.0;  // sampled path only
    int samples = 0;
    std::uint64_t seed = 0;
};

/// Exact on Laurent polynomials and whenever canonical forms coincide;
/// otherwise compares values at seeded random points in [-2, 2].
EqualityVerdict expr_equal(const ScalarExpr& a, const ScalarExpr& b, const EqualityOptions& options = {});

const char* to_string(EqualityPath path);

}  // namespace expr
}  // namespace lcsmech
