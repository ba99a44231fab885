#pragma once
// Differential forms and vector fields with symbolic coefficients on a chart.
//
// Coefficients may mention t even when the chart is not time-extended; t is
// then a parameter and d ignores it.  On a time-extended chart t is the last
// coordinate and d sees it.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcsmech/expr.hpp"

namespace lcsmech::forms {

using expr::ScalarExpr;

/// Strictly increasing coordinate indices (0-based).
using IndexTuple = std::vector<int>;

class ChartMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DifferentialForm {
public:
    DifferentialForm() = default;
    DifferentialForm(Chart chart, int degree);

    static DifferentialForm zero(const Chart& chart, int degree) { return {chart, degree}; }
    static DifferentialForm function(const Chart& chart, const ScalarExpr& f);
    /// dx_i.
    static DifferentialForm basis(const Chart& chart, int i);
    static DifferentialForm one_form(const Chart& chart, const std::vector<ScalarExpr>& coefficients);

    const Chart& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<IndexTuple, ScalarExpr>& terms() const { return terms_; }

    /// Coefficient on dx_{i1}∧...∧dx_{ik} for any index order (sign applied).
    ScalarExpr coefficient(IndexTuple indices) const;
    /// Adds c·dx_{i1}∧...∧dx_{ik}; indices in any order.
    void add_term(IndexTuple indices, const ScalarExpr& c);

    /// Value of a 0-form.
    ScalarExpr scalar() const { return coefficient({}); }
    /// Components of a 1-form, one per coordinate.
    std::vector<ScalarExpr> components() const;

    bool is_zero() const { return terms_.empty(); }
    bool depends_on(std::string_view var) const;

    DifferentialForm operator-() const;
    friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
    friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
    friend DifferentialForm operator*(const ScalarExpr& f, const DifferentialForm& a);

    std::string str() const;

private:
    Chart chart_;
    int degree_ = 0;
    std::map<IndexTuple, ScalarExpr> terms_;
};

class VectorFieldExpr {
public:
    VectorFieldExpr() = default;
    VectorFieldExpr(Chart chart, std::vector<ScalarExpr> components);

    static VectorFieldExpr zero(const Chart& chart);
    /// ∂/∂x_i.
    static VectorFieldExpr basis(const Chart& chart, int i);

    const Chart& chart() const { return chart_; }
    const std::vector<ScalarExpr>& components() const { return components_; }
    const ScalarExpr& operator[](int i) const { return components_.at(static_cast<std::size_t>(i)); }
    bool time_dependent() const;
    bool is_zero() const;

    friend VectorFieldExpr operator+(const VectorFieldExpr& a, const VectorFieldExpr& b);
    friend VectorFieldExpr operator-(const VectorFieldExpr& a, const VectorFieldExpr& b);
    friend VectorFieldExpr operator*(const ScalarExpr& f, const VectorFieldExpr& v);

    std::string str() const;

private:
    Chart chart_;
    std::vector<ScalarExpr> components_;
};

/// Map from a source chart to a target chart: one expression (over source
/// coordinates, and t) per target coordinate.
class ChartMap {
public:
    ChartMap() = default;
    ChartMap(Chart source, Chart target, std::vector<ScalarExpr> components);

    static ChartMap identity(const Chart& chart);

    const Chart& source() const { return source_; }
    const Chart& target() const { return target_; }
    const std::vector<ScalarExpr>& components() const { return components_; }

    /// J[i][j] = ∂φ^i/∂x^j, target rows by source columns.
    std::vector<std::vector<ScalarExpr>> jacobian() const;
    /// Substitution map target-name -> component.
    std::map<std::string, ScalarExpr, std::less<>> substitution() const;
    /// this ∘ inner.
    ChartMap compose(const ChartMap& inner) const;
    /// Both charts time-extended and the t component is exactly t.
    bool preserves_time() const;

    std::vector<double> apply(std::span<const double> x, std::optional<double> t = std::nullopt) const;

private:
    Chart source_, target_;
    std::vector<ScalarExpr> components_;
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_derivative(const DifferentialForm& a);
/// dβ − θ∧β.
DifferentialForm ldr_differential(const DifferentialForm& a, const DifferentialForm& theta);
/// Contraction in the first slot.
DifferentialForm interior_product(const VectorFieldExpr& x, const DifferentialForm& a);
DifferentialForm pullback(const ChartMap& phi, const DifferentialForm& a);
/// Cartan: d ι_X a + ι_X d a (X(f) on 0-forms).
DifferentialForm lie_derivative(const VectorFieldExpr& x, const DifferentialForm& a);
VectorFieldExpr bracket(const VectorFieldExpr& x, const VectorFieldExpr& y);
/// α(X) for a 1-form.
ScalarExpr pairing(const DifferentialForm& alpha, const VectorFieldExpr& x);

/// Same components on the time-extended chart (t appended last).
DifferentialForm lift(const DifferentialForm& a);
VectorFieldExpr lift(const VectorFieldExpr& v);
/// Drop every term involving dt, on the spatial chart.
DifferentialForm spatial_part(const DifferentialForm& a);
/// ι_{∂t} a restricted to the spatial chart.
DifferentialForm dt_component(const DifferentialForm& a);

// ---------------------------------------------------------------------------
// Equality

struct FormVerdict {
    bool equal = true;
    bool exact = true;  // every component decided on the exact path
    double max_difference = 0.0;
    std::optional<IndexTuple> first_mismatch;
    std::uint64_t seed = 0;
};

FormVerdict form_equal(const DifferentialForm& a, const DifferentialForm& b,
                       const expr::EqualityOptions& options = {});
FormVerdict field_equal(const VectorFieldExpr& a, const VectorFieldExpr& b,
                        const expr::EqualityOptions& options = {});

// ---------------------------------------------------------------------------
// Pointwise evaluation

/// Values of a form of any degree at a point, keyed by increasing tuple.
std::map<IndexTuple, double> evaluate_form(const DifferentialForm& a, std::span<const double> x,
                                           std::optional<double> t = std::nullopt);
Eigen::VectorXd covector_at(const DifferentialForm& alpha, std::span<const double> x,
                            std::optional<double> t = std::nullopt);
/// M[i][j] = a(∂i, ∂j).
Eigen::MatrixXd form_matrix_at(const DifferentialForm& a, std::span<const double> x,
                               std::optional<double> t = std::nullopt);
Eigen::VectorXd vector_at(const VectorFieldExpr& v, std::span<const double> x,
                          std::optional<double> t = std::nullopt);

/// Compiled evaluator for a list of expressions over chart coordinates and t.
class CompiledVector {
public:
    CompiledVector() = default;
    CompiledVector(const Chart& chart, const std::vector<ScalarExpr>& exprs);
    Eigen::VectorXd operator()(double t, std::span<const double> x) const;
    std::size_t size() const { return exprs_.size(); }

private:
    bool chart_has_time_ = false;
    std::vector<expr::CompiledExpr> exprs_;
};

/// Compiled evaluator for the matrix of a 2-form.
class CompiledMatrix {
public:
    CompiledMatrix() = default;
    explicit CompiledMatrix(const DifferentialForm& a);
    Eigen::MatrixXd operator()(double t, std::span<const double> x) const;

private:
    int n_ = 0;
    bool chart_has_time_ = false;
    std::vector<std::pair<std::pair<int, int>, expr::CompiledExpr>> entries_;
};

// ---------------------------------------------------------------------------
// Fields that are symbolic when possible, otherwise evaluated pointwise.

class TangentField {
public:
    using Evaluator = std::function<Eigen::VectorXd(double t, std::span<const double> x)>;

    TangentField() = default;
    static TangentField symbolic(VectorFieldExpr v);
    static TangentField pointwise(Chart chart, Evaluator f);

    const Chart& chart() const { return chart_; }
    bool is_symbolic() const { return symbolic_.has_value(); }
    const VectorFieldExpr& expr() const { return *symbolic_; }

    Eigen::VectorXd operator()(double t, std::span<const double> x) const { return eval_(t, x); }

private:
    Chart chart_;
    std::optional<VectorFieldExpr> symbolic_;
    Evaluator eval_;
};

}  // namespace lcsmech::forms
