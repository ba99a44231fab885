#include "lcsmech/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lcsmech::forms {

namespace {

void require_same_chart(const Chart& a, const Chart& b, const char* what) {
    if (!(a == b)) throw ChartMismatch(std::string(what) + ": chart mismatch");
}

// Sorts in place; returns the permutation sign, or 0 on a repeated index.
int canonicalize(IndexTuple& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (idx[i - 1] == idx[i]) return 0;
    return sign;
}

}  // namespace

// ---------------------------------------------------------------------------
// DifferentialForm

DifferentialForm::DifferentialForm(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0) throw std::invalid_argument("negative form degree");
}

DifferentialForm DifferentialForm::function(const Chart& chart, const ScalarExpr& f) {
    DifferentialForm a(chart, 0);
    a.add_term({}, f);
    return a;
}

DifferentialForm DifferentialForm::basis(const Chart& chart, int i) {
    if (i < 0 || i >= chart.dim()) throw std::out_of_range("basis index out of range");
    DifferentialForm a(chart, 1);
    a.add_term({i}, ScalarExpr(1L));
    return a;
}

DifferentialForm DifferentialForm::one_form(const Chart& chart, const std::vector<ScalarExpr>& coefficients) {
    if (static_cast<int>(coefficients.size()) != chart.dim())
        throw std::invalid_argument("one-form needs one coefficient per coordinate");
    DifferentialForm a(chart, 1);
    for (int i = 0; i < chart.dim(); ++i) a.add_term({i}, coefficients[static_cast<std::size_t>(i)]);
    return a;
}

ScalarExpr DifferentialForm::coefficient(IndexTuple indices) const {
    if (static_cast<int>(indices.size()) != degree_) throw std::invalid_argument("index tuple length != degree");
    const int s = canonicalize(indices);
    if (s == 0) return {};
    auto it = terms_.find(indices);
    if (it == terms_.end()) return {};
    return s > 0 ? it->second : -it->second;
}

void DifferentialForm::add_term(IndexTuple indices, const ScalarExpr& c) {
    if (static_cast<int>(indices.size()) != degree_) throw std::invalid_argument("index tuple length != degree");
    for (int i : indices)
        if (i < 0 || i >= chart_.dim()) throw std::out_of_range("form index out of range");
    if (c.is_zero()) return;
    const int s = canonicalize(indices);
    if (s == 0) return;
    const ScalarExpr v = s > 0 ? c : -c;
    auto [it, inserted] = terms_.try_emplace(indices, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

std::vector<ScalarExpr> DifferentialForm::components() const {
    if (degree_ != 1) throw std::invalid_argument("components() needs a 1-form");
    std::vector<ScalarExpr> out(static_cast<std::size_t>(chart_.dim()));
    for (const auto& [idx, c] : terms_) out[static_cast<std::size_t>(idx[0])] = c;
    return out;
}

bool DifferentialForm::depends_on(std::string_view var) const {
    return std::any_of(terms_.begin(), terms_.end(), [&](const auto& kv) { return kv.second.depends_on(var); });
}

DifferentialForm DifferentialForm::operator-() const {
    DifferentialForm out(chart_, degree_);
    for (const auto& [idx, c] : terms_) out.terms_.emplace(idx, -c);
    return out;
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart_, b.chart_, "form sum");
    if (a.degree_ != b.degree_) throw std::invalid_argument("form sum: degree mismatch");
    DifferentialForm out = a;
    for (const auto& [idx, c] : b.terms_) out.add_term(idx, c);
    return out;
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) { return a + (-b); }

DifferentialForm operator*(const ScalarExpr& f, const DifferentialForm& a) {
    DifferentialForm out(a.chart_, a.degree_);
    for (const auto& [idx, c] : a.terms_) out.add_term(idx, f * c);
    return out;
}

std::string DifferentialForm::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [idx, c] : terms_) {
        if (!out.empty()) out += " + ";
        std::string basis;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k) basis += "^";
            basis += "d" + chart_.name(idx[k]);
        }
        if (idx.empty())
            out += "(" + c.str() + ")";
        else if (auto v = c.constant_value(); v && *v == 1)
            out += basis;
        else
            out += "(" + c.str() + ")*" + basis;
    }
    return out;
}

// ---------------------------------------------------------------------------
// VectorFieldExpr

VectorFieldExpr::VectorFieldExpr(Chart chart, std::vector<ScalarExpr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != chart_.dim())
        throw std::invalid_argument("vector field needs one component per coordinate");
}

VectorFieldExpr VectorFieldExpr::zero(const Chart& chart) {
    return {chart, std::vector<ScalarExpr>(static_cast<std::size_t>(chart.dim()))};
}

VectorFieldExpr VectorFieldExpr::basis(const Chart& chart, int i) {
    auto c = std::vector<ScalarExpr>(static_cast<std::size_t>(chart.dim()));
    c.at(static_cast<std::size_t>(i)) = ScalarExpr(1L);
    return {chart, std::move(c)};
}

bool VectorFieldExpr::time_dependent() const {
    if (chart_.is_time_extended()) return false;
    return std::any_of(components_.begin(), components_.end(),
                       [](const ScalarExpr& e) { return e.depends_on(kTimeSymbol); });
}

bool VectorFieldExpr::is_zero() const {
    return std::all_of(components_.begin(), components_.end(), [](const ScalarExpr& e) { return e.is_zero(); });
}

VectorFieldExpr operator+(const VectorFieldExpr& a, const VectorFieldExpr& b) {
    require_same_chart(a.chart_, b.chart_, "field sum");
    auto c = a.components_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.components_[i];
    return {a.chart_, std::move(c)};
}

VectorFieldExpr operator-(const VectorFieldExpr& a, const VectorFieldExpr& b) {
    require_same_chart(a.chart_, b.chart_, "field difference");
    auto c = a.components_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.components_[i];
    return {a.chart_, std::move(c)};
}

VectorFieldExpr operator*(const ScalarExpr& f, const VectorFieldExpr& v) {
    auto c = v.components_;
    for (auto& e : c) e = f * e;
    return {v.chart_, std::move(c)};
}

std::string VectorFieldExpr::str() const {
    std::string out;
    for (int i = 0; i < chart_.dim(); ++i) {
        const auto& c = components_[static_cast<std::size_t>(i)];
        if (c.is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + c.str() + ")*d/d" + chart_.name(i);
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// ChartMap

ChartMap::ChartMap(Chart source, Chart target, std::vector<ScalarExpr> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != target_.dim())
        throw std::invalid_argument("chart map needs one component per target coordinate");
}

ChartMap ChartMap::identity(const Chart& chart) {
    std::vector<ScalarExpr> c;
    for (const auto& n : chart.names()) c.push_back(ScalarExpr::variable(n));
    return {chart, chart, std::move(c)};
}

std::vector<std::vector<ScalarExpr>> ChartMap::jacobian() const {
    std::vector<std::vector<ScalarExpr>> j(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i)
        for (const auto& n : source_.names()) j[i].push_back(expr::differentiate(components_[i], n));
    return j;
}

std::map<std::string, ScalarExpr, std::less<>> ChartMap::substitution() const {
    std::map<std::string, ScalarExpr, std::less<>> s;
    for (int i = 0; i < target_.dim(); ++i) s.emplace(target_.name(i), components_[static_cast<std::size_t>(i)]);
    return s;
}

ChartMap ChartMap::compose(const ChartMap& inner) const {
    if (!(inner.target_ == source_)) throw ChartMismatch("compose: inner target is not outer source");
    const auto s = inner.substitution();
    std::vector<ScalarExpr> c;
    for (const auto& e : components_) c.push_back(expr::substitute(e, s));
    return {inner.source_, target_, std::move(c)};
}

bool ChartMap::preserves_time() const {
    if (!source_.is_time_extended() || !target_.is_time_extended()) return false;
    return identical(components_[static_cast<std::size_t>(target_.time_index())],
                     ScalarExpr::variable(std::string(kTimeSymbol)));
}

std::vector<double> ChartMap::apply(std::span<const double> x, std::optional<double> t) const {
    std::vector<double> y;
    for (const auto& e : components_) y.push_back(expr::evaluate(e, source_, x, t));
    return y;
}

// ---------------------------------------------------------------------------
// Operations

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart(), b.chart(), "wedge");
    DifferentialForm out(a.chart(), a.degree() + b.degree());
    if (a.degree() + b.degree() > a.chart().dim()) return out;
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            IndexTuple idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            out.add_term(std::move(idx), ca * cb);
        }
    return out;
}

DifferentialForm exterior_derivative(const DifferentialForm& a) {
    const Chart& chart = a.chart();
    DifferentialForm out(chart, a.degree() + 1);
    if (a.degree() >= chart.dim()) return out;
    for (const auto& [idx, c] : a.terms())
        for (int j = 0; j < chart.dim(); ++j) {
            if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
            ScalarExpr dc = expr::differentiate(c, chart.name(j));
            if (dc.is_zero()) continue;
            IndexTuple full{j};
            full.insert(full.end(), idx.begin(), idx.end());
            out.add_term(std::move(full), dc);
        }
    return out;
}

DifferentialForm ldr_differential(const DifferentialForm& a, const DifferentialForm& theta) {
    if (theta.degree() != 1) throw std::invalid_argument("ldr_differential: theta must be a 1-form");
    require_same_chart(a.chart(), theta.chart(), "ldr_differential");
    return exterior_derivative(a) - wedge(theta, a);
}

DifferentialForm interior_product(const VectorFieldExpr& x, const DifferentialForm& a) {
    if (a.degree() == 0) throw std::invalid_argument("interior_product: degree-0 input");
    require_same_chart(x.chart(), a.chart(), "interior_product");
    DifferentialForm out(a.chart(), a.degree() - 1);
    for (const auto& [idx, c] : a.terms())
        for (std::size_t p = 0; p < idx.size(); ++p) {
            const auto& xi = x[idx[p]];
            if (xi.is_zero()) continue;
            IndexTuple rest = idx;
            rest.erase(rest.begin() + static_cast<long>(p));
            out.add_term(std::move(rest), (p % 2 == 0 ? xi : -xi) * c);
        }
    return out;
}

DifferentialForm pullback(const ChartMap& phi, const DifferentialForm& a) {
    if (!(phi.target() == a.chart())) throw ChartMismatch("pullback: form chart is not the map target");
    const Chart& src = phi.source();
    const auto subs = phi.substitution();
    std::vector<std::optional<DifferentialForm>> dphi(static_cast<std::size_t>(a.chart().dim()));
    auto differential = [&](int i) -> const DifferentialForm& {
        auto& slot = dphi[static_cast<std::size_t>(i)];
        if (!slot) {
            DifferentialForm d(src, 1);
            for (int j = 0; j < src.dim(); ++j)
                d.add_term({j}, expr::differentiate(phi.components()[static_cast<std::size_t>(i)], src.name(j)));
            slot = std::move(d);
        }
        return *slot;
    };
    DifferentialForm out(src, a.degree());
    if (a.degree() > src.dim()) return out;
    for (const auto& [idx, c] : a.terms()) {
        DifferentialForm term = DifferentialForm::function(src, expr::substitute(c, subs));
        for (int i : idx) term = wedge(term, differential(i));
        out = out + term;
    }
    return out;
}

DifferentialForm lie_derivative(const VectorFieldExpr& x, const DifferentialForm& a) {
    DifferentialForm da = exterior_derivative(a);
    if (a.degree() == 0) return interior_product(x, da);
    DifferentialForm out = exterior_derivative(interior_product(x, a));
    if (a.degree() < a.chart().dim()) out = out + interior_product(x, da);
    return out;
}

VectorFieldExpr bracket(const VectorFieldExpr& x, const VectorFieldExpr& y) {
    require_same_chart(x.chart(), y.chart(), "bracket");
    const Chart& chart = x.chart();
    std::vector<ScalarExpr> c(static_cast<std::size_t>(chart.dim()));
    for (int i = 0; i < chart.dim(); ++i)
        for (int j = 0; j < chart.dim(); ++j) {
            const auto& n = chart.name(j);
            c[static_cast<std::size_t>(i)] += x[j] * expr::differentiate(y[i], n) - y[j] * expr::differentiate(x[i], n);
        }
    return {chart, std::move(c)};
}

ScalarExpr pairing(const DifferentialForm& alpha, const VectorFieldExpr& x) {
    if (alpha.degree() != 1) throw std::invalid_argument("pairing needs a 1-form");
    return interior_product(x, alpha).scalar();
}

DifferentialForm lift(const DifferentialForm& a) {
    if (a.chart().is_time_extended()) return a;
    DifferentialForm out(a.chart().time_extended(), a.degree());
    for (const auto& [idx, c] : a.terms()) out.add_term(idx, c);
    return out;
}

VectorFieldExpr lift(const VectorFieldExpr& v) {
    if (v.chart().is_time_extended()) return v;
    auto c = v.components();
    c.emplace_back();
    return {v.chart().time_extended(), std::move(c)};
}

DifferentialForm spatial_part(const DifferentialForm& a) {
    if (!a.chart().is_time_extended()) return a;
    const int ti = a.chart().time_index();
    DifferentialForm out(a.chart().spatial(), a.degree());
    for (const auto& [idx, c] : a.terms())
        if (std::find(idx.begin(), idx.end(), ti) == idx.end()) out.add_term(idx, c);
    return out;
}

DifferentialForm dt_component(const DifferentialForm& a) {
    if (!a.chart().is_time_extended()) throw std::invalid_argument("dt_component needs a time-extended chart");
    if (a.degree() == 0) throw std::invalid_argument("dt_component of a 0-form");
    return spatial_part(interior_product(VectorFieldExpr::basis(a.chart(), a.chart().time_index()), a));
}

// ---------------------------------------------------------------------------
// Equality

namespace {

void merge_verdict(FormVerdict& v, const expr::EqualityVerdict& e, const IndexTuple& where) {
    if (e.path == expr::EqualityPath::sampled) {
        v.exact = false;
        v.seed = e.seed;
        v.max_difference = std::max(v.max_difference, e.max_difference);
    }
    if (!e.equal) {
        v.equal = false;
        if (!v.first_mismatch) v.first_mismatch = where;
    }
}

}  // namespace

FormVerdict form_equal(const DifferentialForm& a, const DifferentialForm& b, const expr::EqualityOptions& options) {
    require_same_chart(a.chart(), b.chart(), "form_equal");
    if (a.degree() != b.degree()) throw std::invalid_argument("form_equal: degree mismatch");
    FormVerdict v;
    v.seed = options.seed;
    std::set<IndexTuple> keys;
    for (const auto& [k, c] : a.terms()) keys.insert(k);
    for (const auto& [k, c] : b.terms()) keys.insert(k);
    for (const auto& k : keys) merge_verdict(v, expr::expr_equal(a.coefficient(k), b.coefficient(k), options), k);
    return v;
}

FormVerdict field_equal(const VectorFieldExpr& a, const VectorFieldExpr& b, const expr::EqualityOptions& options) {
    require_same_chart(a.chart(), b.chart(), "field_equal");
    FormVerdict v;
    v.seed = options.seed;
    for (int i = 0; i < a.chart().dim(); ++i) merge_verdict(v, expr::expr_equal(a[i], b[i], options), {i});
    return v;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation

std::map<IndexTuple, double> evaluate_form(const DifferentialForm& a, std::span<const double> x,
                                           std::optional<double> t) {
    std::map<IndexTuple, double> out;
    for (const auto& [idx, c] : a.terms()) out.emplace(idx, expr::evaluate(c, a.chart(), x, t));
    return out;
}

Eigen::VectorXd covector_at(const DifferentialForm& alpha, std::span<const double> x, std::optional<double> t) {
    if (alpha.degree() != 1) throw std::invalid_argument("covector_at needs a 1-form");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(alpha.chart().dim());
    for (const auto& [idx, c] : alpha.terms()) v(idx[0]) = expr::evaluate(c, alpha.chart(), x, t);
    return v;
}

Eigen::MatrixXd form_matrix_at(const DifferentialForm& a, std::span<const double> x, std::optional<double> t) {
    if (a.degree() != 2) throw std::invalid_argument("form_matrix_at needs a 2-form");
    const int n = a.chart().dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [idx, c] : a.terms()) {
        const double v = expr::evaluate(c, a.chart(), x, t);
        m(idx[0], idx[1]) = v;
        m(idx[1], idx[0]) = -v;
    }
    return m;
}

Eigen::VectorXd vector_at(const VectorFieldExpr& v, std::span<const double> x, std::optional<double> t) {
    Eigen::VectorXd out(v.chart().dim());
    for (int i = 0; i < v.chart().dim(); ++i) out(i) = expr::evaluate(v[i], v.chart(), x, t);
    return out;
}

namespace {

// Slot buffer: chart coordinates, then t unless the chart already carries it.
struct SlotBuffer {
    double small[17];
    std::vector<double> big;
    std::span<const double> fill(std::span<const double> x, double t, bool chart_has_time) {
        const std::size_t n = x.size() + (chart_has_time ? 0 : 1);
        double* p = small;
        if (n > 17) {
            big.resize(n);
            p = big.data();
        }
        std::copy(x.begin(), x.end(), p);
        if (!chart_has_time) p[x.size()] = t;
        return {p, n};
    }
};

}  // namespace

CompiledVector::CompiledVector(const Chart& chart, const std::vector<ScalarExpr>& exprs)
    : chart_has_time_(chart.is_time_extended()) {
    const auto slots = expr::chart_slots_with_time(chart);
    for (const auto& e : exprs) exprs_.emplace_back(e, slots);
}

Eigen::VectorXd CompiledVector::operator()(double t, std::span<const double> x) const {
    SlotBuffer buf;
    const auto slots = buf.fill(x, t, chart_has_time_);
    Eigen::VectorXd out(static_cast<Eigen::Index>(exprs_.size()));
    for (std::size_t i = 0; i < exprs_.size(); ++i) out(static_cast<Eigen::Index>(i)) = exprs_[i](slots);
    return out;
}

CompiledMatrix::CompiledMatrix(const DifferentialForm& a)
    : n_(a.chart().dim()), chart_has_time_(a.chart().is_time_extended()) {
    if (a.degree() != 2) throw std::invalid_argument("CompiledMatrix needs a 2-form");
    const auto slots = expr::chart_slots_with_time(a.chart());
    for (const auto& [idx, c] : a.terms()) entries_.emplace_back(std::pair{idx[0], idx[1]}, expr::CompiledExpr(c, slots));
}

Eigen::MatrixXd CompiledMatrix::operator()(double t, std::span<const double> x) const {
    SlotBuffer buf;
    const auto slots = buf.fill(x, t, chart_has_time_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& [ij, e] : entries_) {
        const double v = e(slots);
        m(ij.first, ij.second) = v;
        m(ij.second, ij.first) = -v;
    }
    return m;
}

// ---------------------------------------------------------------------------
// TangentField

TangentField TangentField::symbolic(VectorFieldExpr v) {
    TangentField f;
    f.chart_ = v.chart();
    auto compiled = std::make_shared<CompiledVector>(v.chart(), v.components());
    f.eval_ = [compiled](double t, std::span<const double> x) { return (*compiled)(t, x); };
    f.symbolic_ = std::move(v);
    return f;
}

TangentField TangentField::pointwise(Chart chart, Evaluator eval) {
    TangentField f;
    f.chart_ = std::move(chart);
    f.eval_ = std::move(eval);
    return f;
}

}  // namespace lcsmech::forms
