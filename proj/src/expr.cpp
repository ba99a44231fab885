#include "lcsmech/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "lcsmech/sampling.hpp"

namespace lcsmech {

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(std::vector<std::string> coordinates) {
    if (coordinates.empty()) throw std::invalid_argument("chart must have at least one coordinate");
    std::set<std::string> seen;
    for (const auto& n : coordinates) {
        if (n.empty()) throw std::invalid_argument("empty coordinate name");
        if (n == kTimeSymbol) throw std::invalid_argument("'t' is reserved for time; use time_extended()");
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate coordinate name '" + n + "'");
    }
    auto impl = std::make_shared<Impl>();
    impl->names = std::move(coordinates);
    impl_ = std::move(impl);
}

Chart Chart::cotangent(int base_dim) {
    if (base_dim <= 0) throw std::invalid_argument("cotangent chart needs a positive base dimension");
    std::vector<std::string> names;
    for (int i = 1; i <= base_dim; ++i) names.push_back("q" + std::to_string(i));
    for (int i = 1; i <= base_dim; ++i) names.push_back("p" + std::to_string(i));
    Chart c(std::move(names));
    auto impl = std::make_shared<Impl>(*c.impl_);
    impl->cotangent = true;
    c.impl_ = std::move(impl);
    return c;
}

Chart Chart::cotangent_base(int base_dim) {
    if (base_dim <= 0) throw std::invalid_argument("base dimension must be positive");
    std::vector<std::string> names;
    for (int i = 1; i <= base_dim; ++i) names.push_back("q" + std::to_string(i));
    return Chart(std::move(names));
}

const std::vector<std::string>& Chart::names() const {
    static const std::vector<std::string> empty;
    return impl_ ? impl_->names : empty;
}

std::optional<int> Chart::index_of(std::string_view name) const {
    if (!impl_) return std::nullopt;
    const auto& v = impl_->names;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

Chart Chart::time_extended() const {
    if (!impl_) throw std::logic_error("empty chart");
    if (impl_->time_extended) return *this;
    auto impl = std::make_shared<Impl>(*impl_);
    impl->names.emplace_back(kTimeSymbol);
    impl->time_extended = true;
    Chart c;
    c.impl_ = std::move(impl);
    return c;
}

int Chart::time_index() const {
    if (!is_time_extended()) throw std::logic_error("chart is not time-extended");
    return dim() - 1;
}

Chart Chart::spatial() const {
    if (!is_time_extended()) return *this;
    auto impl = std::make_shared<Impl>(*impl_);
    impl->names.pop_back();
    impl->time_extended = false;
    Chart c;
    c.impl_ = std::move(impl);
    return c;
}

bool operator==(const Chart& a, const Chart& b) {
    if (a.impl_ == b.impl_) return true;
    if (!a.impl_ || !b.impl_) return false;
    return a.impl_->names == b.impl_->names && a.impl_->cotangent == b.impl_->cotangent &&
           a.impl_->time_extended == b.impl_->time_extended;
}

namespace expr {

// ---------------------------------------------------------------------------
// Ordering

namespace {

// q2 < q10: compare alphabetic prefix, then numeric suffix.
int natural_compare(const std::string& a, const std::string& b) {
    auto split = [](const std::string& s) {
        std::size_t k = s.size();
        while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
        return k;
    };
    const std::size_t ka = split(a), kb = split(b);
    const int c = a.compare(0, ka, b, 0, kb);
    if (c != 0) return c < 0 ? -1 : 1;
    const std::string sa = a.substr(ka), sb = b.substr(kb);
    if (sa.size() != sb.size()) return sa.size() < sb.size() ? -1 : 1;
    const int d = sa.compare(sb);
    return d < 0 ? -1 : (d > 0 ? 1 : 0);
}

long total_degree(const Monomial& m) {
    long d = 0;
    for (const auto& [a, e] : m) d += e;
    return d;
}

}  // namespace

int compare(const ScalarExpr& a, const ScalarExpr& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    auto ia = ta.begin();
    auto ib = tb.begin();
    for (; ia != ta.end() && ib != tb.end(); ++ia, ++ib) {
        if (int c = compare(ia->first, ib->first)) return c;
        if (int c = cmp(ia->second, ib->second)) return c < 0 ? -1 : 1;
    }
    if (ia == ta.end() && ib == tb.end()) return 0;
    return ia == ta.end() ? -1 : 1;
}

int compare(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    if (a.kind == AtomKind::variable) return natural_compare(a.name, b.name);
    return compare(*a.arg, *b.arg);
}

int compare(const Monomial& a, const Monomial& b) {
    const long da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(a[i].first, b[i].first)) return c;
        if (a[i].second != b[i].second) return a[i].second < b[i].second ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

// ---------------------------------------------------------------------------
// ScalarExpr basics

namespace {

std::shared_ptr<const TermMap> empty_terms() {
    static const auto empty = std::make_shared<const TermMap>();
    return empty;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            const int e = a[i].second + b[j].second;
            if (e != 0) out.emplace_back(a[i].first, e);
            ++i;
            ++j;
        }
    }
    return out;
}

void accumulate(TermMap& into, const Monomial& m, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = into.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (sgn(it->second) == 0) into.erase(it);
    }
}

ScalarExpr atom_expr(Atom atom, int exponent = 1) {
    TermMap t;
    t.emplace(Monomial{{std::move(atom), exponent}}, Rational(1));
    return ScalarExpr::from_terms(std::move(t));
}

ScalarExpr function_atom(AtomKind kind, const ScalarExpr& arg) {
    Atom a;
    a.kind = kind;
    a.arg = std::make_shared<const ScalarExpr>(arg);
    return atom_expr(std::move(a));
}

}  // namespace

ScalarExpr::ScalarExpr() : terms_(empty_terms()) {}

ScalarExpr::ScalarExpr(long value) : ScalarExpr(Rational(value)) {}

ScalarExpr::ScalarExpr(const Rational& value) {
    if (sgn(value) == 0) {
        terms_ = empty_terms();
    } else {
        auto t = std::make_shared<TermMap>();
        t->emplace(Monomial{}, value);
        terms_ = std::move(t);
    }
}

ScalarExpr ScalarExpr::variable(std::string name) {
    Atom a;
    a.kind = AtomKind::variable;
    a.name = std::move(name);
    return atom_expr(std::move(a));
}

ScalarExpr ScalarExpr::from_terms(TermMap terms) {
    for (auto it = terms.begin(); it != terms.end();) {
        if (sgn(it->second) == 0)
            it = terms.erase(it);
        else
            ++it;
    }
    ScalarExpr e;
    if (!terms.empty()) e.terms_ = std::make_shared<const TermMap>(std::move(terms));
    return e;
}

bool ScalarExpr::is_constant() const {
    return terms_->empty() || (terms_->size() == 1 && terms_->begin()->first.empty());
}

std::optional<Rational> ScalarExpr::constant_value() const {
    if (terms_->empty()) return Rational(0);
    if (is_constant()) return terms_->begin()->second;
    return std::nullopt;
}

bool ScalarExpr::is_laurent_polynomial() const {
    for (const auto& [m, c] : *terms_)
        for (const auto& [a, e] : m)
            if (!a.is_variable()) return false;
    return true;
}

bool ScalarExpr::is_polynomial() const {
    for (const auto& [m, c] : *terms_)
        for (const auto& [a, e] : m)
            if (!a.is_variable() || e < 0) return false;
    return true;
}

std::set<std::string> ScalarExpr::variables() const {
    std::set<std::string> out;
    for (const auto& [m, c] : *terms_)
        for (const auto& [a, e] : m) {
            if (a.is_variable())
                out.insert(a.name);
            else
                out.merge(a.arg->variables());
        }
    return out;
}

bool ScalarExpr::depends_on(std::string_view var) const {
    for (const auto& [m, c] : *terms_)
        for (const auto& [a, e] : m) {
            if (a.is_variable() ? a.name == var : a.arg->depends_on(var)) return true;
        }
    return false;
}

ScalarExpr ScalarExpr::operator-() const {
    TermMap t = *terms_;
    for (auto& [m, c] : t) c = -c;
    return from_terms(std::move(t));
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    TermMap t = a.terms();
    for (const auto& [m, c] : b.terms()) accumulate(t, m, c);
    return ScalarExpr::from_terms(std::move(t));
}

ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return a + (-b); }

ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.is_zero() || b.is_zero()) return {};
    TermMap t;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) accumulate(t, multiply(ma, mb), ca * cb);
    return ScalarExpr::from_terms(std::move(t));
}

bool identical(const ScalarExpr& a, const ScalarExpr& b) {
    return a.terms_ == b.terms_ || compare(a, b) == 0;
}

ScalarExpr pow(const ScalarExpr& base, int exponent) {
    if (exponent == 0) return ScalarExpr(1L);
    if (exponent == 1) return base;
    if (exponent < 0) {
        if (base.is_zero()) throw EvaluationError("negative power of zero");
        if (base.is_monomial()) {
            const auto& [m, c] = *base.terms().begin();
            Monomial inv = m;
            for (auto& [a, e] : inv) e = -e;
            Rational ci = 1 / c;
            TermMap t;
            t.emplace(std::move(inv), ci);
            return pow(ScalarExpr::from_terms(std::move(t)), -exponent);
        }
        Atom a;
        a.kind = AtomKind::reciprocal;
        a.arg = std::make_shared<const ScalarExpr>(base);
        return atom_expr(std::move(a), -exponent);
    }
    // Monomials: scale exponents directly.
    if (base.is_monomial()) {
        const auto& [m, c] = *base.terms().begin();
        Monomial pm = m;
        for (auto& [a, e] : pm) e *= exponent;
        Rational pc(1);
        for (int i = 0; i < exponent; ++i) pc *= c;
        TermMap t;
        t.emplace(std::move(pm), pc);
        return ScalarExpr::from_terms(std::move(t));
    }
    ScalarExpr result(1L), b = base;
    int k = exponent;
    while (k > 0) {
        if (k & 1) result = result * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return result;
}

ScalarExpr sin(const ScalarExpr& arg) {
    if (arg.is_zero()) return {};
    return function_atom(AtomKind::sin, arg);
}

ScalarExpr cos(const ScalarExpr& arg) {
    if (arg.is_zero()) return ScalarExpr(1L);
    return function_atom(AtomKind::cos, arg);
}

ScalarExpr exp(const ScalarExpr& arg) {
    if (arg.is_zero()) return ScalarExpr(1L);
    return function_atom(AtomKind::exp, arg);
}

ScalarExpr ln(const ScalarExpr& arg) {
    if (auto c = arg.constant_value(); c && *c == 1) return {};
    return function_atom(AtomKind::ln, arg);
}

ScalarExpr divide(const ScalarExpr& num, const Rational& den) {
    if (sgn(den) == 0) throw EvaluationError("division by zero");
    return num * ScalarExpr(Rational(1) / den);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string rational_str(const Rational& r) {
    return r.get_str();
}

std::string atom_str(const Atom& a) {
    switch (a.kind) {
        case AtomKind::variable: return a.name;
        case AtomKind::sin: return "sin(" + a.arg->str() + ")";
        case AtomKind::cos: return "cos(" + a.arg->str() + ")";
        case AtomKind::exp: return "exp(" + a.arg->str() + ")";
        case AtomKind::ln: return "ln(" + a.arg->str() + ")";
        case AtomKind::reciprocal: return "(" + a.arg->str() + ")";
    }
    return "?";
}

std::string factor_str(const Atom& a, int e) {
    if (a.kind == AtomKind::reciprocal) return atom_str(a) + "^(" + std::to_string(-e) + ")";
    if (e == 1) return atom_str(a);
    if (e < 0) return atom_str(a) + "^(" + std::to_string(e) + ")";
    return atom_str(a) + "^" + std::to_string(e);
}

}  // namespace

std::string ScalarExpr::str() const {
    if (terms_->empty()) return "0";
    std::string out;
    bool first = true;
    // Highest degree first.
    for (auto it = terms_->rbegin(); it != terms_->rend(); ++it) {
        const auto& [m, c] = *it;
        const bool negative = sgn(c) < 0;
        Rational mag = negative ? Rational(-c) : c;
        if (first)
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        first = false;
        std::string body;
        if (m.empty()) {
            body = rational_str(mag);
        } else {
            if (mag != 1) body = rational_str(mag) + "*";
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i) body += "*";
                body += factor_str(m[i].first, m[i].second);
            }
        }
        out += body;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + what),
      position_(position) {}

namespace {

class Parser {
public:
    Parser(std::string_view src, const Chart& chart, bool allow_time)
        : src_(src), chart_(chart), allow_time_(allow_time) {}

    ScalarExpr run() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        ScalarExpr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    ScalarExpr parse_sum() {
        ScalarExpr e = parse_product();
        for (;;) {
            if (accept('+'))
                e = e + parse_product();
            else if (accept('-'))
                e = e - parse_product();
            else
                return e;
        }
    }

    ScalarExpr parse_product() {
        ScalarExpr e = parse_unary();
        for (;;) {
            if (accept('*')) {
                e = e * parse_unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                ScalarExpr d = parse_unary();
                auto c = d.constant_value();
                if (!c) throw ParseError("division by a non-constant expression (write it as a power with exponent -1)", at);
                if (sgn(*c) == 0) throw ParseError("division by zero", at);
                e = divide(e, *c);
            } else {
                return e;
            }
        }
    }

    ScalarExpr parse_unary() {
        if (accept('-')) return -parse_unary();
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    ScalarExpr parse_power() {
        ScalarExpr base = parse_primary();
        if (accept('^')) {
            const std::size_t at = pos_;
            ScalarExpr ex = parse_unary();
            auto c = ex.constant_value();
            if (!c || c->get_den() != 1 || !c->get_num().fits_sint_p())
                throw ParseError("exponent must be an integer constant", at);
            const long k = c->get_num().get_si();
            if (k > 64 || k < -64) throw ParseError("exponent out of range", at);
            try {
                return pow(base, static_cast<int>(k));
            } catch (const EvaluationError& err) {
                throw ParseError(err.what(), at);
            }
        }
        return base;
    }

    ScalarExpr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ScalarExpr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    ScalarExpr parse_number() {
        const std::size_t start = pos_;
        std::string digits;
        long frac_digits = 0;
        bool seen_dot = false;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                if (seen_dot) ++frac_digits;
                ++pos_;
            } else if (c == '.' && !seen_dot) {
                seen_dot = true;
                ++pos_;
            } else {
                break;
            }
        }
        if (digits.empty()) throw ParseError("malformed number", start);
        long exponent = 0;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            int sign = 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) {
                if (src_[p] == '-') sign = -1;
                ++p;
            }
            std::string ed;
            while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ed += src_[p++];
            if (!ed.empty()) {
                if (ed.size() > 4) throw ParseError("number exponent out of range", pos_);
                exponent = sign * std::stol(ed);
                pos_ = p;
            }
        }
        mpz_class num(digits, 10);
        const long scale = exponent - frac_digits;
        mpz_class ten_pow;
        mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
        Rational r = scale >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
        r.canonicalize();
        return ScalarExpr(r);
    }

    ScalarExpr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        skip_ws();
        const bool call = pos_ < src_.size() && src_[pos_] == '(';
        if (call) {
            using Fn = ScalarExpr (*)(const ScalarExpr&);
            Fn fn = nullptr;
            if (name == "sin") fn = &expr::sin;
            else if (name == "cos") fn = &expr::cos;
            else if (name == "exp") fn = &expr::exp;
            else if (name == "ln" || name == "log") fn = &expr::ln;
            if (!fn) throw ParseError("unknown function '" + name + "'", start);
            ++pos_;
            ScalarExpr arg = parse_sum();
            expect(')');
            return fn(arg);
        }
        if (chart_.index_of(name)) return ScalarExpr::variable(name);
        if (name == kTimeSymbol) {
            if (!allow_time_) throw ParseError("time symbol 't' is not allowed here", start);
            return ScalarExpr::variable(name);
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }

    std::string_view src_;
    const Chart& chart_;
    bool allow_time_;
    std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr parse(std::string_view source, const Chart& chart, bool allow_time) {
    return Parser(source, chart, allow_time).run();
}

// ---------------------------------------------------------------------------
// Differentiation and substitution

namespace {

ScalarExpr monomial_expr(const Monomial& m, const Rational& c) {
    TermMap t;
    t.emplace(m, c);
    return ScalarExpr::from_terms(std::move(t));
}

ScalarExpr atom_derivative(const Atom& a, std::string_view var) {
    switch (a.kind) {
        case AtomKind::variable: return a.name == var ? ScalarExpr(1L) : ScalarExpr();
        case AtomKind::sin: return expr::cos(*a.arg) * differentiate(*a.arg, var);
        case AtomKind::cos: return -(expr::sin(*a.arg) * differentiate(*a.arg, var));
        case AtomKind::exp: return expr::exp(*a.arg) * differentiate(*a.arg, var);
        case AtomKind::ln: return pow(*a.arg, -1) * differentiate(*a.arg, var);
        case AtomKind::reciprocal: {
            // d(1/u) = -u^-2 du
            Atom self = a;
            return -(atom_expr(std::move(self), 2) * differentiate(*a.arg, var));
        }
    }
    return {};
}

bool atom_depends_on(const Atom& a, std::string_view var) {
    return a.is_variable() ? a.name == var : a.arg->depends_on(var);
}

}  // namespace

ScalarExpr differentiate(const ScalarExpr& e, std::string_view var) {
    ScalarExpr out;
    for (const auto& [m, c] : e.terms()) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto& [atom, k] = m[i];
            if (!atom_depends_on(atom, var)) continue;
            Monomial rest = m;
            if (k == 1)
                rest.erase(rest.begin() + static_cast<long>(i));
            else
                rest[i].second = k - 1;
            out += monomial_expr(rest, c * k) * atom_derivative(atom, var);
        }
    }
    return out;
}

ScalarExpr substitute(const ScalarExpr& e, const std::map<std::string, ScalarExpr, std::less<>>& replacement) {
    ScalarExpr out;
    for (const auto& [m, c] : e.terms()) {
        ScalarExpr term(c);
        for (const auto& [atom, k] : m) {
            ScalarExpr base;
            switch (atom.kind) {
                case AtomKind::variable: {
                    auto it = replacement.find(atom.name);
                    base = it != replacement.end() ? it->second : ScalarExpr::variable(atom.name);
                    break;
                }
                case AtomKind::sin: base = expr::sin(substitute(*atom.arg, replacement)); break;
                case AtomKind::cos: base = expr::cos(substitute(*atom.arg, replacement)); break;
                case AtomKind::exp: base = expr::exp(substitute(*atom.arg, replacement)); break;
                case AtomKind::ln: base = expr::ln(substitute(*atom.arg, replacement)); break;
                case AtomKind::reciprocal: base = pow(substitute(*atom.arg, replacement), -1); break;
            }
            term = term * pow(base, k);
        }
        out += term;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double int_power(double x, int k) {
    if (k < 0) {
        if (x == 0.0) throw EvaluationError("division by zero during evaluation");
        return 1.0 / int_power(x, -k);
    }
    double r = 1.0;
    double b = x;
    while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

double apply_function(AtomKind kind, double v) {
    switch (kind) {
        case AtomKind::sin: return std::sin(v);
        case AtomKind::cos: return std::cos(v);
        case AtomKind::exp: return std::exp(v);
        case AtomKind::ln:
            if (!(v > 0.0)) throw EvaluationError("ln of a nonpositive value");
            return std::log(v);
        case AtomKind::reciprocal:
            if (v == 0.0) throw EvaluationError("division by zero during evaluation");
            return 1.0 / v;
        case AtomKind::variable: break;
    }
    return v;
}

template <class Lookup>
double evaluate_with(const ScalarExpr& e, const Lookup& lookup) {
    double sum = 0.0;
    for (const auto& [m, c] : e.terms()) {
        double term = c.get_d();
        for (const auto& [atom, k] : m) {
            const double v = atom.is_variable() ? lookup(atom.name)
                                                : apply_function(atom.kind, evaluate_with(*atom.arg, lookup));
            term *= int_power(v, k);
        }
        sum += term;
    }
    return sum;
}

}  // namespace

double evaluate(const ScalarExpr& e, const Bindings& values) {
    return evaluate_with(e, [&](const std::string& name) {
        auto it = values.find(name);
        if (it == values.end()) throw EvaluationError("unbound variable '" + name + "'");
        return it->second;
    });
}

double evaluate(const ScalarExpr& e, const Chart& chart, std::span<const double> x, std::optional<double> t) {
    if (static_cast<int>(x.size()) != chart.dim()) throw EvaluationError("point dimension does not match chart");
    return evaluate_with(e, [&](const std::string& name) {
        if (auto i = chart.index_of(name)) return x[static_cast<std::size_t>(*i)];
        if (name == kTimeSymbol && t) return *t;
        throw EvaluationError("unbound variable '" + name + "'");
    });
}

Rational evaluate_exact(const ScalarExpr& e, const std::map<std::string, Rational, std::less<>>& values) {
    if (!e.is_laurent_polynomial()) throw EvaluationError("exact evaluation needs a polynomial expression");
    Rational sum(0);
    for (const auto& [m, c] : e.terms()) {
        Rational term = c;
        for (const auto& [atom, k] : m) {
            auto it = values.find(atom.name);
            if (it == values.end()) throw EvaluationError("unbound variable '" + atom.name + "'");
            if (k < 0 && sgn(it->second) == 0) throw EvaluationError("division by zero during evaluation");
            Rational base = k < 0 ? Rational(1 / it->second) : it->second;
            for (int i = 0; i < std::abs(k); ++i) term *= base;
        }
        sum += term;
    }
    return sum;
}

CompiledExpr::CompiledExpr(const ScalarExpr& e, const std::vector<std::string>& slots) {
    std::map<Atom, int> index;
    for (const auto& [m, c] : e.terms()) {
        TermCode tc;
        tc.coefficient = c.get_d();
        for (const auto& [atom, k] : m) {
            auto [it, inserted] = index.try_emplace(atom, static_cast<int>(atoms_.size()));
            if (inserted) {
                AtomCode ac{atom.kind, -1, nullptr};
                if (atom.is_variable()) {
                    auto s = std::find(slots.begin(), slots.end(), atom.name);
                    if (s == slots.end()) throw EvaluationError("unbound variable '" + atom.name + "'");
                    ac.slot = static_cast<int>(s - slots.begin());
                } else {
                    ac.arg = std::make_shared<const CompiledExpr>(*atom.arg, slots);
                }
                atoms_.push_back(std::move(ac));
            }
            tc.powers.emplace_back(it->second, k);
        }
        terms_.push_back(std::move(tc));
    }
}

double CompiledExpr::operator()(std::span<const double> slot_values) const {
    double stack_buf[16];
    std::vector<double> heap_buf;
    double* vals = stack_buf;
    if (atoms_.size() > 16) {
        heap_buf.resize(atoms_.size());
        vals = heap_buf.data();
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto& a = atoms_[i];
        vals[i] = a.kind == AtomKind::variable ? slot_values[static_cast<std::size_t>(a.slot)]
                                               : apply_function(a.kind, (*a.arg)(slot_values));
    }
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coefficient;
        for (const auto& [ai, k] : t.powers) v *= int_power(vals[ai], k);
        sum += v;
    }
    return sum;
}

std::vector<std::string> chart_slots_with_time(const Chart& chart) {
    std::vector<std::string> slots = chart.names();
    if (!chart.is_time_extended()) slots.emplace_back(kTimeSymbol);
    return slots;
}

// ---------------------------------------------------------------------------
// Equality

const char* to_string(EqualityPath path) { return path == EqualityPath::exact ? "exact" : "sampled"; }

EqualityVerdict expr_equal(const ScalarExpr& a, const ScalarExpr& b, const EqualityOptions& options) {
    EqualityVerdict v;
    const ScalarExpr diff = a - b;
    if (diff.is_zero()) {
        v.equal = true;
        return v;
    }
    if (diff.is_laurent_polynomial()) {
        v.equal = false;
        return v;
    }
    v.path = EqualityPath::sampled;
    v.seed = options.seed;
    std::set<std::string> vars = a.variables();
    vars.merge(b.variables());
    const std::vector<std::string> slots(vars.begin(), vars.end());
    const CompiledExpr ca(a, slots), cb(b, slots);
    Sampler sampler(options.seed);
    std::vector<double> x(slots.size());
    int valid = 0;
    bool all_close = true;
    for (int attempt = 0; attempt < options.samples * 10 && valid < options.samples; ++attempt) {
        for (auto& xi : x) xi = sampler.uniform();
        double va = 0, vb = 0;
        try {
            va = ca(x);
            vb = cb(x);
        } catch (const EvaluationError&) {
            continue;
        }
        if (!std::isfinite(va) || !std::isfinite(vb)) continue;
        ++valid;
        const double d = std::abs(va - vb);
        v.max_difference = std::max(v.max_difference, d);
        if (d > options.tolerance * std::max({1.0, std::abs(va), std::abs(vb)})) all_close = false;
    }
    v.samples = valid;
    v.equal = all_close && valid > 0;
    return v;
}

}  // namespace expr
}  // namespace lcsmech
