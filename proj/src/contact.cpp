#include "lcsmech/contact.hpp"

#include <cmath>
#include <limits>
#include <mutex>

namespace lcsmech::contact {

namespace {

DifferentialForm wedge_power(const DifferentialForm& a, int k) {
    DifferentialForm out = DifferentialForm::function(a.chart(), ScalarExpr(1L));
    for (int i = 0; i < k; ++i) out = forms::wedge(out, a);
    return out;
}

bool is_zero_form(const DifferentialForm& a) {
    return forms::form_equal(a, DifferentialForm::zero(a.chart(), a.degree())).equal;
}

// Largest |coefficient| of a form at x.
double max_abs(const DifferentialForm& a, std::span<const double> x) {
    double m = 0.0;
    for (const auto& [idx, v] : forms::evaluate_form(a, x)) m = std::max(m, std::abs(v));
    return m;
}

void check_dimension(const ContactPair& cp) {
    if (cp.alpha.degree() != 1 || cp.beta.degree() != 1) throw std::invalid_argument("contact pair needs 1-forms");
    if (!(cp.alpha.chart() == cp.beta.chart())) throw forms::ChartMismatch("contact pair: chart mismatch");
    if (cp.h < 0 || cp.k < 0) throw std::invalid_argument("contact pair type must be nonnegative");
    if (cp.alpha.chart().dim() != 2 * cp.h + 2 * cp.k + 2)
        throw std::invalid_argument("contact pair: chart dimension must be 2h+2k+2");
}

}  // namespace

ContactVerdict verify_contact_pair(const ContactPair& cp, int samples, std::uint64_t seed) {
    check_dimension(cp);
    ContactVerdict v;
    v.seed = seed;
    const DifferentialForm da = forms::exterior_derivative(cp.alpha);
    const DifferentialForm db = forms::exterior_derivative(cp.beta);
    v.alpha_nilpotent = is_zero_form(wedge_power(da, cp.h + 1));
    v.beta_nilpotent = is_zero_form(wedge_power(db, cp.k + 1));
    v.top_form = forms::wedge(forms::wedge(cp.alpha, wedge_power(da, cp.h)),
                              forms::wedge(cp.beta, wedge_power(db, cp.k)));
    const int n = cp.alpha.chart().dim();
    forms::IndexTuple all;
    for (int i = 0; i < n; ++i) all.push_back(i);
    const expr::CompiledExpr top(v.top_form.coefficient(all), expr::chart_slots_with_time(cp.alpha.chart()));
    Sampler rng(seed);
    v.min_abs_top = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < samples * 10 && v.samples < samples; ++attempt) {
        auto x = rng.point(n);
        x.push_back(0.0);
        double c = 0.0;
        try {
            c = top(x);
        } catch (const expr::EvaluationError&) {
            continue;
        }
        x.pop_back();
        ++v.samples;
        if (std::abs(c) < v.min_abs_top) {
            v.min_abs_top = std::abs(c);
            v.argmin = x;
        }
    }
    v.valid = v.alpha_nilpotent && v.beta_nilpotent && v.samples > 0 && v.min_abs_top > 1e-12;
    return v;
}

ReebPair reeb_fields(const ContactPair& cp, std::span<const double> x) {
    check_dimension(cp);
    const int n = cp.alpha.chart().dim();
    const Eigen::VectorXd a = forms::covector_at(cp.alpha, x), b = forms::covector_at(cp.beta, x);
    const Eigen::MatrixXd ma = forms::form_matrix_at(forms::exterior_derivative(cp.alpha), x);
    const Eigen::MatrixXd mb = forms::form_matrix_at(forms::exterior_derivative(cp.beta), x);
    // Rows: α, β, (ι_v dα)_j, (ι_v dβ)_j.
    Eigen::MatrixXd sys(2 + 2 * n, n);
    sys.row(0) = a.transpose();
    sys.row(1) = b.transpose();
    sys.block(2, 0, n, n) = ma.transpose();
    sys.block(2 + n, 0, n, n) = mb.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) throw RankDeficient("Reeb conditions are not uniquely solvable", {x.begin(), x.end()});
    Eigen::VectorXd ra = Eigen::VectorXd::Zero(2 + 2 * n), rb = Eigen::VectorXd::Zero(2 + 2 * n);
    ra(0) = 1.0;
    rb(1) = 1.0;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys);
    ReebPair r{qr.solve(ra), qr.solve(rb)};
    const double scale = 1.0 + sys.cwiseAbs().maxCoeff();
    if ((sys * r.a - ra).cwiseAbs().maxCoeff() > 1e-9 * scale || (sys * r.b - rb).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw RankDeficient("Reeb conditions are inconsistent", {x.begin(), x.end()});
    return r;
}

double reeb_residual(const ContactPair& cp, const ReebPair& r, std::span<const double> x) {
    const Eigen::VectorXd a = forms::covector_at(cp.alpha, x), b = forms::covector_at(cp.beta, x);
    const Eigen::MatrixXd ma = forms::form_matrix_at(forms::exterior_derivative(cp.alpha), x);
    const Eigen::MatrixXd mb = forms::form_matrix_at(forms::exterior_derivative(cp.beta), x);
    double m = 0.0;
    m = std::max({m, std::abs(a.dot(r.a) - 1.0), std::abs(b.dot(r.a)), std::abs(a.dot(r.b)), std::abs(b.dot(r.b) - 1.0)});
    for (const auto* v : {&r.a, &r.b}) {
        m = std::max(m, (ma.transpose() * *v).cwiseAbs().maxCoeff());
        m = std::max(m, (mb.transpose() * *v).cwiseAbs().maxCoeff());
    }
    return m;
}

LcsStructure lcs_from_pair(const ContactPair& cp, const Rational& c, const lcs::ValidationOptions& options) {
    check_dimension(cp);
    if (cp.k != 0) throw std::invalid_argument("lcs_from_pair needs a pair of type (h, 0)");
    const ScalarExpr ce(c);
    const DifferentialForm omega = forms::exterior_derivative(cp.alpha) + ce * forms::wedge(cp.alpha, cp.beta);
    const DifferentialForm theta = ce * cp.beta;
    try {
        return lcs::validate_lcs(omega, theta, options);
    } catch (const lcs::DegeneracyDetected& e) {
        const auto p = degeneracy_profile(cp, c, options.samples, options.seed);
        throw lcs::DegeneracyDetected(
            std::string(e.what()) + "; c = " + c.get_str() + ", max |(d alpha)^(h+1)| = " +
                std::to_string(p.max_first_summand) + ", min |(h+1) c (d alpha)^h ^ alpha ^ beta| = " +
                std::to_string(p.min_second_summand),
            e.point(), e.determinant());
    }
}

DegeneracyProfile degeneracy_profile(const ContactPair& cp, const Rational& c, int samples, std::uint64_t seed) {
    check_dimension(cp);
    DegeneracyProfile p;
    p.c = c;
    const ScalarExpr ce(c);
    const DifferentialForm da = forms::exterior_derivative(cp.alpha);
    const DifferentialForm omega = da + ce * forms::wedge(cp.alpha, cp.beta);
    const DifferentialForm first = wedge_power(da, cp.h + 1);
    const DifferentialForm second =
        ScalarExpr(Rational(cp.h + 1)) * ce * forms::wedge(wedge_power(da, cp.h), forms::wedge(cp.alpha, cp.beta));
    const forms::CompiledMatrix m(omega);
    const int n = cp.alpha.chart().dim();
    Sampler rng(seed);
    p.min_abs_det = std::numeric_limits<double>::infinity();
    p.min_second_summand = std::numeric_limits<double>::infinity();
    int taken = 0;
    for (int attempt = 0; attempt < samples * 10 && taken < samples; ++attempt) {
        const auto x = rng.point(n);
        try {
            const double det = m(0.0, x).determinant();
            p.min_abs_det = std::min(p.min_abs_det, std::abs(det));
            p.max_first_summand = std::max(p.max_first_summand, max_abs(first, x));
            p.min_second_summand = std::min(p.min_second_summand, max_abs(second, x));
        } catch (const expr::EvaluationError&) {
            continue;
        }
        ++taken;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Built-in data

namespace {

const Chart& x_chart() {
    static const Chart c({"x1", "x2", "x3", "x4"});
    return c;
}

ScalarExpr P(const char* s) { return expr::parse(s, x_chart(), false); }

VectorFieldExpr field(const char* a, const char* b, const char* c, const char* d) {
    return {x_chart(), {P(a), P(b), P(c), P(d)}};
}

DifferentialForm one(const char* a, const char* b, const char* c, const char* d) {
    return DifferentialForm::one_form(x_chart(), {P(a), P(b), P(c), P(d)});
}

DifferentialForm dd(int i, int j) {
    return forms::wedge(DifferentialForm::basis(x_chart(), i - 1), DifferentialForm::basis(x_chart(), j - 1));
}

Representation make_rep1() {
    Representation r;
    r.id = 1;
    r.chart = x_chart();
    r.x = {field("0", "1", "0", "0"), field("1", "0", "0", "0"), field("x2", "x3", "0", "1"), field("0", "0", "1", "0")};
    r.eta = {one("0", "1", "0", "-x3"), one("1", "0", "0", "-x2"), one("0", "0", "0", "1"), one("0", "0", "1", "0")};
    r.omega_display = -dd(2, 4) + dd(1, 3) - P("x2") * dd(4, 3);
    r.theta = r.eta[3];
    return r;
}

Representation make_rep2() {
    Representation r;
    r.id = 2;
    r.chart = x_chart();
    r.x = {field("0", "1", "0", "0"), field("1", "0", "0", "0"), field("x2", "x3", "x4", "1"), field("0", "0", "1", "0")};
    r.eta = {one("0", "1", "0", "-x3"), one("1", "0", "0", "-x2"), one("0", "0", "0", "1"), one("0", "0", "1", "-x4")};
    r.omega_display = -dd(2, 4) + dd(1, 3) - P("x4") * dd(1, 4) + P("x2") * dd(3, 4);
    r.theta = r.eta[3];
    return r;
}

Representation make_rep4() {
    Representation r;
    r.id = 4;
    r.chart = x_chart();
    r.x = {field("0", "1", "0", "0"), field("1", "0", "0", "0"), field("x2", "0", "x4", "-1"), field("x3", "x4", "1", "0")};
    r.eta = {one("0", "1", "-x4", "-x4^2"), one("1", "0", "-x3", "-(x3*x4 - x2)"), one("0", "0", "0", "-1"),
             one("0", "0", "1", "x4")};
    r.omega_display = dd(1, 3) + P("x4") * dd(1, 4) + dd(2, 4) - P("x4 + x2") * dd(3, 4);
    r.theta = r.eta[3];
    return r;
}

// Nonzero ordered brackets, 1-based: [1,4] = 3, [1,3] = 2.
VectorFieldExpr expected_g41(int i, int j, const std::array<VectorFieldExpr, 4>& x) {
    if (i == 1 && j == 4) return x[2];
    if (i == 1 && j == 3) return x[1];
    return VectorFieldExpr::zero(x_chart());
}

bool table_matches(const std::array<VectorFieldExpr, 4>& x, std::vector<std::string>* mismatches) {
    bool ok = true;
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) {
            const VectorFieldExpr want = expected_g41(i, j, x);
            const auto got = forms::bracket(x[static_cast<std::size_t>(i - 1)], x[static_cast<std::size_t>(j - 1)]);
            if (!forms::field_equal(got, want).equal) {
                ok = false;
                if (mismatches)
                    mismatches->push_back("[X" + std::to_string(i) + ",X" + std::to_string(j) + "] = " + got.str() +
                                          ", expected " + want.str());
            }
        }
    return ok;
}

}  // namespace

std::string builtin_id(int rep) { return "g41-rep" + std::to_string(rep); }

std::optional<int> representation_from_id(std::string_view id) {
    for (int r : representation_ids())
        if (id == builtin_id(r)) return r;
    return std::nullopt;
}

const std::array<int, 3>& representation_ids() {
    static const std::array<int, 3> ids{1, 2, 4};
    return ids;
}

RepresentationCheck check_representation(const Representation& rep) {
    RepresentationCheck c;
    c.duality = true;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const ScalarExpr v = forms::pairing(rep.eta[static_cast<std::size_t>(i)], rep.x[static_cast<std::size_t>(j)]);
            if (!identical(v, ScalarExpr(i == j ? 1L : 0L))) c.duality = false;
        }
    c.omega_recomputed = forms::exterior_derivative(rep.eta[1]) + forms::wedge(rep.eta[1], rep.eta[3]);
    c.omega_matches = forms::form_equal(c.omega_recomputed, rep.omega_display).equal;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            c.brackets.push_back({i + 1, j + 1,
                                  forms::bracket(rep.x[static_cast<std::size_t>(i)], rep.x[static_cast<std::size_t>(j)])});
    c.brackets_match_g41 = table_matches(rep.x, &c.bracket_mismatches);
    const std::array<VectorFieldExpr, 4> y{rep.x[2], rep.x[1], ScalarExpr(-1L) * rep.x[0], rep.x[3]};
    c.brackets_match_g41_relabelled = table_matches(y, nullptr);
    return c;
}

const Representation& representation(int rep) {
    static std::once_flag once;
    static std::array<Representation, 3> reps;
    std::call_once(once, [] {
        reps = {make_rep1(), make_rep2(), make_rep4()};
        for (const auto& r : reps) {
            const auto c = check_representation(r);
            if (!c.duality) throw std::logic_error(builtin_id(r.id) + ": coframe is not dual to the vector fields");
            if (!c.omega_matches)
                throw std::logic_error(builtin_id(r.id) + ": d(eta2) + eta2^eta4 differs from the transcribed Omega");
        }
    });
    switch (rep) {
        case 1: return reps[0];
        case 2: return reps[1];
        case 4: return reps[2];
        default: throw std::invalid_argument("unknown representation " + std::to_string(rep));
    }
}

const LcsStructure& builtin_structure(int rep) {
    static std::once_flag once;
    static std::array<std::optional<LcsStructure>, 3> s;
    std::call_once(once, [] {
        s[0] = lcs::validate_lcs(representation(1).omega_display, representation(1).theta);
        s[1] = lcs::validate_lcs(representation(2).omega_display, representation(2).theta);
        s[2] = lcs::validate_lcs(representation(4).omega_display, representation(4).theta);
    });
    representation(rep);
    return *s[rep == 1 ? 0 : rep == 2 ? 1 : 2];
}

ContactPair builtin_pair(int rep) {
    const auto& r = representation(rep);
    return {r.eta[1], r.eta[3], 1, 0};
}

VectorFieldExpr lie_system_field(int rep, const std::array<ScalarExpr, 4>& a) {
    const auto& r = representation(rep);
    return a[0] * r.x[1] + a[1] * r.x[0] + a[2] * r.x[3] + a[3] * r.x[2];
}

VectorFieldExpr generator_combination(int rep, const std::array<ScalarExpr, 4>& a) {
    const auto& r = representation(rep);
    return a[0] * r.x[0] + a[1] * r.x[1] + a[2] * r.x[2] + a[3] * r.x[3];
}

AutomorphismVerdict verify_lcs_automorphism(const LcsStructure& s, const VectorFieldExpr& x) {
    AutomorphismVerdict v;
    v.lie = forms::lie_derivative(x, s.omega());
    v.verdict = forms::form_equal(v.lie, DifferentialForm::zero(s.chart(), 2));
    v.lie_zero = v.verdict.equal;
    v.theta_of_x = forms::pairing(s.theta(), x);
    v.theta_of_x_is_one = expr::expr_equal(v.theta_of_x, ScalarExpr(1L)).equal;
    v.compatible = v.lie_zero && v.theta_of_x_is_one;
    return v;
}

}  // namespace lcsmech::contact
