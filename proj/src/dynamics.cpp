#include "lcsmech/dynamics.hpp"

#include <cmath>

namespace lcsmech::dynamics {

using forms::VectorFieldExpr;

HamiltonianSystem::HamiltonianSystem(LcsStructure s, ScalarExpr h) : s_(std::move(s)), h_(std::move(h)) {
    for (const auto& v : h_.variables())
        if (v != kTimeSymbol && !s_.chart().index_of(v))
            throw std::invalid_argument("Hamiltonian uses '" + v + "', which is not a chart coordinate");
}

DifferentialForm ldr_of_hamiltonian(const HamiltonianSystem& sys) {
    const auto h = DifferentialForm::function(sys.chart(), sys.hamiltonian());
    return forms::ldr_differential(h, sys.structure().theta());
}

TangentField hamiltonian_field(const HamiltonianSystem& sys) {
    return lcs::sharp_field(sys.structure(), ldr_of_hamiltonian(sys));
}

DifferentialForm omega_h(const HamiltonianSystem& sys) {
    const auto theta = forms::lift(sys.structure().theta());
    const auto h = DifferentialForm::function(theta.chart(), sys.hamiltonian());
    const auto dt = DifferentialForm::basis(theta.chart(), theta.chart().time_index());
    return forms::lift(sys.structure().omega()) + forms::wedge(forms::ldr_differential(h, theta), dt);
}

TangentField suspension(const HamiltonianSystem& sys) {
    TangentField x = hamiltonian_field(sys);
    if (x.is_symbolic()) {
        auto c = x.expr().components();
        c.emplace_back(1L);
        return TangentField::symbolic(VectorFieldExpr(sys.chart().time_extended(), std::move(c)));
    }
    const int n = sys.chart().dim();
    return TangentField::pointwise(sys.chart().time_extended(), [x, n](double, std::span<const double> y) {
        Eigen::VectorXd out(n + 1);
        out.head(n) = x(y[static_cast<std::size_t>(n)], y.first(static_cast<std::size_t>(n)));
        out(n) = 1.0;
        return out;
    });
}

SuspensionCheck check_suspension(const HamiltonianSystem& sys, int samples, std::uint64_t seed) {
    SuspensionCheck r;
    r.seed = seed;
    const TangentField xs = suspension(sys);
    const forms::CompiledMatrix m(omega_h(sys));
    const int n = sys.chart().dim();
    Sampler rng(seed);
    for (int attempt = 0; attempt < samples * 10 && r.samples < samples; ++attempt) {
        const auto y = rng.point(n + 1);
        Eigen::VectorXd v;
        Eigen::MatrixXd om;
        try {
            v = xs(y[static_cast<std::size_t>(n)], y);
            om = m(y[static_cast<std::size_t>(n)], y);
        } catch (const expr::EvaluationError&) {
            continue;
        } catch (const lcs::SingularAtPoint&) {
            continue;
        }
        ++r.samples;
        // ι_v Ω_H has components (Mᵀ v)_j.
        const Eigen::VectorXd contraction = om.transpose() * v;
        r.max_contraction = std::max(r.max_contraction, contraction.cwiseAbs().maxCoeff());
        r.max_dt_error = std::max(r.max_dt_error, std::abs(v(n) - 1.0));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Integration

const char* to_string(Method m) { return m == Method::rk4 ? "rk4" : "euler"; }

std::optional<Method> method_from_string(std::string_view s) {
    if (s == "rk4") return Method::rk4;
    if (s == "euler") return Method::euler;
    return std::nullopt;
}

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

namespace {

/// Called at every point where the field is evaluated; may throw SingularAtPoint.
using Guard = std::function<void(double t, const Eigen::VectorXd& y)>;

Trajectory integrate_guarded(const TangentField& field, std::vector<double> x0, double t0, double t1,
                             const IntegrationOptions& options, const Diagnostic& diagnostic, const Guard& guard) {
    if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw std::invalid_argument("dt must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("t1 must exceed t0");
    if (static_cast<int>(x0.size()) != field.chart().dim())
        throw std::invalid_argument("initial state has the wrong dimension");

    Trajectory tr;
    tr.chart = field.chart();
    tr.method = options.method;
    tr.nominal_dt = options.dt;
    const auto span = t1 - t0;
    // Guard against a sliver step from roundoff in span/dt.
    const auto steps = static_cast<long>(std::ceil(span / options.dt * (1.0 - 1e-12)));

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    auto record = [&](double t) {
        tr.t.push_back(t);
        tr.x.emplace_back(x.data(), x.data() + x.size());
        if (options.diagnostics && diagnostic) tr.residual.push_back(diagnostic(t, tr.x.back()));
    };
    auto eval = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
        Eigen::VectorXd k;
        try {
            if (guard) guard(t, y);
            k = field(t, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
        } catch (const lcs::SingularAtPoint& e) {
            throw SingularDuringIntegration(std::string("singular point at t = ") + std::to_string(t) + ": " + e.what(), tr);
        } catch (const expr::EvaluationError& e) {
            throw NonFiniteState(std::string("evaluation failed at t = ") + std::to_string(t) + ": " + e.what(), tr);
        }
        if (!finite(k)) throw NonFiniteState("non-finite field value at t = " + std::to_string(t), tr);
        return k;
    };

    record(t0);
    double t = t0;
    for (long k = 0; k < steps; ++k) {
        const double tn = (k + 1 == steps) ? t1 : t0 + static_cast<double>(k + 1) * options.dt;
        const double h = tn - t;
        if (options.method == Method::euler) {
            x = x + h * eval(t, x);
        } else {
            const Eigen::VectorXd k1 = eval(t, x);
            const Eigen::VectorXd k2 = eval(t + h / 2, x + (h / 2) * k1);
            const Eigen::VectorXd k3 = eval(t + h / 2, x + (h / 2) * k2);
            const Eigen::VectorXd k4 = eval(tn, x + h * k3);
            x = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        if (!finite(x)) throw NonFiniteState("state became non-finite at t = " + std::to_string(tn), tr);
        tr.steps.push_back(h);
        t = tn;
        record(t);
    }
    return tr;
}

}  // namespace

Trajectory integrate(const TangentField& field, std::vector<double> x0, double t0, double t1,
                     const IntegrationOptions& options, const Diagnostic& diagnostic) {
    return integrate_guarded(field, std::move(x0), t0, t1, options, diagnostic, {});
}

double defining_residual(const HamiltonianSystem& sys, double t, std::span<const double> x,
                         const Eigen::VectorXd& field_value) {
    const Eigen::MatrixXd m = forms::form_matrix_at(sys.structure().omega(), x, t);
    const Eigen::VectorXd rhs = forms::covector_at(ldr_of_hamiltonian(sys), x, t);
    return (m.transpose() * field_value - rhs).cwiseAbs().maxCoeff();
}

Trajectory integrate(const HamiltonianSystem& sys, std::vector<double> x0, double t0, double t1,
                     const IntegrationOptions& options) {
    const TangentField field = hamiltonian_field(sys);
    const forms::CompiledMatrix m(sys.structure().omega());
    const forms::CompiledVector rhs(sys.chart(), ldr_of_hamiltonian(sys).components());
    Diagnostic diag = [&](double t, std::span<const double> x) {
        const Eigen::VectorXd v = field(t, x);
        return (m(t, x).transpose() * v - rhs(t, x)).cwiseAbs().maxCoeff();
    };
    // det Ω = Pf(Ω)² cannot change sign, so a fixed step can jump over a
    // degenerate point unnoticed; a sign change of Pf(Ω) exposes it.
    double reference = 0.0;
    Guard guard = [&](double t, const Eigen::VectorXd& y) {
        const std::span<const double> pt(y.data(), static_cast<std::size_t>(y.size()));
        const double pf = linalg::pfaffian(m(t, pt));
        if (reference == 0.0) reference = pf;
        if (pf == 0.0 || (pf > 0.0) != (reference > 0.0))
            throw lcs::SingularAtPoint("Omega degenerates between samples (Pfaffian changed sign)", {pt.begin(), pt.end()});
    };
    return integrate_guarded(field, std::move(x0), t0, t1, options, diag, guard);
}

CoordinateCheck hamilton_rhs_coordinates(const HamiltonianSystem& sys, double t, std::span<const double> x) {
    const Chart& chart = sys.chart();
    if (!chart.is_cotangent()) throw std::invalid_argument("coordinate Hamilton equations need a cotangent chart");
    const int n = chart.base_dim();
    const auto& h = sys.hamiltonian();
    const auto theta = sys.structure().theta().components();
    auto at = [&](const ScalarExpr& e) { return expr::evaluate(e, chart, x, t); };
    const double hv = at(h);
    std::vector<double> hq(static_cast<std::size_t>(n)), hp(static_cast<std::size_t>(n)), th(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        hq[static_cast<std::size_t>(i)] = at(expr::differentiate(h, chart.name(i)));
        hp[static_cast<std::size_t>(i)] = at(expr::differentiate(h, chart.name(n + i)));
        th[static_cast<std::size_t>(i)] = at(theta[static_cast<std::size_t>(i)]);
    }
    CoordinateCheck c;
    c.coordinate.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        c.coordinate(i) = hp[ui];
        double pdot = -hq[ui] + th[ui] * hv;
        for (int k = 0; k < n; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            pdot += hp[uk] * (th[uk] * x[static_cast<std::size_t>(n + i)] - x[static_cast<std::size_t>(n + k)] * th[ui]);
        }
        c.coordinate(n + i) = pdot;
    }
    c.intrinsic = hamiltonian_field(sys)(t, x);
    c.discrepancy = (c.coordinate - c.intrinsic).cwiseAbs().maxCoeff();
    return c;
}

}  // namespace lcsmech::dynamics
