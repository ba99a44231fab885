// Python bindings: descriptors go in as JSON text, results come back as dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcsmech/canonical.hpp"
#include "lcsmech/contact.hpp"
#include "lcsmech/hamjac.hpp"
#include "lcsmech/io.hpp"

namespace py = pybind11;
using namespace lcsmech;

namespace {

std::vector<std::string> strings(const std::vector<expr::ScalarExpr>& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.str());
    return out;
}

lcs::LcsStructure structure(const std::string& descriptor, std::uint64_t seed) {
    lcs::ValidationOptions o;
    o.seed = seed;
    return io::build_structure(io::parse_structure(io::load_argument(descriptor)), o);
}

py::dict trajectory(const dynamics::Trajectory& tr) {
    py::dict d;
    d["coordinates"] = tr.chart.names();
    d["t"] = tr.t;
    d["x"] = tr.x;
    if (!tr.residual.empty()) d["residual"] = tr.residual;
    return d;
}

dynamics::IntegrationOptions options(double dt, const std::string& method, bool diagnostics) {
    const auto m = dynamics::method_from_string(method);
    if (!m) throw io::ConfigError("method must be rk4 or euler");
    dynamics::IntegrationOptions o;
    o.method = *m;
    o.dt = dt;
    o.diagnostics = diagnostics;
    return o;
}

template <class Run>
py::dict run_integration(Run&& run) {
    try {
        return trajectory(run());
    } catch (const dynamics::IntegrationAborted& e) {
        auto d = trajectory(e.partial());
        d["aborted"] = std::string(e.what());
        return d;
    }
}

py::dict validate(const std::string& descriptor, std::uint64_t seed) {
    const auto d = io::parse_structure(io::load_argument(descriptor));
    lcs::ValidationOptions o;
    o.seed = seed;
    const auto r = d.kind == io::StructureDescriptor::Kind::cotangent
                       ? lcs::cotangent_lcs(d.base_dim, d.vartheta, o).report()
                       : lcs::check_lcs(d.omega, d.theta, o);
    py::dict out;
    out["valid"] = r.valid;
    out["coordinates"] = d.chart.names();
    out["theta_closed"] = r.theta_closed.equal;
    out["ldr_omega_zero"] = r.ldr_omega_zero.equal;
    out["ldr_omega"] = io::form_to_json(r.ldr_omega).dump();
    out["min_abs_det"] = r.nondegeneracy.min_abs_det;
    return out;
}

py::dict integrate_hamiltonian(const std::string& descriptor, const std::string& hamiltonian, std::vector<double> x0,
                               double t0, double t1, double dt, const std::string& method, bool diagnostics) {
    const auto s = structure(descriptor, kDefaultSeed);
    const dynamics::HamiltonianSystem sys(s, expr::parse(hamiltonian, s.chart(), true));
    const auto o = options(dt, method, diagnostics);
    return run_integration([&] { return dynamics::integrate(sys, std::move(x0), t0, t1, o); });
}

py::dict integrate_lie_system(const std::string& id, const std::vector<std::string>& coefficients,
                              std::vector<double> x0, double t0, double t1, double dt, const std::string& method) {
    const auto rep = contact::representation_from_id(id);
    if (!rep) throw io::ConfigError("unknown Lie system '" + id + "'");
    if (coefficients.size() != 4) throw io::ConfigError("a Lie system needs four coefficients");
    const auto& chart = contact::representation(*rep).chart;
    std::array<expr::ScalarExpr, 4> a;
    for (std::size_t i = 0; i < 4; ++i) a[i] = expr::parse(coefficients[i], chart, true);
    const auto field = forms::TangentField::symbolic(contact::lie_system_field(*rep, a));
    const auto o = options(dt, method, false);
    return run_integration([&] { return dynamics::integrate(field, std::move(x0), t0, t1, o); });
}

py::dict hamilton_jacobi(const std::string& descriptor, const std::string& hamiltonian,
                         const std::vector<std::string>& section, int samples, std::uint64_t seed, double tolerance) {
    const auto d = io::parse_structure(io::load_argument(descriptor));
    if (d.kind != io::StructureDescriptor::Kind::cotangent) throw io::ConfigError("needs a cotangent structure");
    const auto s = io::build_structure(d);
    const auto base = Chart::cotangent_base(d.base_dim);
    std::vector<expr::ScalarExpr> comps;
    for (const auto& c : section) comps.push_back(expr::parse(c, base, true));
    const hamjac::TimeSection g(base, comps);
    const dynamics::HamiltonianSystem sys(s, expr::parse(hamiltonian, s.chart(), true));
    const auto closed = hamjac::check_theta_closed(g, s);
    const auto rel = hamjac::gamma_relatedness(sys, g, samples, seed, tolerance);
    py::dict out;
    out["theta_closed"] = closed.closed;
    out["form_closed"] = closed.form_closed;
    out["hj_residual"] = strings(hamjac::hj_residual(sys, g));
    out["related"] = rel.related;
    out["max_mismatch"] = rel.max_mismatch;
    out["max_hj_residual"] = rel.max_hj_residual;
    out["indicators_agree"] = rel.indicators_agree;
    return out;
}

py::dict check_canonical(const std::string& candidate, int samples, std::uint64_t seed, double tolerance) {
    const auto d = io::parse_candidate(io::load_argument(candidate));
    const auto s1 = io::build_structure(d.s1), s2 = io::build_structure(d.s2);
    auto c = io::build_candidate(d, s1, s2);
    py::dict out;
    if (!c.k_f) {
        const auto ex = canonical::extract_kf(c.f, s1, s2);
        if (!ex.k_f) throw std::runtime_error("K_F extraction failed: " + ex.message);
        c.k_f = ex.k_f;
    }
    out["K_F"] = c.k_f->str();
    canonical::CheckOptions o;
    o.samples = samples;
    o.seed = seed;
    o.tolerance = tolerance;
    const auto v = canonical::check_canonical(c, o);
    out["canonical"] = v.canonical;
    out["invertible"] = v.invertible;
    out["time_preserved"] = v.time_preserved;
    out["theta"] = v.theta.equal;
    out["omega"] = v.omega.equal;
    out["omega_residual"] = io::form_to_json(v.omega_residual).dump();
    if (v.canonical && d.hamiltonian) {
        const auto h = expr::parse(*d.hamiltonian, c.f.target(), true);
        const auto e = canonical::verify_equivalences(c, v, h, io::build_potentials(d, s1, s2), o);
        out["K"] = e.k.str();
        out["all_conditions"] = e.all_pass;
    }
    return out;
}

std::vector<std::string> example_ids() {
    std::vector<std::string> ids;
    for (int rep : contact::representation_ids()) ids.push_back(contact::builtin_id(rep));
    return ids;
}

}  // namespace

PYBIND11_MODULE(_lcsmech, m) {
    m.doc() = "Hamiltonian mechanics on locally conformal symplectic charts";
    py::register_exception<io::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<expr::ParseError>(m, "ParseError", PyExc_ValueError);

    m.attr("DEFAULT_SEED") = kDefaultSeed;
    m.def("simplify", [](const std::string& e, const std::vector<std::string>& coords) {
        return expr::parse(e, Chart(coords), true).str();
    }, py::arg("expr"), py::arg("coordinates"));
    m.def("differentiate", [](const std::string& e, const std::vector<std::string>& coords, const std::string& var) {
        return expr::differentiate(expr::parse(e, Chart(coords), true), var).str();
    }, py::arg("expr"), py::arg("coordinates"), py::arg("var"));
    m.def("validate", &validate, py::arg("structure"), py::arg("seed") = kDefaultSeed);
    m.def("integrate_hamiltonian", &integrate_hamiltonian, py::arg("structure"), py::arg("hamiltonian"), py::arg("x0"),
          py::arg("t0") = 0.0, py::arg("t1") = 1.0, py::arg("dt") = 1e-3, py::arg("method") = "rk4",
          py::arg("diagnostics") = false);
    m.def("integrate_lie_system", &integrate_lie_system, py::arg("id"), py::arg("coefficients"), py::arg("x0"),
          py::arg("t0") = 0.0, py::arg("t1") = 1.0, py::arg("dt") = 1e-3, py::arg("method") = "rk4");
    m.def("hamilton_jacobi", &hamilton_jacobi, py::arg("structure"), py::arg("hamiltonian"), py::arg("section"),
          py::arg("samples") = 100, py::arg("seed") = kDefaultSeed, py::arg("tolerance") = 1e-9);
    m.def("check_canonical", &check_canonical, py::arg("candidate"), py::arg("samples") = 100,
          py::arg("seed") = kDefaultSeed, py::arg("tolerance") = 1e-9);
    m.def("example_ids", &example_ids);
}
