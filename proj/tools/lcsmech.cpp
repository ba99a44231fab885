// lcsmech: validate | integrate | hj | canonical | example
//
// Exit codes: 0 pass, 1 verification failure, 2 config/parse error,
// 3 runtime singularity or inversion failure.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lcsmech/canonical.hpp"
#include "lcsmech/contact.hpp"
#include "lcsmech/hamjac.hpp"
#include "lcsmech/io.hpp"

using namespace lcsmech;
using io::ConfigError;
using io::Json;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kRuntime = 3 };

struct Common {
    std::uint64_t seed = kDefaultSeed;
    int samples = 100;
    double tolerance = 1e-9;
    std::string report_path;
};

std::uint64_t default_seed() {
    const char* env = std::getenv("LCSMECH_SEED");
    if (!env || !*env) return kDefaultSeed;
    char* end = nullptr;
    errno = 0;
    const auto v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || *env == '-') throw ConfigError("LCSMECH_SEED must be a non-negative integer");
    return v;
}

void emit(const Json& report, const Common& c, std::ostream& fallback = std::cout) {
    const auto text = report.dump(2) + "\n";
    if (c.report_path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream out(c.report_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + c.report_path);
    out << text;
}

Json header(const char* command, const Common& c) {
    return Json{{"command", command}, {"seed", c.seed}, {"samples", c.samples}, {"tolerance", c.tolerance}};
}

Json exprs(const std::vector<expr::ScalarExpr>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(e.str());
    return a;
}

lcs::ValidationOptions validation(const Common& c) {
    lcs::ValidationOptions o;
    o.samples = c.samples;
    o.seed = c.seed;
    return o;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& structure_arg, const Common& c) {
    const auto d = io::parse_structure(io::load_argument(structure_arg));
    Json r = header("validate", c);
    r["structure"] = d.label;
    r["coordinates"] = d.chart.names();
    r["equality"] = Json{{"samples", 32}, {"relative_tolerance", 1e-10}};
    r["det_floor"] = 1e-12;

    lcs::ValidationReport v;
    try {
        if (d.kind == io::StructureDescriptor::Kind::cotangent) {
            v = lcs::cotangent_lcs(d.base_dim, d.vartheta, validation(c)).report();
        } else {
            v = lcs::check_lcs(d.omega, d.theta, validation(c));
        }
    } catch (const lcs::NonClosedBaseForm& e) {
        r["valid"] = false;
        r["error"] = e.what();
        r["d_vartheta"] = io::form_to_json(e.residual());
        emit(r, c);
        return kFail;
    } catch (const lcs::OddDimension& e) {
        r["valid"] = false;
        r["error"] = e.what();
        emit(r, c);
        return kFail;
    } catch (const lcs::DegeneracyDetected& e) {
        // cotangent_lcs validates; report the point.
        r["valid"] = false;
        r["error"] = e.what();
        r["point"] = e.point();
        emit(r, c);
        return kFail;
    }
    r["valid"] = v.valid;
    r["theta_closed"] = io::verdict_to_json(v.theta_closed);
    r["d_theta"] = io::form_to_json(v.d_theta);
    r["ldr_omega_zero"] = io::verdict_to_json(v.ldr_omega_zero);
    r["ldr_omega"] = io::form_to_json(v.ldr_omega);
    Json nd{{"samples", v.nondegeneracy.samples}, {"min_abs_det", v.nondegeneracy.min_abs_det},
            {"argmin", v.nondegeneracy.argmin}};
    nd["constant_det"] = v.nondegeneracy.constant_det ? Json(v.nondegeneracy.constant_det->get_str()) : Json(nullptr);
    r["nondegeneracy"] = std::move(nd);
    emit(r, c);
    return v.valid ? kPass : kFail;
}

// ---------------------------------------------------------------------------

struct IntegrateArgs {
    std::string structure, hamiltonian, lie_system, output, format = "csv";
    std::vector<std::string> coefficients;
    std::vector<double> x0;
    double t0 = 0.0, t1 = 1.0, dt = 1e-3;
    std::string method = "rk4";
    bool diagnostics = false;
};

int cmd_integrate(const IntegrateArgs& a, const Common& c) {
    if (!(a.dt > 0.0) || !std::isfinite(a.dt)) throw ConfigError("dt must be positive");
    if (!(a.t1 > a.t0)) throw ConfigError("t1 must exceed t0");
    const auto method = dynamics::method_from_string(a.method);
    if (!method) throw ConfigError("method must be rk4 or euler");
    if (a.format != "csv" && a.format != "json") throw ConfigError("format must be csv or json");
    if (a.hamiltonian.empty() == a.lie_system.empty()) throw ConfigError("give exactly one of --hamiltonian and --lie-system");

    dynamics::IntegrationOptions opts;
    opts.method = *method;
    opts.dt = a.dt;
    opts.diagnostics = a.diagnostics;

    Json r = header("integrate", c);
    std::optional<dynamics::HamiltonianSystem> sys;
    std::optional<forms::TangentField> field;
    if (!a.lie_system.empty()) {
        const auto rep = contact::representation_from_id(a.lie_system);
        if (!rep) throw ConfigError("unknown Lie system '" + a.lie_system + "'");
        if (a.coefficients.size() != 4) throw ConfigError("a Lie system needs four coefficients a1..a4");
        const auto& chart = contact::representation(*rep).chart;
        std::array<expr::ScalarExpr, 4> co;
        for (std::size_t i = 0; i < 4; ++i) {
            co[i] = io::expr_from_json(Json(a.coefficients[i]), chart, true);
            for (const auto& v : co[i].variables())
                if (v != kTimeSymbol) throw ConfigError("coefficients may only depend on t");
        }
        const auto x = contact::lie_system_field(*rep, co);
        field = forms::TangentField::symbolic(x);
        r["system"] = Json{{"lie_system", a.lie_system}, {"coefficients", exprs({co.begin(), co.end()})},
                           {"field", exprs(x.components())}};
        if (a.diagnostics) r["diagnostics_note"] = "no Hamiltonian: diagnostics unavailable for Lie systems";
    } else {
        if (a.structure.empty()) throw ConfigError("--hamiltonian needs --structure");
        const auto d = io::parse_structure(io::load_argument(a.structure));
        lcs::LcsStructure s;
        try {
            s = io::build_structure(d, validation(c));
        } catch (const std::exception& e) {
            r["error"] = std::string("invalid structure: ") + e.what();
            emit(r, c, std::cerr);
            return kFail;
        }
        const auto h = io::expr_from_json(Json(a.hamiltonian), s.chart(), true);
        sys.emplace(s, h);
        r["system"] = Json{{"structure", d.label}, {"hamiltonian", h.str()}};
    }
    r["method"] = a.method;
    r["dt"] = a.dt;
    r["t0"] = a.t0;
    r["t1"] = a.t1;
    r["x0"] = a.x0;

    const int dim = sys ? sys->chart().dim() : field->chart().dim();
    if (static_cast<int>(a.x0.size()) != dim)
        throw ConfigError("initial state needs " + std::to_string(dim) + " components");

    dynamics::Trajectory tr;
    int code = kPass;
    try {
        tr = sys ? dynamics::integrate(*sys, a.x0, a.t0, a.t1, opts) : dynamics::integrate(*field, a.x0, a.t0, a.t1, opts);
    } catch (const dynamics::IntegrationAborted& e) {
        tr = e.partial();
        r["aborted"] = e.what();
        code = kRuntime;
    }

    std::ostringstream traj;
    if (a.format == "csv") io::write_trajectory_csv(traj, tr);
    else traj << io::trajectory_to_json(tr).dump(2) << '\n';

    r["steps"] = tr.steps.size();
    r["final_t"] = tr.t.back();
    r["final_state"] = tr.x.back();
    if (!tr.residual.empty()) r["max_residual"] = *std::max_element(tr.residual.begin(), tr.residual.end());

    if (a.output.empty()) {
        std::cout << traj.str();
        emit(r, c, std::cerr);
    } else {
        std::ofstream out(a.output, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + a.output);
        out << traj.str();
        r["output"] = a.output;
        emit(r, c);
    }
    return code;
}

// ---------------------------------------------------------------------------

int cmd_hj(const std::string& structure_arg, const std::string& hamiltonian, const std::string& section_arg,
           bool strict, const Common& c) {
    const auto d = io::parse_structure(io::load_argument(structure_arg));
    if (d.kind != io::StructureDescriptor::Kind::cotangent) throw ConfigError("hj needs a cotangent structure");
    lcs::LcsStructure s;
    Json r = header("hj", c);
    try {
        s = io::build_structure(d, validation(c));
    } catch (const std::exception& e) {
        r["error"] = std::string("invalid structure: ") + e.what();
        emit(r, c);
        return kFail;
    }
    const auto h = io::expr_from_json(Json(hamiltonian), s.chart(), true);
    const auto base = Chart::cotangent_base(d.base_dim);
    const auto gamma = io::parse_section(io::load_argument(section_arg), base);
    const dynamics::HamiltonianSystem sys(s, h);

    r["hamiltonian"] = h.str();
    r["section"] = exprs(gamma.components());
    const auto closed = hamjac::check_theta_closed(gamma, s);
    Json rows = Json::array();
    for (const auto& row : closed.residual) rows.push_back(exprs(row));
    r["theta_closed"] = Json{{"closed", closed.closed},
                             {"path", closed.exact ? "exact" : "sampled"},
                             {"residual", std::move(rows)},
                             {"form_closed", closed.form_closed}};

    const auto res = hamjac::hj_residual(sys, gamma);
    bool zero = true, exact = true;
    for (const auto& e : res) {
        const auto v = expr::expr_equal(e, expr::ScalarExpr(), {32, 1e-10, c.seed});
        zero = zero && v.equal;
        exact = exact && v.path == expr::EqualityPath::exact;
    }
    r["hj_residual"] = Json{{"components", exprs(res)}, {"zero", zero}, {"path", exact ? "exact" : "sampled"}};

    const auto rel = hamjac::gamma_relatedness(sys, gamma, c.samples, c.seed, c.tolerance);
    Json per = Json::array();
    for (const auto& smp : rel.per_sample)
        per.push_back(Json{{"t", smp.t}, {"q", smp.q}, {"mismatch", smp.mismatch}, {"hj_residual", smp.hj_residual}, {"hj_relative", smp.hj_relative}});
    r["relatedness"] = Json{{"hypothesis_holds", rel.hypothesis_holds},
                            {"related", rel.related},
                            {"samples", rel.samples},
                            {"max_mismatch", rel.max_mismatch},
                            {"max_hj_residual", rel.max_hj_residual},
                            {"indicators_agree", rel.indicators_agree},
                            {"per_sample", std::move(per)}};
    r["strict"] = strict;
    emit(r, c);
    if (strict && !closed.closed) return kFail;
    return kPass;
}

// ---------------------------------------------------------------------------

int cmd_canonical(const std::string& candidate_arg, const std::string& hamiltonian_override, const Common& c) {
    const auto d = io::parse_candidate(io::load_argument(candidate_arg));
    Json r = header("canonical", c);
    lcs::LcsStructure s1, s2;
    try {
        s1 = io::build_structure(d.s1, validation(c));
        s2 = io::build_structure(d.s2, validation(c));
    } catch (const std::exception& e) {
        r["error"] = std::string("invalid structure: ") + e.what();
        emit(r, c);
        return kFail;
    }
    auto cand = io::build_candidate(d, s1, s2);
    const auto potentials = io::build_potentials(d, s1, s2);
    r["map"] = exprs(cand.f.components());

    if (cand.k_f) {
        r["K_F"] = Json{{"source", "supplied"}, {"expr", cand.k_f->str()}};
    } else {
        const auto ex = canonical::extract_kf(cand.f, s1, s2);
        if (!ex.k_f) {
            r["K_F"] = Json{{"source", "extraction failed"}, {"message", ex.message}};
            emit(r, c);
            return kFail;
        }
        cand.k_f = ex.k_f;
        r["K_F"] = Json{{"source", "extracted"}, {"expr", ex.k_f->str()}};
    }

    canonical::CheckOptions opts;
    opts.samples = c.samples;
    opts.seed = c.seed;
    opts.tolerance = c.tolerance;
    canonical::CanonicalVerdict v;
    try {
        v = canonical::check_canonical(cand, opts);
    } catch (const canonical::DimensionMismatch& e) {
        throw ConfigError(e.what());
    }
    r["definition"] = Json{
        {"i_invertible", Json{{"pass", v.invertible}, {"method", v.inversion_method},
                              {"max_roundtrip", v.max_roundtrip}, {"samples", v.samples}}},
        {"ii_time", Json{{"pass", v.time_preserved}, {"path", "exact"}}},
        {"iii_theta", Json{{"pass", v.theta.equal}, {"verdict", io::verdict_to_json(v.theta)},
                           {"residual", io::form_to_json(v.theta_residual)}}},
        {"iv_omega", Json{{"pass", v.omega.equal}, {"verdict", io::verdict_to_json(v.omega)},
                          {"residual", io::form_to_json(v.omega_residual)}}}};
    r["canonical"] = v.canonical;
    if (!v.canonical) {
        r["theorem"] = "skipped: candidate is not canonical";
        emit(r, c);
        if (!v.invertible && v.inversion_method == "newton") return kRuntime;
        return kFail;
    }

    const std::string h_text = !hamiltonian_override.empty() ? hamiltonian_override : d.hamiltonian.value_or("0");
    const auto h = io::expr_from_json(Json(h_text), cand.f.target(), true);
    const auto e = canonical::verify_equivalences(cand, v, h, potentials, opts);
    Json th{{"hamiltonian", h.str()}, {"K", e.k.str()}};
    th["condition1"] = Json{{"pass", e.condition1.equal}, {"verdict", io::verdict_to_json(e.condition1)},
                            {"residual", io::form_to_json(e.condition1_residual)}};
    th["condition2"] = Json{{"pass", e.condition2}, {"path", "sampled"}, {"samples", e.condition2_samples},
                            {"skipped", e.condition2_skipped}, {"max_relative_mismatch", e.condition2_mismatch}};
    if (e.condition3_checked) {
        th["condition3"] = Json{{"pass", e.condition3.equal}, {"verdict", io::verdict_to_json(e.condition3)},
                                {"residual", io::form_to_json(e.condition3_residual)},
                                {"potential_signs", {e.potential_sign1, e.potential_sign2}}};
    } else {
        th["condition3"] = Json{{"pass", nullptr}, {"notice", e.condition3_notice}};
    }
    r["theorem"] = std::move(th);
    r["pass"] = e.all_pass;
    emit(r, c);
    return e.all_pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------

Json field_json(const forms::VectorFieldExpr& x) { return exprs(x.components()); }

int cmd_example(const std::string& id, bool list, const Common& c) {
    if (list || id.empty()) {
        Json ids = Json::array();
        for (int rep : contact::representation_ids()) ids.push_back(contact::builtin_id(rep));
        emit(Json{{"command", "example"}, {"examples", std::move(ids)}}, c);
        return kPass;
    }
    const auto rep = contact::representation_from_id(id);
    if (!rep) throw ConfigError("unknown example '" + id + "'");
    const auto& data = contact::representation(*rep);
    const auto check = contact::check_representation(data);
    const auto& s = contact::builtin_structure(*rep);
    const auto cp = contact::verify_contact_pair(contact::builtin_pair(*rep), c.samples, c.seed);

    Json r = header("example", c);
    r["id"] = id;
    r["coordinates"] = data.chart.names();
    Json fields = Json::array(), coframe = Json::array();
    for (const auto& x : data.x) fields.push_back(field_json(x));
    for (const auto& e : data.eta) coframe.push_back(io::form_to_json(e));
    r["fields"] = std::move(fields);
    r["coframe"] = std::move(coframe);
    r["omega"] = io::form_to_json(data.omega_display);
    r["theta"] = io::form_to_json(data.theta);
    r["lcs_valid"] = s.report().valid;
    r["duality"] = check.duality;
    r["omega_matches_construction"] = check.omega_matches;
    Json br = Json::array();
    for (const auto& b : check.brackets)
        if (!std::all_of(b.value.components().begin(), b.value.components().end(), [](const auto& e) { return e.is_zero(); }))
            br.push_back(Json{{"i", b.i}, {"j", b.j}, {"value", field_json(b.value)}});
    r["nonzero_brackets"] = std::move(br);
    r["brackets_match_g41"] = check.brackets_match_g41;
    r["brackets_match_g41_relabelled"] = check.brackets_match_g41_relabelled;
    r["contact_pair"] = Json{{"valid", cp.valid}, {"min_abs_top", cp.min_abs_top}};
    const std::array<expr::ScalarExpr, 4> ones{1L, 1L, 1L, 1L};
    r["lie_system_unit_coefficients"] = field_json(contact::lie_system_field(*rep, ones));
    emit(r, c);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hamiltonian mechanics on locally conformal symplectic charts"};
    app.require_subcommand(1);
    Common common;
    try {
        common.seed = default_seed();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }

    auto add_common = [&](CLI::App* sub, bool tolerance) {
        sub->add_option("--seed", common.seed, "Sampling seed (default 1729 or $LCSMECH_SEED)");
        sub->add_option("--samples", common.samples, "Sample count")->check(CLI::PositiveNumber);
        if (tolerance) sub->add_option("--tolerance", common.tolerance, "Tolerance for sampled checks")->check(CLI::PositiveNumber);
        sub->add_option("--report", common.report_path, "Write the JSON report to a file");
    };

    std::string structure, hamiltonian, section, candidate, example_id;
    bool strict = false, list = false;

    auto* validate = app.add_subcommand("validate", "Check closedness and nondegeneracy of a structure");
    validate->add_option("--structure", structure, "Structure descriptor: JSON, file or built-in id")->required();
    add_common(validate, false);

    IntegrateArgs ia;
    auto* integrate = app.add_subcommand("integrate", "Integrate a Hamiltonian field or a built-in Lie system");
    integrate->add_option("--structure", ia.structure, "Structure descriptor");
    integrate->add_option("--hamiltonian", ia.hamiltonian, "H(t, x)");
    integrate->add_option("--lie-system", ia.lie_system, "Built-in Lie system id (g41-rep1|2|4)");
    integrate->add_option("--coefficients", ia.coefficients, "a1..a4 as expressions in t")->delimiter(',');
    integrate->add_option("--x0", ia.x0, "Initial state")->delimiter(',')->required();
    integrate->add_option("--t0", ia.t0, "Start time");
    integrate->add_option("--t1", ia.t1, "End time");
    integrate->add_option("--dt", ia.dt, "Step size");
    integrate->add_option("--method", ia.method, "rk4 or euler");
    integrate->add_option("--format", ia.format, "csv or json");
    integrate->add_option("--output", ia.output, "Trajectory file (default stdout)");
    integrate->add_flag("--diagnostics", ia.diagnostics, "Record the defining-equation residual");
    add_common(integrate, false);

    auto* hj = app.add_subcommand("hj", "Hamilton-Jacobi residual of a time-dependent section");
    hj->add_option("--structure", structure, "Cotangent structure descriptor")->required();
    hj->add_option("--hamiltonian", hamiltonian, "H(t, q, p)")->required();
    hj->add_option("--section", section, "Section descriptor {components:[...]}")->required();
    hj->add_flag("--strict", strict, "Fail when the section is not theta-closed");
    add_common(hj, true);

    auto* canon = app.add_subcommand("canonical", "Verify a canonical transformation");
    canon->add_option("--candidate", candidate, "Candidate descriptor")->required();
    canon->add_option("--hamiltonian", hamiltonian, "H on the target, overriding the descriptor");
    add_common(canon, true);

    auto* example = app.add_subcommand("example", "Built-in representations and their structures");
    example->add_option("id", example_id, "Example id");
    example->add_flag("--list", list, "List example ids");
    add_common(example, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*validate) return cmd_validate(structure, common);
        if (*integrate) return cmd_integrate(ia, common);
        if (*hj) return cmd_hj(structure, hamiltonian, section, strict, common);
        if (*canon) return cmd_canonical(candidate, hamiltonian, common);
        if (*example) return cmd_example(example_id, list, common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const expr::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const lcs::SingularAtPoint& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kConfig;
}
