#include "lcsmech/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lcsmech/contact.hpp"

namespace lcsmech::io {

using expr::ScalarExpr;
using forms::DifferentialForm;

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

Json load_argument(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[' || text[first] == '"'))
        return parse_json(text);
    std::error_code ec;
    if (!text.empty() && std::filesystem::is_regular_file(text, ec)) {
        std::ifstream in(text);
        if (!in) throw ConfigError("cannot read " + text);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_json(ss.str());
    }
    return Json(text);
}

namespace {

const Json& require(const Json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string(where) + ": missing key '" + key + "'");
    return j.at(key);
}

int as_int(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw ConfigError(std::string(what) + " must be an integer");
    return j.get<int>();
}

std::string as_string(const Json& j, const char* what) {
    if (!j.is_string()) throw ConfigError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (e.is_string()) out.push_back(e.get<std::string>());
        else if (e.is_number()) out.push_back(e.dump());
        else throw ConfigError(std::string(what) + " entries must be strings or numbers");
    }
    return out;
}

ScalarExpr parse_expr(const std::string& s, const Chart& chart, bool allow_time) {
    try {
        return expr::parse(s, chart, allow_time);
    } catch (const expr::ParseError& e) {
        throw ConfigError("cannot parse '" + s + "': " + e.what());
    }
}

}  // namespace

ScalarExpr expr_from_json(const Json& j, const Chart& chart, bool allow_time) {
    if (j.is_string()) return parse_expr(j.get<std::string>(), chart, allow_time);
    if (j.is_number_integer()) return ScalarExpr(j.get<long>());
    if (j.is_number()) return parse_expr(j.dump(), chart, allow_time);
    throw ConfigError("expression must be a string or a number");
}

Json form_to_json(const DifferentialForm& a) {
    Json j;
    j["degree"] = a.degree();
    Json terms = Json::array();
    for (const auto& [idx, c] : a.terms()) terms.push_back(Json{{"indices", idx}, {"coeff", c.str()}});
    j["terms"] = std::move(terms);
    return j;
}

DifferentialForm form_from_json(const Json& j, const Chart& chart, int expected_degree) {
    const int degree = as_int(require(j, "degree", "form"), "form degree");
    if (degree < 0 || degree > chart.dim()) throw ConfigError("form degree out of range");
    if (expected_degree >= 0 && degree != expected_degree)
        throw ConfigError("expected a " + std::to_string(expected_degree) + "-form");
    DifferentialForm a(chart, degree);
    const Json& terms = j.contains("terms") ? j.at("terms") : Json::array();
    if (!terms.is_array()) throw ConfigError("form terms must be an array");
    for (const auto& t : terms) {
        const auto& idx = require(t, "indices", "form term");
        if (!idx.is_array() || static_cast<int>(idx.size()) != degree)
            throw ConfigError("form term needs exactly " + std::to_string(degree) + " indices");
        forms::IndexTuple tuple;
        for (const auto& i : idx) {
            const int k = as_int(i, "form index");
            if (k < 0 || k >= chart.dim()) throw ConfigError("form index out of range");
            tuple.push_back(k);
        }
        a.add_term(tuple, expr_from_json(require(t, "coeff", "form term"), chart, true));
    }
    return a;
}

StructureDescriptor parse_structure(const Json& j) {
    StructureDescriptor d;
    const Json* builtin = nullptr;
    if (j.is_string()) builtin = &j;
    else if (j.is_object() && j.contains("builtin")) builtin = &j.at("builtin");
    if (builtin) {
        const auto id = as_string(*builtin, "builtin id");
        const auto rep = contact::representation_from_id(id);
        if (!rep) throw ConfigError("unknown built-in structure '" + id + "'");
        const auto& r = contact::representation(*rep);
        d.kind = StructureDescriptor::Kind::builtin;
        d.label = id;
        d.builtin_rep = *rep;
        d.chart = r.chart;
        d.omega = r.omega_display;
        d.theta = r.theta;
        return d;
    }
    if (!j.is_object()) throw ConfigError("structure descriptor must be an object or a built-in id");
    if (j.contains("cotangent")) {
        const auto& c = j.at("cotangent");
        d.kind = StructureDescriptor::Kind::cotangent;
        d.base_dim = as_int(require(c, "base_dim", "cotangent"), "base_dim");
        if (d.base_dim < 1 || d.base_dim > 8) throw ConfigError("base_dim must be between 1 and 8");
        const auto base = Chart::cotangent_base(d.base_dim);
        d.vartheta = c.contains("vartheta") ? form_from_json(c.at("vartheta"), base, 1) : DifferentialForm::zero(base, 1);
        d.chart = Chart::cotangent(d.base_dim);
        d.label = "cotangent";
        return d;
    }
    const auto names = string_list(require(j, "coordinates", "structure"), "coordinates");
    for (const auto& n : names)
        if (n == kTimeSymbol) throw ConfigError("'t' is reserved for time");
    try {
        d.chart = Chart(names);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    d.kind = StructureDescriptor::Kind::forms;
    d.label = "forms";
    d.omega = form_from_json(require(j, "omega", "structure"), d.chart, 2);
    d.theta = form_from_json(require(j, "theta", "structure"), d.chart, 1);
    return d;
}

lcs::LcsStructure build_structure(const StructureDescriptor& d, const lcs::ValidationOptions& options) {
    switch (d.kind) {
    case StructureDescriptor::Kind::builtin:
        return contact::builtin_structure(d.builtin_rep);
    case StructureDescriptor::Kind::cotangent:
        return lcs::cotangent_lcs(d.base_dim, d.vartheta, options);
    case StructureDescriptor::Kind::forms:
        break;
    }
    return lcs::validate_lcs(d.omega, d.theta, options);
}

hamjac::TimeSection parse_section(const Json& j, const Chart& base) {
    const Json& comps = j.is_array() ? j : require(j, "components", "section");
    if (!comps.is_array()) throw ConfigError("section components must be an array");
    std::vector<ScalarExpr> e;
    for (const auto& c : comps) e.push_back(expr_from_json(c, base, true));
    try {
        return {base, std::move(e)};
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
}

CandidateDescriptor parse_candidate(const Json& j) {
    if (!j.is_object()) throw ConfigError("candidate descriptor must be an object");
    CandidateDescriptor d;
    if (j.contains("structures")) {
        const auto& s = j.at("structures");
        d.s1 = parse_structure(require(s, "s1", "structures"));
        d.s2 = parse_structure(require(s, "s2", "structures"));
    } else {
        d.s1 = d.s2 = parse_structure(require(j, "structure", "candidate"));
    }
    d.map = string_list(require(j, "map", "candidate"), "map");
    if (j.contains("inverse")) d.inverse = string_list(j.at("inverse"), "inverse");
    if (j.contains("K_F")) d.k_f = j.at("K_F").is_string() ? j.at("K_F").get<std::string>() : j.at("K_F").dump();
    if (j.contains("hamiltonian")) d.hamiltonian = as_string(j.at("hamiltonian"), "hamiltonian");
    if (j.contains("potentials")) d.potentials = j.at("potentials");
    return d;
}

namespace {

forms::ChartMap chart_map(const std::vector<std::string>& comps, const Chart& source, const Chart& target,
                          const char* what) {
    if (static_cast<int>(comps.size()) != target.dim())
        throw ConfigError(std::string(what) + " needs " + std::to_string(target.dim()) + " components");
    std::vector<ScalarExpr> e;
    for (const auto& c : comps) e.push_back(parse_expr(c, source, true));
    return {source, target, std::move(e)};
}

}  // namespace

canonical::CanonicalCandidate build_candidate(const CandidateDescriptor& d, const lcs::LcsStructure& s1,
                                              const lcs::LcsStructure& s2) {
    canonical::CanonicalCandidate c;
    c.s1 = s1;
    c.s2 = s2;
    const auto src = s1.chart().time_extended();
    const auto dst = s2.chart().time_extended();
    c.f = chart_map(d.map, src, dst, "map");
    if (d.inverse) c.inverse = chart_map(*d.inverse, dst, src, "inverse");
    if (d.k_f) c.k_f = parse_expr(*d.k_f, src, true);
    return c;
}

std::optional<canonical::Potentials> build_potentials(const CandidateDescriptor& d, const lcs::LcsStructure& s1,
                                                      const lcs::LcsStructure& s2) {
    if (!d.potentials) return std::nullopt;
    const auto& p = *d.potentials;
    if (p.is_string()) {
        if (p.get<std::string>() != "liouville") throw ConfigError("potentials must be \"liouville\" or an object");
        if (!s1.chart().is_cotangent() || !s2.chart().is_cotangent())
            throw ConfigError("liouville potentials need cotangent structures");
        return canonical::Potentials{lcs::liouville_form(s1.chart()), lcs::liouville_form(s2.chart())};
    }
    return canonical::Potentials{form_from_json(require(p, "theta1", "potentials"), s1.chart(), 1),
                                 form_from_json(require(p, "theta2", "potentials"), s2.chart(), 1)};
}

std::string number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

void write_trajectory_csv(std::ostream& out, const dynamics::Trajectory& tr) {
    const int n = tr.chart.dim();
    const bool diag = !tr.residual.empty();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    if (diag) out << ",residual";
    out << '\n';
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        out << number(tr.t[k]);
        for (double v : tr.x[k]) out << ',' << number(v);
        if (diag) out << ',' << number(tr.residual[k]);
        out << '\n';
    }
}

Json trajectory_to_json(const dynamics::Trajectory& tr) {
    Json arr = Json::array();
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        Json s{{"t", tr.t[k]}, {"x", tr.x[k]}};
        if (!tr.residual.empty()) s["residual"] = tr.residual[k];
        arr.push_back(std::move(s));
    }
    return Json{{"coordinates", tr.chart.names()}, {"method", dynamics::to_string(tr.method)},
                {"dt", tr.nominal_dt}, {"samples", std::move(arr)}};
}

Json verdict_to_json(const forms::FormVerdict& v) {
    Json j{{"equal", v.equal}, {"path", v.exact ? "exact" : "sampled"}};
    if (!v.exact) {
        j["max_difference"] = v.max_difference;
        j["seed"] = v.seed;
    }
    if (v.first_mismatch) j["first_mismatch"] = *v.first_mismatch;
    return j;
}

}  // namespace lcsmech::io
