#include "problem_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "cdde/error.hpp"

namespace cdde::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) fail(where, "unknown key \"" + key + "\"");
    }
}

const json& member(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

Vector vector_of(const json& v, const std::string& where, std::optional<std::size_t> broadcast = {}) {
    if (v.is_number()) {
        if (!broadcast) fail(where, "expected an array");
        return Vector(*broadcast, v.get<double>());
    }
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    if (broadcast && out.size() != *broadcast) {
        fail(where, "expected " + std::to_string(*broadcast) + " entries, got " + std::to_string(out.size()));
    }
    try {
        return Vector(std::move(out));
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

Matrix matrix_of(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    std::vector<double> data;
    for (std::size_t r = 0; r < rows; ++r) {
        const Vector row = vector_of(v[r], where + "[" + std::to_string(r) + "]");
        if (r == 0) cols = row.size();
        if (row.size() != cols) fail(where, "rows have different lengths");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(rows, cols, std::move(data));
}

SignalSpec signal_of(const json& v, const std::string& where, std::size_t dim) {
    if (!v.is_object()) fail(where, "expected a signal object");
    reject_unknown(v, where, {"kind", "amplitude", "frequency", "offset"});
    const json& kind_v = member(v, "kind", where);
    if (!kind_v.is_string()) fail(where + ".kind", "expected a string");
    const auto kind = parse_signal_kind(kind_v.get<std::string>());
    if (!kind) fail(where + ".kind", "unknown signal kind \"" + kind_v.get<std::string>() + "\"");
    auto field = [&](const char* key) {
        const auto it = v.find(key);
        if (it == v.end()) return Vector::zeros(dim);
        return vector_of(*it, where + "." + key, dim);
    };
    const Vector amplitude = *kind == SignalKind::Zero ? Vector::zeros(dim) : vector_of(member(v, "amplitude", where), where + ".amplitude", dim);
    return SignalSpec(*kind, amplitude, field("frequency"), field("offset"));
}

SystemSpec system_of(const json& v) {
    const std::string where = "system";
    if (!v.is_object()) fail(where, "expected an object");
    reject_unknown(v, where, {"A", "B", "C", "D", "h_max", "omega_bar", "d_bar", "psi_bar", "phi_bar"});
    SystemSpec s;
    s.A = matrix_of(member(v, "A", where), "system.A");
    s.B = matrix_of(member(v, "B", where), "system.B");
    s.C = matrix_of(member(v, "C", where), "system.C");
    s.D = matrix_of(member(v, "D", where), "system.D");
    s.h_max = number(member(v, "h_max", where), "system.h_max");
    s.omega_bar = vector_of(member(v, "omega_bar", where), "system.omega_bar", s.A.rows());
    s.d_bar = vector_of(member(v, "d_bar", where), "system.d_bar", s.D.rows());
    s.psi_bar = vector_of(member(v, "psi_bar", where), "system.psi_bar", s.A.rows());
    s.phi_bar = vector_of(member(v, "phi_bar", where), "system.phi_bar", s.D.rows());
    // Shapes are an input matter; sign conditions are hypotheses and are
    // left to validate_structure so `check` can report them.
    const std::size_t n = s.A.rows();
    const std::size_t m = s.D.rows();
    if (n == 0 || !s.A.square()) fail("system.A", "must be a nonempty square matrix");
    if (!s.D.square()) fail("system.D", "must be square");
    if (s.B.rows() != n || s.B.cols() != m) fail("system.B", "must be n x m");
    if (s.C.rows() != m || s.C.cols() != n) fail("system.C", "must be m x n");
    if (!(s.h_max >= 0.0)) fail("system.h_max", "must be nonnegative");
    return clamp_roundoff(s);
}

SimulationScenario scenario_of(const json& v, const SystemSpec& spec) {
    const std::string where = "scenario";
    if (!v.is_object()) fail(where, "expected an object");
    reject_unknown(v, where, {"omega", "d", "h1", "h2", "psi", "phi"});
    SimulationScenario sc = extreme_scenario(spec);
    const std::size_t n = spec.n();
    const std::size_t m = spec.m();
    if (v.contains("omega")) sc.omega = signal_of(v["omega"], "scenario.omega", n);
    if (v.contains("d")) sc.d = signal_of(v["d"], "scenario.d", m);
    if (v.contains("h1")) sc.h1 = signal_of(v["h1"], "scenario.h1", 1);
    if (v.contains("h2")) sc.h2 = signal_of(v["h2"], "scenario.h2", 1);
    if (v.contains("psi")) sc.psi = vector_of(v["psi"], "scenario.psi", n);
    if (v.contains("phi")) {
        const json& phi = v["phi"];
        sc.phi = phi.is_object() ? signal_of(phi, "scenario.phi", m)
                                 : SignalSpec::constant(vector_of(phi, "scenario.phi", m));
    }
    return sc;
}

ProblemOptions options_of(const json& v, std::size_t dim) {
    const std::string where = "options";
    if (!v.is_object()) fail(where, "expected an object");
    reject_unknown(v, where, {"alpha_step", "step", "t_end", "xi"});
    ProblemOptions o;
    if (v.contains("alpha_step")) o.alpha_step = number(v["alpha_step"], "options.alpha_step");
    if (v.contains("step")) o.step = number(v["step"], "options.step");
    if (v.contains("t_end")) o.t_end = number(v["t_end"], "options.t_end");
    if (v.contains("xi")) o.xi = vector_of(v["xi"], "options.xi", dim);
    if (!(o.alpha_step > 0.0)) fail("options.alpha_step", "must be positive");
    if (!(o.step > 0.0)) fail("options.step", "must be positive");
    if (!(o.t_end >= 0.0)) fail("options.t_end", "must be nonnegative");
    return o;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ordered_json to_json(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

SimulationScenario Problem::scenario_or_extreme() const {
    SimulationScenario sc = scenario ? *scenario : extreme_scenario(spec);
    sc.step = options.step;
    sc.t_end = options.t_end;
    return sc;
}

Problem parse_problem(const std::string& text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) fail("document", "expected an object");
    reject_unknown(doc, "document", {"system", "scenario", "options"});
    Problem p;
    p.spec = system_of(member(doc, "system", "document"));
    if (doc.contains("scenario")) p.scenario = scenario_of(doc["scenario"], p.spec);
    if (doc.contains("options")) p.options = options_of(doc["options"], p.spec.n() + p.spec.m());
    return p;
}

Problem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

std::string certificate_to_json(const BoundCertificate& c) {
    ordered_json doc;
    doc["eta"] = to_json(c.eta);
    doc["varsigma"] = to_json(c.varsigma);
    doc["p"] = to_json(c.p);
    doc["q"] = to_json(c.q);
    doc["mu"] = c.mu;
    doc["mu_raw"] = c.mu_raw;
    doc["T_star"] = c.T_star;
    doc["constant_bound"] = c.constant_bound;
    doc["T"] = c.convergence.T;
    doc["per_component_T"] = to_json(c.convergence.per_component_T);
    doc["per_component_alpha"] = to_json(c.convergence.per_component_alpha);
    doc["alpha_step"] = c.alpha_step;
    return doc.dump(2) + "\n";
}

BoundCertificate certificate_from_json(const std::string& text) {
    const json doc = parse_json(text);
    const std::string where = "certificate";
    if (!doc.is_object()) fail(where, "expected an object");
    BoundCertificate c;
    c.eta = vector_of(member(doc, "eta", where), "certificate.eta");
    c.varsigma = vector_of(member(doc, "varsigma", where), "certificate.varsigma");
    c.p = vector_of(member(doc, "p", where), "certificate.p", c.eta.size());
    c.q = vector_of(member(doc, "q", where), "certificate.q", c.varsigma.size());
    c.mu = number(member(doc, "mu", where), "certificate.mu");
    c.T_star = number(member(doc, "T_star", where), "certificate.T_star");
    const json& cb = member(doc, "constant_bound", where);
    if (!cb.is_boolean()) fail("certificate.constant_bound", "expected a boolean");
    c.constant_bound = cb.get<bool>();
    if (doc.contains("mu_raw")) c.mu_raw = number(doc["mu_raw"], "certificate.mu_raw");
    if (doc.contains("T")) c.convergence.T = number(doc["T"], "certificate.T");
    if (doc.contains("per_component_T"))
        c.convergence.per_component_T = vector_of(doc["per_component_T"], "certificate.per_component_T");
    if (doc.contains("per_component_alpha"))
        c.convergence.per_component_alpha = vector_of(doc["per_component_alpha"], "certificate.per_component_alpha");
    if (doc.contains("alpha_step")) c.alpha_step = number(doc["alpha_step"], "certificate.alpha_step");
    if (!c.constant_bound && !(c.T_star > 0.0)) fail("certificate.T_star", "must be positive");
    if (!(c.mu > 0.0 && c.mu < 1.0)) fail("certificate.mu", "must lie in (0, 1)");
    return c;
}

BoundCertificate load_certificate(const std::string& path) {
    return certificate_from_json(read_file(path));
}

}  // namespace cdde::io
