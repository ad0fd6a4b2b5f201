#include "wild_euler/scenario.hpp"

#include <fstream>
#include <cmath>
#include <functional>
#include <sstream>

namespace we {

using ojson = nlohmann::ordered_json;

namespace {

std::string join_messages(const std::vector<ConfigDiagnostic>& d) {
    std::string s;
    for (const auto& x : d) s += (s.empty() ? "" : "; ") + x.path + ": " + x.message;
    return s;
}

const char* kind_name(ChiTilde::Kind k) {
    switch (k) {
        case ChiTilde::Kind::constant: return "constant";
        case ChiTilde::Kind::cosine: return "cosine";
        case ChiTilde::Kind::sampled: return "sampled";
    }
    return "constant";
}

// Unknown keys and type mismatches against the default document.
void check_shape(const nlohmann::json& doc, const ojson& ref, const std::string& path, std::vector<ConfigDiagnostic>& out) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string p = path + "/" + it.key();
        if (!ref.contains(it.key())) {
            out.push_back({p, "unknown key"});
            continue;
        }
        const ojson& r = ref[it.key()];
        const auto& v = it.value();
        if (p == "/chi") {
            if (!v.is_null() && !v.is_number()) out.push_back({p, "expected number or null"});
        } else if (r.is_object()) {
            if (!v.is_object()) out.push_back({p, "expected object"});
            else check_shape(v, r, p, out);
        } else if (r.is_number_unsigned() || r.is_number_integer()) {
            if (!v.is_number_integer()) out.push_back({p, "expected integer"});
            else if (r.is_number_unsigned() && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
                out.push_back({p, "expected nonnegative integer"});
        } else if (r.is_number()) {
            if (!v.is_number()) out.push_back({p, "expected number"});
        } else if (r.is_string()) {
            if (!v.is_string()) out.push_back({p, "expected string"});
        } else if (r.is_boolean()) {
            if (!v.is_boolean()) out.push_back({p, "expected boolean"});
        }
    }
}

void merge(ojson& dst, const nlohmann::json& src) {
    for (auto it = src.begin(); it != src.end(); ++it) {
        if (it.value().is_object() && dst.contains(it.key()) && dst[it.key()].is_object()) merge(dst[it.key()], it.value());
        else dst[it.key()] = ojson::parse(it.value().dump());
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigDiagnostic> diags)
    : Error(ErrorCode::ConfigInvalid, join_messages(diags)), diags_(std::move(diags)) {}

ojson ConfigError::to_json() const {
    ojson j;
    j["status"] = "invalid_config";
    j["code"] = to_string(code());
    j["errors"] = ojson::array();
    for (const auto& d : diags_) j["errors"].push_back({{"path", d.path}, {"message", d.message}});
    return j;
}

ojson to_json(const Scenario& s) {
    ojson j;
    j["name"] = s.name;
    j["domain"] = {{"delta", s.domain.delta}, {"R", s.domain.R}, {"z_period", s.domain.z_period}, {"T", s.domain.T}};
    j["gamma"] = s.gamma;
    j["chi_tilde"] = {{"kind", kind_name(s.chi_tilde.kind)},
                      {"c0", s.chi_tilde.c0},
                      {"amp", s.chi_tilde.amp},
                      {"freq", s.chi_tilde.freq}};
    j["chi0"] = s.chi0;
    j["chi"] = s.chi ? ojson(*s.chi) : ojson(nullptr);
    j["chi_factor"] = s.chi_factor;
    j["fan"] = {{"r0", s.fan.r0}, {"lambda", s.fan.lambda}, {"eps", s.fan.eps}};
    j["grid"] = {{"nr", s.grid.nr}, {"nz", s.grid.nz}, {"nt", s.grid.nt}};
    j["breaking"] = {{"nr", s.breaking.nr}, {"n_theta", s.breaking.n_theta}, {"n_times", s.breaking.n_times}};
    j["ode_dt"] = s.ode_dt;
    j["validate"] = {{"n_tests", s.validate.n_tests}, {"residual_tol", s.validate.residual_tol}};
    j["equivalence"] = {{"n_tests", s.equivalence.n_tests},
                        {"agreement_tol", s.equivalence.agreement_tol},
                        {"residual_tol", s.equivalence.residual_tol}};
    j["identity_samples"] = s.identity_samples;
    j["laminate"] = {{"steps", s.laminate_steps},
                     {"N", s.laminate.N},
                     {"safety", s.laminate.safety},
                     {"n_angles", s.laminate.n_angles},
                     {"max_halvings", s.laminate.max_halvings},
                     {"max_centres", s.laminate.max_centres},
                     {"cutoff_fraction", s.laminate.cutoff_fraction},
                     {"residual_tol", s.laminate.residual_tol}};
    j["seed"] = s.seed;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError(std::vector<ConfigDiagnostic>{{"", "config must be a JSON object"}});
    const Scenario def;
    ojson m = to_json(def);
    std::vector<ConfigDiagnostic> diags;
    check_shape(doc, m, "", diags);
    if (!diags.empty()) throw ConfigError(diags);
    merge(m, doc);

    Scenario s;
    s.name = m["name"].get<std::string>();
    s.domain = {m["domain"]["delta"].get<double>(), m["domain"]["R"].get<double>(),
                m["domain"]["z_period"].get<double>(), m["domain"]["T"].get<double>()};
    s.gamma = m["gamma"].get<double>();
    const std::string kind = m["chi_tilde"]["kind"].get<std::string>();
    const double c0 = m["chi_tilde"]["c0"].get<double>(), amp = m["chi_tilde"]["amp"].get<double>(),
                 freq = m["chi_tilde"]["freq"].get<double>();
    if (kind == "constant") s.chi_tilde = ChiTilde::constant(c0);
    else if (kind == "cosine") s.chi_tilde = ChiTilde::cosine(c0, amp, freq);
    else diags.push_back({"/chi_tilde/kind", "expected \"constant\" or \"cosine\""});
    s.chi0 = m["chi0"].get<double>();
    if (!m["chi"].is_null()) s.chi = m["chi"].get<double>();
    s.chi_factor = m["chi_factor"].get<double>();
    s.fan.r0 = m["fan"]["r0"].get<double>();
    s.fan.lambda = m["fan"]["lambda"].get<double>();
    s.fan.eps = m["fan"]["eps"].get<double>();
    s.fan.T = s.domain.T;
    s.grid = {s.domain, m["grid"]["nr"].get<int>(), m["grid"]["nz"].get<int>(), m["grid"]["nt"].get<int>()};
    s.breaking = {m["breaking"]["nr"].get<int>(), m["breaking"]["n_theta"].get<int>(), m["breaking"]["n_times"].get<int>()};
    s.ode_dt = m["ode_dt"].get<double>();
    s.validate = {m["validate"]["n_tests"].get<std::size_t>(), m["validate"]["residual_tol"].get<double>()};
    s.equivalence = {m["equivalence"]["n_tests"].get<std::size_t>(), m["equivalence"]["agreement_tol"].get<double>(),
                     m["equivalence"]["residual_tol"].get<double>()};
    s.identity_samples = m["identity_samples"].get<std::size_t>();
    const auto& l = m["laminate"];
    s.laminate_steps = l["steps"].get<int>();
    s.laminate.N = l["N"].get<int>();
    s.laminate.safety = l["safety"].get<double>();
    s.laminate.n_angles = l["n_angles"].get<int>();
    s.laminate.max_halvings = l["max_halvings"].get<int>();
    s.laminate.max_centres = l["max_centres"].get<int>();
    s.laminate.cutoff_fraction = l["cutoff_fraction"].get<double>();
    s.laminate.residual_tol = l["residual_tol"].get<double>();
    s.seed = m["seed"].get<std::uint64_t>();

    const auto more = validate_scenario(s);
    diags.insert(diags.end(), more.begin(), more.end());
    if (!diags.empty()) throw ConfigError(diags);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::vector<ConfigDiagnostic>{{"", "cannot read " + path}});
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::vector<ConfigDiagnostic>{{"", std::string("parse error: ") + e.what()}});
    }
    return scenario_from_json(doc);
}

std::vector<ConfigDiagnostic> validate_scenario(const Scenario& s) {
    std::vector<ConfigDiagnostic> d;
    auto guard = [&](const std::string& path, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const Error& e) {
            d.push_back({path, e.what()});
        }
    };
    auto need = [&](bool ok, const std::string& path, const std::string& msg) {
        if (!ok) d.push_back({path, msg});
    };
    guard("/domain", [&] { s.domain.validate(); });
    need(s.gamma > 1.0 && std::isfinite(s.gamma), "/gamma", "gamma must exceed 1");
    guard("/chi_tilde", [&] { s.chi_tilde.validate(s.domain.T); });
    need(s.chi0 > 0.0 && std::isfinite(s.chi0), "/chi0", "chi0 must be positive");
    if (s.chi) need(*s.chi > 0.0 && std::isfinite(*s.chi), "/chi", "chi must be positive");
    need(s.chi_factor > 0.0 && std::isfinite(s.chi_factor), "/chi_factor", "chi_factor must be positive");
    guard("/fan", [&] {
        FanParams f = s.fan;
        f.T = s.domain.T;
        f.validate(s.domain);
    });
    need(s.grid.nr >= 4 && s.grid.nz >= 4 && s.grid.nt >= 4, "/grid", "grid needs at least 4 intervals per axis");
    need(s.breaking.nr >= 4, "/breaking/nr", "at least 4 intervals");
    need(s.breaking.n_theta >= 4, "/breaking/n_theta", "at least 4 angles");
    need(s.breaking.n_times >= 2, "/breaking/n_times", "at least 2 times");
    need(s.ode_dt > 0.0 && s.ode_dt <= s.domain.T, "/ode_dt", "dt must lie in (0, T]");
    need(s.validate.n_tests >= 1, "/validate/n_tests", "at least one test function");
    need(s.validate.residual_tol > 0.0, "/validate/residual_tol", "must be positive");
    need(s.equivalence.n_tests >= 1, "/equivalence/n_tests", "at least one test function");
    need(s.equivalence.agreement_tol > 0.0, "/equivalence/agreement_tol", "must be positive");
    need(s.equivalence.residual_tol > 0.0, "/equivalence/residual_tol", "must be positive");
    need(s.identity_samples >= 1, "/identity_samples", "at least one sample");
    need(s.laminate_steps >= 1, "/laminate/steps", "at least one step");
    need(s.laminate.safety > 0.0 && s.laminate.safety <= 1.0, "/laminate/safety", "must lie in (0, 1]");
    need(s.laminate.n_angles >= 1, "/laminate/n_angles", "at least one angle");
    need(s.laminate.max_halvings >= 0, "/laminate/max_halvings", "must be nonnegative");
    need(s.laminate.max_centres >= 1, "/laminate/max_centres", "at least one centre");
    need(s.laminate.cutoff_fraction > 0.0 && s.laminate.cutoff_fraction < 0.5, "/laminate/cutoff_fraction",
         "must lie in (0, 1/2)");
    need(s.laminate.residual_tol > 0.0, "/laminate/residual_tol", "must be positive");
    const double rmin = s.laminate.cutoff_fraction * std::min(s.domain.R - s.domain.delta, s.domain.z_period);
    need(s.laminate.N >= 1 && s.laminate.N * rmin >= 4.0, "/laminate/N", "N must be at least 4 / cutoff radius");
    return d;
}

}  // namespace we
