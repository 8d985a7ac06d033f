#include "config.hpp"

#include <json.hpp>

#include "errors.hpp"
#include "expr.hpp"

namespace dampde {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown config key \"" + prefix + item.key() + "\"");
        }
    }
}

double get_number(const json& obj, const std::string& prefix, const char* key, double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError("config key \"" + prefix + key + "\" must be a number");
    }
    return v.get<double>();
}

long long get_integer(const json& obj, const std::string& prefix, const char* key,
                      long long fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError("config key \"" + prefix + key + "\" must be an integer");
    }
    return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& prefix, const char* key, bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
        throw ConfigError("config key \"" + prefix + key + "\" must be a boolean");
    }
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& prefix, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError("config key \"" + prefix + key + "\" must be a string");
    }
    return v.get<std::string>();
}

std::optional<std::string> get_optional_string(const json& obj, const std::string& prefix,
                                               const char* key) {
    if (!obj.contains(key)) {
        return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError("config key \"" + prefix + key + "\" must be a string");
    }
    return v.get<std::string>();
}

const json& get_object(const json& obj, const std::string& prefix, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_object()) {
        throw ConfigError("config key \"" + prefix + key + "\" must be an object");
    }
    return v;
}

void require_positive(double v, const char* key) {
    if (!(v > 0.0)) {
        throw ConfigError(std::string("config key \"") + key + "\" must be positive");
    }
}

TimeFunction expression_function(const std::string& text) {
    const Expression e = parse_expression(text);
    return make_time_function(
        [e](double t, double x, double y) { return e.evaluate(t, x, y); });
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    check_keys(doc, "", {"params", "discretization", "case", "custom", "ocp", "solver"});

    RunConfig cfg;
    if (doc.contains("params")) {
        const json& p = get_object(doc, "", "params");
        check_keys(p, "params.", {"alpha", "beta", "delta", "T"});
        cfg.params.alpha = get_number(p, "params.", "alpha", cfg.params.alpha);
        cfg.params.beta = get_number(p, "params.", "beta", cfg.params.beta);
        cfg.params.delta = get_number(p, "params.", "delta", cfg.params.delta);
        cfg.params.T = get_number(p, "params.", "T", cfg.params.T);
        require_positive(cfg.params.alpha, "params.alpha");
        require_positive(cfg.params.beta, "params.beta");
        require_positive(cfg.params.delta, "params.delta");
        require_positive(cfg.params.T, "params.T");
    }
    if (doc.contains("discretization")) {
        const json& d = get_object(doc, "", "discretization");
        check_keys(d, "discretization.", {"n", "M"});
        const long long n = get_integer(d, "discretization.", "n", cfg.n);
        const long long m = get_integer(d, "discretization.", "M",
                                        static_cast<long long>(cfg.m));
        if (n < 1) {
            throw ConfigError("config key \"discretization.n\" must be at least 1");
        }
        if (m < 1) {
            throw ConfigError("config key \"discretization.M\" must be at least 1");
        }
        cfg.n = static_cast<int>(n);
        cfg.m = static_cast<std::size_t>(m);
    }
    cfg.case_name = get_string(doc, "", "case", cfg.case_name);
    if (cfg.case_name != "manufactured-linear" && cfg.case_name != "custom") {
        throw ConfigError(
            "config key \"case\" must be \"manufactured-linear\" or \"custom\"");
    }
    if (doc.contains("custom")) {
        if (cfg.case_name != "custom") {
            throw ConfigError("config key \"custom\" is only valid with case \"custom\"");
        }
        const json& c = get_object(doc, "", "custom");
        check_keys(c, "custom.",
                   {"l", "d0", "exact_phi", "exact_d", "phi_d", "d_d", "l_d", "exact_l"});
        CustomCaseConfig custom;
        if (!c.contains("l")) {
            throw ConfigError("config key \"custom.l\" is required for custom cases");
        }
        custom.l = get_string(c, "custom.", "l", "");
        custom.d0 = get_string(c, "custom.", "d0", custom.d0);
        custom.exact_phi = get_optional_string(c, "custom.", "exact_phi");
        custom.exact_d = get_optional_string(c, "custom.", "exact_d");
        custom.phi_d = get_optional_string(c, "custom.", "phi_d");
        custom.d_d = get_optional_string(c, "custom.", "d_d");
        custom.l_d = get_optional_string(c, "custom.", "l_d");
        custom.exact_l = get_optional_string(c, "custom.", "exact_l");
        cfg.custom = std::move(custom);
    } else if (cfg.case_name == "custom") {
        throw ConfigError("config key \"custom\" is required for custom cases");
    }
    if (doc.contains("ocp")) {
        const json& o = get_object(doc, "", "ocp");
        check_keys(o, "ocp.", {"alpha_l", "use_ld"});
        cfg.alpha_l = get_number(o, "ocp.", "alpha_l", cfg.alpha_l);
        cfg.use_ld = get_bool(o, "ocp.", "use_ld", cfg.use_ld);
        require_positive(cfg.alpha_l, "ocp.alpha_l");
    }
    if (doc.contains("solver")) {
        const json& s = get_object(doc, "", "solver");
        check_keys(s, "solver.", {"pcg_rel_tol", "fp_tol", "cg_rel_tol", "mode"});
        cfg.pcg_rel_tol = get_number(s, "solver.", "pcg_rel_tol", cfg.pcg_rel_tol);
        cfg.fp_tol = get_number(s, "solver.", "fp_tol", cfg.fp_tol);
        cfg.cg_rel_tol = get_number(s, "solver.", "cg_rel_tol", cfg.cg_rel_tol);
        cfg.step_mode = get_string(s, "solver.", "mode", cfg.step_mode);
        require_positive(cfg.pcg_rel_tol, "solver.pcg_rel_tol");
        require_positive(cfg.fp_tol, "solver.fp_tol");
        require_positive(cfg.cg_rel_tol, "solver.cg_rel_tol");
        if (cfg.step_mode != "fixed-point" && cfg.step_mode != "monolithic") {
            throw ConfigError(
                "config key \"solver.mode\" must be \"fixed-point\" or \"monolithic\"");
        }
    }
    return cfg;
}

CaseDefinition build_case(const RunConfig& cfg) {
    CaseDefinition cs;
    if (cfg.case_name == "manufactured-linear") {
        cs = case_from_manufactured(manufactured_case(cfg.params));
    } else {
        const CustomCaseConfig& custom = *cfg.custom;
        cs.params = cfg.params;
        cs.l = expression_function(custom.l);
        cs.d0 = expression_function(custom.d0);
        const auto set = [](std::optional<TimeFunction>& dst,
                            const std::optional<std::string>& src) {
            if (src) {
                dst = expression_function(*src);
            }
        };
        set(cs.exact_phi, custom.exact_phi);
        set(cs.exact_d, custom.exact_d);
        set(cs.phi_d, custom.phi_d);
        set(cs.d_d, custom.d_d);
        set(cs.l_d, custom.l_d);
        set(cs.exact_control, custom.exact_l);
    }
    cs.alpha_l = cfg.alpha_l;
    cs.use_ld = cfg.use_ld;
    return cs;
}

SolverSettings solver_settings(const RunConfig& cfg) {
    SolverSettings s;
    s.pcg_rel_tol = cfg.pcg_rel_tol;
    s.step.fp_tol = cfg.fp_tol;
    s.step.mode = cfg.step_mode == "monolithic" ? StepMode::Monolithic : StepMode::FixedPoint;
    s.opt.cg_rel_tol = cfg.cg_rel_tol;
    return s;
}

} // namespace dampde
