#pragma once

#include <optional>
#include <string>

#include "operators.hpp"
#include "study.hpp"

namespace dampde {

// Expression strings of a user-defined case. The source l and initial value
// d0 define the problem; the optional entries supply reference data for error
// columns and tracking targets.
struct CustomCaseConfig {
    std::string l;
    std::string d0 = "0";
    std::optional<std::string> exact_phi;
    std::optional<std::string> exact_d;
    std::optional<std::string> phi_d;
    std::optional<std::string> d_d;
    std::optional<std::string> l_d;
    std::optional<std::string> exact_l;
};

struct RunConfig {
    ModelParams params;
    int n = 32;
    std::size_t m = 32;
    std::string case_name = "manufactured-linear";
    std::optional<CustomCaseConfig> custom;
    double alpha_l = 1.0;
    bool use_ld = true;
    double pcg_rel_tol = 1e-12;
    double fp_tol = 1e-13;
    double cg_rel_tol = 1e-10;
    std::string step_mode = "fixed-point";  // or "monolithic"
};

// Parses and schema-checks the JSON document; unknown keys, wrong types, and
// out-of-range values raise ConfigError naming the offending key.
RunConfig parse_run_config(const std::string& json_text);

CaseDefinition build_case(const RunConfig& cfg);

SolverSettings solver_settings(const RunConfig& cfg);

} // namespace dampde
