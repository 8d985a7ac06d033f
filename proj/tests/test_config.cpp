#include "doctest.h"

#include <cmath>
#include <string>

#include "dampde/config.hpp"
#include "dampde/expr.hpp"

using namespace dampde;

namespace {

std::string config_error_message(const std::string& json_text) {
    try {
        parse_run_config(json_text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("empty config yields the documented defaults") {
    const RunConfig cfg = parse_run_config("{}");
    CHECK(cfg.params.alpha == 1.0);
    CHECK(cfg.params.beta == 1.0);
    CHECK(cfg.params.delta == 0.1);
    CHECK(cfg.params.T == 1.0);
    CHECK(cfg.n == 32);
    CHECK(cfg.m == 32);
    CHECK(cfg.case_name == "manufactured-linear");
    CHECK(!cfg.custom.has_value());
    CHECK(cfg.alpha_l == 1.0);
    CHECK(cfg.use_ld);
    CHECK(cfg.pcg_rel_tol == 1e-12);
    CHECK(cfg.fp_tol == 1e-13);
    CHECK(cfg.cg_rel_tol == 1e-10);
    CHECK(cfg.step_mode == "fixed-point");
}

TEST_CASE("explicit values land in the right fields") {
    const RunConfig cfg = parse_run_config(R"({
        "params": {"alpha": 2.0, "beta": 0.5, "delta": 0.2, "T": 3.0},
        "discretization": {"n": 8, "M": 16},
        "ocp": {"alpha_l": 0.25, "use_ld": false},
        "solver": {"pcg_rel_tol": 1e-9, "fp_tol": 1e-8, "cg_rel_tol": 1e-7,
                   "mode": "monolithic"}
    })");
    CHECK(cfg.params.alpha == 2.0);
    CHECK(cfg.params.beta == 0.5);
    CHECK(cfg.params.delta == 0.2);
    CHECK(cfg.params.T == 3.0);
    CHECK(cfg.n == 8);
    CHECK(cfg.m == 16);
    CHECK(cfg.alpha_l == 0.25);
    CHECK(!cfg.use_ld);
    CHECK(cfg.pcg_rel_tol == 1e-9);
    CHECK(cfg.fp_tol == 1e-8);
    CHECK(cfg.cg_rel_tol == 1e-7);
    CHECK(cfg.step_mode == "monolithic");
}

TEST_CASE("bad configs raise errors naming the offending key") {
    CHECK(config_error_message(R"({"params": {"gamma": 1.0}})").find("params.gamma") !=
          std::string::npos);
    CHECK(config_error_message(R"({"discretisation": {}})").find("discretisation") !=
          std::string::npos);
    CHECK(config_error_message(R"({"params": {"alpha": "big"}})").find("params.alpha") !=
          std::string::npos);
    CHECK(config_error_message(R"({"params": {"alpha": -1.0}})").find("params.alpha") !=
          std::string::npos);
    CHECK(config_error_message(R"({"discretization": {"n": 2.5}})").find("discretization.n") !=
          std::string::npos);
    CHECK(config_error_message(R"({"discretization": {"n": 0}})").find("at least 1") !=
          std::string::npos);
    CHECK(config_error_message(R"({"discretization": {"M": -3}})").find("at least 1") !=
          std::string::npos);
    CHECK(config_error_message(R"({"ocp": {"use_ld": 1}})").find("ocp.use_ld") !=
          std::string::npos);
    CHECK(config_error_message(R"({"solver": {"mode": "direct"}})").find("solver.mode") !=
          std::string::npos);
    CHECK(config_error_message(R"({"case": "linear"})").find("case") != std::string::npos);
    CHECK(config_error_message("[1,2]").find("object") != std::string::npos);
    CHECK(config_error_message("{not json").find("not valid JSON") != std::string::npos);
}

TEST_CASE("custom cases require their expressions") {
    CHECK(config_error_message(R"({"case": "custom"})").find("custom") != std::string::npos);
    CHECK(config_error_message(R"({"case": "custom", "custom": {}})").find("custom.l") !=
          std::string::npos);
    CHECK(config_error_message(R"({"custom": {"l": "0"}})").find("only valid with case") !=
          std::string::npos);

    const RunConfig cfg = parse_run_config(R"json({
        "case": "custom",
        "custom": {"l": "sin(pi*x)*sin(pi*y)", "exact_phi": "0"}
    })json");
    REQUIRE(cfg.custom.has_value());
    CHECK(cfg.custom->l == "sin(pi*x)*sin(pi*y)");
    CHECK(cfg.custom->d0 == "0");
    CHECK(cfg.custom->exact_phi.has_value());
    CHECK(!cfg.custom->exact_d.has_value());
}

TEST_CASE("expression values and precedence") {
    CHECK(parse_expression("1+2*3").evaluate(0, 0, 0) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(parse_expression("(1+2)*3").evaluate(0, 0, 0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(parse_expression("2^3^2").evaluate(0, 0, 0) == doctest::Approx(512.0).epsilon(1e-15));
    CHECK(parse_expression("-2^2").evaluate(0, 0, 0) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(parse_expression("7/2/2").evaluate(0, 0, 0) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(parse_expression("1-2-3").evaluate(0, 0, 0) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(parse_expression("pi").evaluate(0, 0, 0) ==
          doctest::Approx(3.14159265358979323846).epsilon(1e-15));
    CHECK(parse_expression("sin(pi/2)").evaluate(0, 0, 0) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(parse_expression("cos(0)+exp(1)").evaluate(0, 0, 0) ==
          doctest::Approx(1.0 + std::exp(1.0)).epsilon(1e-15));
    CHECK(parse_expression("t*x - y").evaluate(2.0, 3.0, 4.0) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK(parse_expression(" 1 + t ").evaluate(0.5, 0, 0) ==
          doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("malformed expressions report the failure position") {
    const auto message = [](const std::string& text) -> std::string {
        try {
            parse_expression(text);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return {};
    };
    CHECK(message("1+").find("expected a value") != std::string::npos);
    CHECK(message("1+*2").find("position 2") != std::string::npos);
    CHECK(message("(1+2").find("expected ')'") != std::string::npos);
    CHECK(message("1 2").find("unexpected trailing input") != std::string::npos);
    CHECK(message("foo(1)").find("unknown name 'foo'") != std::string::npos);
    CHECK(message("sin 1").find("needs parentheses") != std::string::npos);
    CHECK(message("1 + $").find("unexpected character '$'") != std::string::npos);
    CHECK(message("").find("expected a value") != std::string::npos);
    CHECK(Expression{}.valid() == false);
    CHECK_THROWS_AS(Expression{}.evaluate(0, 0, 0), ConfigError);
}

TEST_CASE("custom case expressions evaluate inside the solver setup") {
    const RunConfig cfg = parse_run_config(R"({
        "case": "custom",
        "custom": {
            "l": "exp(t)*x*y",
            "d0": "x + y",
            "exact_phi": "t^2",
            "l_d": "2*x"
        }
    })");
    const CaseDefinition cs = build_case(cfg);
    CHECK(cs.l.evaluate(0.5, 0.25, 0.5) ==
          doctest::Approx(std::exp(0.5) * 0.125).epsilon(1e-14));
    CHECK(cs.d0.evaluate(0.0, 0.25, 0.5) == doctest::Approx(0.75).epsilon(1e-14));
    REQUIRE(cs.exact_phi.has_value());
    CHECK(cs.exact_phi->evaluate(0.5, 0.1, 0.9) == doctest::Approx(0.25).epsilon(1e-14));
    REQUIRE(cs.l_d.has_value());
    CHECK(cs.l_d->evaluate(0.0, 0.3, 0.0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(!cs.exact_d.has_value());
    CHECK(!cs.exact_control.has_value());

    const RunConfig mf = parse_run_config("{}");
    const CaseDefinition ms = build_case(mf);
    CHECK(ms.exact_phi.has_value());
    CHECK(ms.exact_control.has_value());
    CHECK(ms.l.evaluate(0.0, 0.5, 0.5) != 0.0);

    const SolverSettings settings = solver_settings(mf);
    CHECK(settings.pcg_rel_tol == 1e-12);
    CHECK(settings.step.fp_tol == 1e-13);
    CHECK(settings.opt.cg_rel_tol == 1e-10);
}
