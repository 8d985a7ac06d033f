#include "runner.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "config.hpp"
#include "errors.hpp"
#include "error_norms.hpp"
#include "ocp.hpp"
#include "parallel.hpp"
#include "state_solver.hpp"
#include "study.hpp"
#include "svg.hpp"
#include "verify.hpp"

namespace dampde {

namespace {

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int worker_count(const JobOptions& opt) {
    return opt.threads > 0 ? opt.threads : default_thread_count();
}

RunConfig effective_config(const std::string& config_json, const JobOptions& opt) {
    RunConfig cfg = parse_run_config(config_json.empty() ? std::string("{}") : config_json);
    if (opt.n) {
        if (*opt.n < 1) {
            throw ConfigError("mesh resolution n must be at least 1");
        }
        cfg.n = *opt.n;
    }
    if (opt.m) {
        if (*opt.m < 1) {
            throw ConfigError("time step count M must be at least 1");
        }
        cfg.m = *opt.m;
    }
    return cfg;
}

std::string dump_nodal_history(const OperatorSet& ops, const TimeGrid& grid,
                               const SpaceTimeField& field) {
    std::string out = "t,x,y,value\n";
    const auto& nodes = ops.mesh->nodes;
    const auto append_level = [&](double t, const DenseVector& nodal) {
        for (std::size_t node = 0; node < nodes.size(); ++node) {
            const std::ptrdiff_t dof = ops.x_space->dof_of_node[node];
            out += fmt9(t);
            out += ',' + fmt9(nodes[node][0]);
            out += ',' + fmt9(nodes[node][1]);
            out += ',' + fmt9(nodal[static_cast<std::size_t>(dof)]);
            out += '\n';
        }
    };
    if (field.initial_trace) {
        append_level(grid.breakpoints.front(), *field.initial_trace);
    }
    DenseVector emb;
    for (std::size_t k = 0; k < field.intervals(); ++k) {
        if (field.space->kind == SpaceKind::DirichletP1) {
            ops.embed(field.coeffs[k], emb);
            append_level(grid.breakpoints[k + 1], emb);
        } else {
            append_level(grid.breakpoints[k + 1], field.coeffs[k]);
        }
    }
    return out;
}

void start_cell(StudyCell& cell, const RunConfig& cfg, const ModelParams& params) {
    cell.n = cfg.n;
    cell.m = cfg.m;
    cell.tau = params.T / static_cast<double>(cfg.m);
    cell.h_over_sqrt2 = 1.0 / static_cast<double>(cfg.n);
}

std::string cell_prefix(const std::string& mode, const StudyCell& cell) {
    return mode + " n=" + std::to_string(cell.n) + " M=" + std::to_string(cell.m);
}

JobResult simulate_job(const RunConfig& cfg, const JobOptions& opt) {
    const CaseDefinition cs = build_case(cfg);
    const SolverSettings settings = solver_settings(cfg);
    StudyCell cell;
    start_cell(cell, cfg, cs.params);

    std::shared_ptr<const OperatorSet> ops;
    std::optional<ForwardResult> fwd;
    TimeGrid grid;
    const auto start = std::chrono::steady_clock::now();
    try {
        ops = make_operator_set(cfg.n, cs.params, settings.pcg_rel_tol);
        grid = uniform_time_grid(cs.params.T, static_cast<int>(cfg.m));
        ForwardInput fin;
        fin.l = &cs.l;
        fin.d0 = &cs.d0;
        fwd = solve_state(*ops, grid, fin, settings.step);
        cell.min_state_slack = fwd->stability.min_slack;
        cell.max_ratio_excess = fwd->stats.max_ratio_excess;
        if (cs.exact_phi) {
            cell.err_phi = endpoint_l2_error(*ops->mesh, fwd->phi, *cs.exact_phi);
        }
        if (cs.exact_d) {
            cell.err_d = endpoint_l2_error(*ops->mesh, fwd->d, *cs.exact_d);
        }
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.message = e.what();
    }
    cell.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    JobResult res;
    res.numeric_failure = !cell.ok;
    res.outputs.push_back({"simulate.csv", cells_csv("simulate", {cell})});
    if (cell.ok && opt.dump_fields) {
        res.outputs.push_back({"fields_phi.csv", dump_nodal_history(*ops, grid, fwd->phi)});
        res.outputs.push_back({"fields_d.csv", dump_nodal_history(*ops, grid, fwd->d)});
    }
    std::ostringstream os;
    os << cell_prefix("simulate", cell);
    if (!cell.ok) {
        os << ": FAILED: " << cell.message;
    } else {
        if (cell.err_phi) {
            os << " err_phi=" << fmt6(*cell.err_phi);
        }
        if (cell.err_d) {
            os << " err_d=" << fmt6(*cell.err_d);
        }
        os << " min_slack=" << fmt6(cell.min_state_slack);
        os << " seconds=" << fmt6(cell.seconds);
    }
    os << '\n';
    res.summary = os.str();
    return res;
}

JobResult optimize_job(const RunConfig& cfg) {
    const CaseDefinition cs = build_case(cfg);
    const SolverSettings settings = solver_settings(cfg);
    StudyCell cell;
    start_cell(cell, cfg, cs.params);

    const auto start = std::chrono::steady_clock::now();
    try {
        ControlProblem pb;
        pb.ops = make_operator_set(cfg.n, cs.params, settings.pcg_rel_tol);
        pb.grid = uniform_time_grid(cs.params.T, static_cast<int>(cfg.m));
        pb.alpha_l = cs.alpha_l;
        pb.desired_phi = cs.phi_d;
        pb.desired_d = cs.d_d;
        if (cs.use_ld && cs.l_d) {
            pb.control_shift = cs.l_d;
        }
        pb.d0 = cs.d0;
        const OcpResult res = solve_ocp(pb, settings.opt, settings.step);
        cell.min_state_slack = res.min_state_slack;
        cell.min_adjoint_slack = res.min_adjoint_slack;
        cell.max_ratio_excess = res.stats.max_ratio_excess;
        cell.r_vd = res.history.r_vd;
        cell.grad0_norm = res.history.grad0_norm;
        cell.cg_iters = res.history.cg_iters;
        cell.objective = res.history.objective;
        if (cs.exact_control) {
            cell.err_l = endpoint_l2_error(*pb.ops->mesh, res.l, *cs.exact_control);
        }
        if (cs.exact_phi) {
            cell.err_phi = endpoint_l2_error(*pb.ops->mesh, res.phi, *cs.exact_phi);
        }
        if (cs.exact_d) {
            cell.err_d = endpoint_l2_error(*pb.ops->mesh, res.d, *cs.exact_d);
        }
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.message = e.what();
    }
    cell.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    JobResult res;
    res.numeric_failure = !cell.ok;
    res.outputs.push_back({"optimize.csv", cells_csv("optimize", {cell})});
    std::ostringstream os;
    os << cell_prefix("optimize", cell);
    if (!cell.ok) {
        os << ": FAILED: " << cell.message;
    } else {
        if (cell.objective) {
            os << " J=" << fmt6(*cell.objective);
        }
        if (cell.r_vd) {
            os << " r_vd=" << fmt6(*cell.r_vd);
        }
        if (cell.cg_iters) {
            os << " cg_iters=" << *cell.cg_iters;
        }
        if (cell.err_l) {
            os << " err_l=" << fmt6(*cell.err_l);
        }
        os << " seconds=" << fmt6(cell.seconds);
    }
    os << '\n';
    res.summary = os.str();
    return res;
}

JobResult study_job(const std::string& mode, const RunConfig& cfg, const JobOptions& opt) {
    StudyPlan plan;
    if (mode == "convergence-time") {
        plan.mode = StudyMode::TimeRefine;
    } else if (mode == "convergence-space") {
        plan.mode = StudyMode::SpaceRefine;
    } else {
        if (!opt.m_list.empty() && !opt.n_list.empty()) {
            throw ConfigError("optimize-convergence takes either a step-count list or a "
                              "resolution list, not both");
        }
        plan.mode = opt.n_list.empty() ? StudyMode::OcpTimeRefine : StudyMode::OcpSpaceRefine;
    }

    const bool time_mode =
        plan.mode == StudyMode::TimeRefine || plan.mode == StudyMode::OcpTimeRefine;
    if (time_mode) {
        if (!opt.n_list.empty()) {
            throw ConfigError("time refinement takes a step-count list, not a resolution list");
        }
        plan.fixed_n = cfg.n;
        plan.m_sweep = opt.m_list.empty() ? std::vector<std::size_t>{8, 16, 32, 64, 128}
                                          : opt.m_list;
    } else {
        if (!opt.m_list.empty()) {
            throw ConfigError("space refinement takes a resolution list, not a step-count list");
        }
        plan.fixed_m = cfg.m;
        plan.n_sweep = opt.n_list.empty() ? std::vector<int>{8, 16, 32, 64} : opt.n_list;
    }

    const CaseDefinition cs = build_case(cfg);
    const SolverSettings settings = solver_settings(cfg);
    const StudyReport report = run_study(plan, cs, settings, worker_count(opt));

    JobResult res;
    res.numeric_failure = report.numeric_failure;
    res.outputs.push_back({mode + ".csv", study_csv(report)});
    if (opt.svg) {
        res.outputs.push_back({mode + ".svg", emit_svg_loglog(report)});
    }
    res.summary = study_summary(report);
    return res;
}

JobResult verify_job() {
    const std::vector<VerifyResult> results = run_verify_suites();
    JobResult res;
    res.numeric_failure = !all_passed(results);
    res.outputs.push_back({"verify.txt", verify_report(results)});
    std::size_t passed = 0;
    for (const auto& r : results) {
        passed += r.passed ? 1 : 0;
    }
    res.summary = std::to_string(passed) + " of " + std::to_string(results.size()) +
                  " verification suites passed\n";
    return res;
}

} // namespace

JobResult run_job(const std::string& mode, const std::string& config_json,
                  const JobOptions& opt) {
    if (mode == "verify") {
        return verify_job();
    }
    const RunConfig cfg = effective_config(config_json, opt);
    if (mode == "simulate") {
        return simulate_job(cfg, opt);
    }
    if (mode == "optimize") {
        return optimize_job(cfg);
    }
    if (mode == "convergence-time" || mode == "convergence-space" ||
        mode == "optimize-convergence") {
        return study_job(mode, cfg, opt);
    }
    throw ConfigError("unknown run mode \"" + mode + "\"");
}

} // namespace dampde
