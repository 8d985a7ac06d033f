#include "study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "errors.hpp"
#include "error_norms.hpp"
#include "parallel.hpp"

namespace dampde {

namespace {

bool is_time_mode(StudyMode mode) {
    return mode == StudyMode::TimeRefine || mode == StudyMode::OcpTimeRefine;
}

bool is_ocp_mode(StudyMode mode) {
    return mode == StudyMode::OcpTimeRefine || mode == StudyMode::OcpSpaceRefine;
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string cell_or_empty(const std::optional<double>& v) {
    return v ? format_g6(*v) : std::string();
}

void run_forward_cell(const CaseDefinition& cs, const SolverSettings& settings,
                      std::shared_ptr<const OperatorSet> ops, const TimeGrid& grid,
                      StudyCell& cell) {
    ForwardInput fin;
    fin.l = &cs.l;
    fin.d0 = &cs.d0;
    const ForwardResult fwd = solve_state(*ops, grid, fin, settings.step);
    cell.min_state_slack = fwd.stability.min_slack;
    cell.max_ratio_excess = fwd.stats.max_ratio_excess;
    if (cs.exact_phi) {
        cell.err_phi = endpoint_l2_error(*ops->mesh, fwd.phi, *cs.exact_phi);
    }
    if (cs.exact_d) {
        cell.err_d = endpoint_l2_error(*ops->mesh, fwd.d, *cs.exact_d);
    }
}

void run_ocp_cell(const CaseDefinition& cs, const SolverSettings& settings,
                  std::shared_ptr<const OperatorSet> ops, const TimeGrid& grid, StudyCell& cell) {
    ControlProblem pb;
    pb.ops = std::move(ops);
    pb.grid = grid;
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
}

void fill_eoc(StudyReport& report) {
    const auto resolution = [&](const StudyCell& c) {
        return is_time_mode(report.mode) ? c.tau : c.h_over_sqrt2;
    };
    const auto pair_eoc = [&](const std::optional<double>& e0, const std::optional<double>& e1,
                              const StudyCell& c0, const StudyCell& c1) -> std::optional<double> {
        if (!c0.ok || !c1.ok || !e0 || !e1 || !(*e0 > 0.0) || !(*e1 > 0.0)) {
            return std::nullopt;
        }
        return eoc({*e0, *e1}, {resolution(c0), resolution(c1)}).front();
    };
    for (std::size_t i = 1; i < report.cells.size(); ++i) {
        StudyCell& cur = report.cells[i];
        const StudyCell& prev = report.cells[i - 1];
        cur.eoc_phi = pair_eoc(prev.err_phi, cur.err_phi, prev, cur);
        cur.eoc_d = pair_eoc(prev.err_d, cur.err_d, prev, cur);
        cur.eoc_l = pair_eoc(prev.err_l, cur.err_l, prev, cur);
    }
}

} // namespace

std::string study_mode_name(StudyMode mode) {
    switch (mode) {
    case StudyMode::TimeRefine:
        return "time-refine";
    case StudyMode::SpaceRefine:
        return "space-refine";
    case StudyMode::OcpTimeRefine:
        return "ocp-time-refine";
    case StudyMode::OcpSpaceRefine:
        return "ocp-space-refine";
    }
    return "unknown";
}

CaseDefinition case_from_manufactured(const ManufacturedCase& mc) {
    CaseDefinition cs;
    cs.params = mc.params;
    cs.l = mc.source_l;
    cs.d0 = mc.d0;
    cs.exact_phi = mc.exact_phi;
    cs.exact_d = mc.exact_d;
    cs.alpha_l = mc.alpha_l;
    cs.use_ld = true;
    cs.phi_d = mc.exact_phi;
    cs.d_d = mc.exact_d;
    cs.l_d = mc.source_l;
    cs.exact_control = mc.source_l;
    return cs;
}

StudyReport run_study(const StudyPlan& plan, const CaseDefinition& cs,
                      const SolverSettings& settings, int threads) {
    validate_params(cs.params);
    StudyReport report;
    report.mode = plan.mode;

    const bool time_mode = is_time_mode(plan.mode);
    std::size_t count = 0;
    if (time_mode) {
        if (plan.m_sweep.empty()) {
            throw ConfigError("time refinement needs a nonempty list of step counts");
        }
        for (std::size_t i = 0; i + 1 < plan.m_sweep.size(); ++i) {
            if (plan.m_sweep[i] >= plan.m_sweep[i + 1]) {
                throw ConfigError("time step counts must be strictly increasing");
            }
        }
        if (plan.fixed_n < 1) {
            throw ConfigError("mesh resolution n must be at least 1");
        }
        count = plan.m_sweep.size();
    } else {
        if (plan.n_sweep.empty()) {
            throw ConfigError("space refinement needs a nonempty list of mesh resolutions");
        }
        for (std::size_t i = 0; i + 1 < plan.n_sweep.size(); ++i) {
            if (plan.n_sweep[i] >= plan.n_sweep[i + 1]) {
                throw ConfigError("mesh resolutions must be strictly increasing");
            }
        }
        if (plan.fixed_m < 1) {
            throw ConfigError("time step count M must be at least 1");
        }
        count = plan.n_sweep.size();
    }

    report.cells.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        StudyCell& cell = report.cells[i];
        cell.n = time_mode ? plan.fixed_n : plan.n_sweep[i];
        cell.m = time_mode ? plan.m_sweep[i] : plan.fixed_m;
        cell.tau = cs.params.T / static_cast<double>(cell.m);
        cell.h_over_sqrt2 = 1.0 / static_cast<double>(cell.n);
    }

    // Time sweeps reuse one matrix stack across all cells; space sweeps build
    // their own inside each cell so failures stay cell-local.
    std::shared_ptr<const OperatorSet> shared_ops;
    if (time_mode) {
        shared_ops = make_operator_set(plan.fixed_n, cs.params, settings.pcg_rel_tol);
    }

    parallel_for(count, threads, [&](std::size_t i) {
        StudyCell& cell = report.cells[i];
        const auto start = std::chrono::steady_clock::now();
        try {
            std::shared_ptr<const OperatorSet> ops =
                time_mode ? shared_ops
                          : make_operator_set(cell.n, cs.params, settings.pcg_rel_tol);
            const TimeGrid grid = uniform_time_grid(cs.params.T, cell.m);
            if (is_ocp_mode(plan.mode)) {
                run_ocp_cell(cs, settings, std::move(ops), grid, cell);
            } else {
                run_forward_cell(cs, settings, std::move(ops), grid, cell);
            }
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.message = e.what();
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    for (const StudyCell& cell : report.cells) {
        if (!cell.ok) {
            report.numeric_failure = true;
        }
    }
    fill_eoc(report);
    return report;
}

std::string study_csv(const StudyReport& report) {
    return cells_csv(study_mode_name(report.mode), report.cells);
}

std::string cells_csv(const std::string& mode_label, const std::vector<StudyCell>& cells) {
    std::string out =
        "mode,n,M,tau,h_over_sqrt2,err_phi,eoc_phi,err_d,eoc_d,err_l,eoc_l,r_vd,cg_iters,seconds\n";
    for (const StudyCell& c : cells) {
        out += mode_label;
        out += ',' + std::to_string(c.n);
        out += ',' + std::to_string(c.m);
        out += ',' + format_g6(c.tau);
        out += ',' + format_g6(c.h_over_sqrt2);
        out += ',' + cell_or_empty(c.err_phi);
        out += ',' + cell_or_empty(c.eoc_phi);
        out += ',' + cell_or_empty(c.err_d);
        out += ',' + cell_or_empty(c.eoc_d);
        out += ',' + cell_or_empty(c.err_l);
        out += ',' + cell_or_empty(c.eoc_l);
        out += ',' + cell_or_empty(c.r_vd);
        out += ',';
        if (c.cg_iters) {
            out += std::to_string(*c.cg_iters);
        }
        out += ',' + format_g6(c.seconds);
        out += '\n';
    }
    return out;
}

std::string study_summary(const StudyReport& report) {
    std::ostringstream os;
    os << "study " << study_mode_name(report.mode) << ", " << report.cells.size() << " cells\n";
    for (const StudyCell& c : report.cells) {
        os << "  n=" << c.n << " M=" << c.m;
        if (!c.ok) {
            os << " FAILED: " << c.message << "\n";
            continue;
        }
        if (c.err_phi) {
            os << " err_phi=" << format_g6(*c.err_phi);
        }
        if (c.eoc_phi) {
            os << " eoc_phi=" << format_g6(*c.eoc_phi);
        }
        if (c.err_d) {
            os << " err_d=" << format_g6(*c.err_d);
        }
        if (c.eoc_d) {
            os << " eoc_d=" << format_g6(*c.eoc_d);
        }
        if (c.err_l) {
            os << " err_l=" << format_g6(*c.err_l);
        }
        if (c.eoc_l) {
            os << " eoc_l=" << format_g6(*c.eoc_l);
        }
        if (c.r_vd) {
            os << " r_vd=" << format_g6(*c.r_vd);
        }
        if (c.cg_iters) {
            os << " cg_iters=" << *c.cg_iters;
        }
        if (c.objective) {
            os << " J=" << format_g6(*c.objective);
        }
        os << " seconds=" << format_g6(c.seconds) << "\n";
    }
    if (report.numeric_failure) {
        os << "at least one cell failed\n";
    }
    return os.str();
}

} // namespace dampde
