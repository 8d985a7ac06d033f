// Acceptance gate: reproduces the reference convergence tables at full
// resolution, cross-checks the steppers against dense block solves, and
// verifies the duality, gradient, stability, and optimality guarantees on
// every run it performs. One line per criterion; exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dampde/adjoint_solver.hpp"
#include "dampde/manufactured.hpp"
#include "dampde/ocp.hpp"
#include "dampde/state_solver.hpp"
#include "dampde/study.hpp"
#include "dampde/verify.hpp"

using namespace dampde;

namespace {

struct Gate {
    bool all_passed = true;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_excess = -std::numeric_limits<double>::infinity();
    std::vector<const StudyReport*> ocp_reports;

    void line(int criterion, bool passed, const std::string& detail) {
        all_passed = all_passed && passed;
        std::printf("%s criterion %d: %s\n", passed ? "PASS" : "FAIL", criterion,
                    detail.c_str());
        std::fflush(stdout);
    }

    void track_cells(const StudyReport& report) {
        for (const StudyCell& c : report.cells) {
            if (!c.ok) {
                continue;
            }
            min_slack = std::min({min_slack, c.min_state_slack, c.min_adjoint_slack});
            max_excess = std::max(max_excess, c.max_ratio_excess);
        }
    }

    void track_forward(const ForwardResult& res) {
        min_slack = std::min(min_slack, res.stability.min_slack);
        max_excess = std::max(max_excess, res.stats.max_ratio_excess);
    }

    void track_adjoint(const AdjointResult& res) {
        min_slack = std::min(min_slack, res.stability.min_slack);
        max_excess = std::max(max_excess, res.stats.max_ratio_excess);
    }
};

int worker_count() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool within_rel(double measured, double expected, double rel, std::string& detail,
                const std::string& label) {
    if (std::abs(measured - expected) <= rel * expected) {
        return true;
    }
    detail = label + " = " + fmt(measured) + ", expected " + fmt(expected) + " within " +
             fmt(100.0 * rel) + "%";
    return false;
}

bool within_abs(double measured, double expected, double tol, std::string& detail,
                const std::string& label) {
    if (std::abs(measured - expected) <= tol) {
        return true;
    }
    detail = label + " = " + fmt(measured) + ", expected " + fmt(expected) + " +- " + fmt(tol);
    return false;
}

struct TableSpec {
    const std::vector<double>* errs;
    double err_rel;
    const std::optional<double> StudyCell::* err_field;
    const std::vector<double>* eocs;
    double eoc_tol;
    const std::optional<double> StudyCell::* eoc_field;
    std::string label;
};

bool check_table(const StudyReport& report, const std::vector<TableSpec>& specs,
                 std::string& detail) {
    for (const StudyCell& c : report.cells) {
        if (!c.ok) {
            detail = "cell n=" + std::to_string(c.n) + " M=" + std::to_string(c.m) +
                     " failed: " + c.message;
            return false;
        }
    }
    for (const TableSpec& spec : specs) {
        for (std::size_t i = 0; i < spec.errs->size(); ++i) {
            const std::optional<double>& got = report.cells[i].*spec.err_field;
            if (!got) {
                detail = spec.label + " missing in row " + std::to_string(i);
                return false;
            }
            if (!within_rel(*got, (*spec.errs)[i], spec.err_rel, detail,
                            spec.label + "[" + std::to_string(i) + "]")) {
                return false;
            }
        }
        for (std::size_t i = 0; i < spec.eocs->size(); ++i) {
            const std::optional<double>& got = report.cells[i + 1].*spec.eoc_field;
            if (!got) {
                detail = spec.label + " order missing in row " + std::to_string(i + 1);
                return false;
            }
            if (!within_abs(*got, (*spec.eocs)[i], spec.eoc_tol, detail,
                            spec.label + " order[" + std::to_string(i) + "]")) {
                return false;
            }
        }
    }
    return true;
}

double field_scale(const DenseVector& v) {
    double m = 1.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

double max_abs_diff(const DenseVector& a, const DenseVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

double inner_field(const OperatorSet& ops, bool dirichlet, const SpaceTimeField& a,
                   const SpaceTimeField& b) {
    double acc = 0.0;
    DenseVector tmp;
    const CsrMatrix& mass = dirichlet ? ops.mass_vv : ops.mass_xx;
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
        mass.multiply(a.coeffs[k], tmp);
        acc += a.grid.tau(k) * dot(tmp, b.coeffs[k]);
    }
    return acc;
}

SpaceTimeField add_scaled(const SpaceTimeField& a, double s, const SpaceTimeField& b) {
    SpaceTimeField out = a;
    for (std::size_t k = 0; k < out.coeffs.size(); ++k) {
        axpy(s, b.coeffs[k], out.coeffs[k]);
    }
    return out;
}

} // namespace

int main() {
    Gate gate;
    const CaseDefinition cs = case_from_manufactured(manufactured_case());
    const SolverSettings settings;
    const int threads = worker_count();

    // Criterion 1: temporal refinement against the evolving-field reference
    // table at n = 256.
    {
        const auto start = std::chrono::steady_clock::now();
        StudyPlan plan;
        plan.mode = StudyMode::TimeRefine;
        plan.fixed_n = 256;
        plan.m_sweep = {8, 32, 128};
        const StudyReport report = run_study(plan, cs, settings, threads);
        gate.track_cells(report);
        const std::vector<double> err_d = {0.033285, 0.010362, 0.002764};
        const std::vector<double> eoc_d = {0.84, 0.95};
        const std::vector<double> err_phi = {0.001617, 0.000512, 0.000148};
        const std::vector<double> no_eoc = {};
        std::string detail;
        const bool ok = check_table(
            report,
            {{&err_d, 0.01, &StudyCell::err_d, &eoc_d, 0.05, &StudyCell::eoc_d, "err_d"},
             {&err_phi, 0.02, &StudyCell::err_phi, &no_eoc, 0.0, &StudyCell::eoc_phi,
              "err_phi"}},
            detail);
        gate.line(1, ok,
                  ok ? "time refinement at n=256 matches the reference errors and orders (" +
                           fmt(seconds_since(start)) + " s)"
                     : detail);
    }

    // Criterion 2: spatial refinement against the elliptic-field reference
    // table at M = 512.
    {
        const auto start = std::chrono::steady_clock::now();
        StudyPlan plan;
        plan.mode = StudyMode::SpaceRefine;
        plan.fixed_m = 512;
        plan.n_sweep = {8, 16, 32, 64};
        const StudyReport report = run_study(plan, cs, settings, threads);
        gate.track_cells(report);
        const std::vector<double> err_phi = {0.032623, 0.008523, 0.002163, 0.000552};
        const std::vector<double> eoc_phi = {1.93, 1.97, 1.97};
        const std::vector<double> err_d = {0.029018, 0.007740, 0.002195, 0.000947};
        const std::vector<double> no_eoc = {};
        std::string detail;
        const bool ok = check_table(
            report,
            {{&err_phi, 0.01, &StudyCell::err_phi, &eoc_phi, 0.05, &StudyCell::eoc_phi,
              "err_phi"},
             {&err_d, 0.02, &StudyCell::err_d, &no_eoc, 0.0, &StudyCell::eoc_d, "err_d"}},
            detail);
        gate.line(2, ok,
                  ok ? "space refinement at M=512 matches the reference errors and orders (" +
                           fmt(seconds_since(start)) + " s)"
                     : detail);
    }

    // Criterion 3: control-error tables for both refinement directions.
    StudyReport ocp_time_report;
    StudyReport ocp_space_report;
    {
        const auto start = std::chrono::steady_clock::now();
        StudyPlan tplan;
        tplan.mode = StudyMode::OcpTimeRefine;
        tplan.fixed_n = 128;
        tplan.m_sweep = {8, 32, 128};
        ocp_time_report = run_study(tplan, cs, settings, threads);
        gate.track_cells(ocp_time_report);
        gate.ocp_reports.push_back(&ocp_time_report);

        StudyPlan splan;
        splan.mode = StudyMode::OcpSpaceRefine;
        splan.fixed_m = 512;
        splan.n_sweep = {8, 16, 32};
        ocp_space_report = run_study(splan, cs, settings, threads);
        gate.track_cells(ocp_space_report);
        gate.ocp_reports.push_back(&ocp_space_report);

        const std::vector<double> terr = {0.001394, 0.000439, 0.000118};
        const std::vector<double> teoc = {0.88, 0.94};
        const std::vector<double> serr = {0.002830, 0.000766, 0.000203};
        const std::vector<double> seoc = {1.88, 1.91};
        std::string detail;
        bool ok = check_table(ocp_time_report,
                              {{&terr, 0.05, &StudyCell::err_l, &teoc, 0.1, &StudyCell::eoc_l,
                                "time err_l"}},
                              detail);
        ok = ok && check_table(ocp_space_report,
                               {{&serr, 0.05, &StudyCell::err_l, &seoc, 0.1, &StudyCell::eoc_l,
                                 "space err_l"}},
                               detail);
        gate.line(3, ok,
                  ok ? "control errors match the reference tables in both directions (" +
                           fmt(seconds_since(start)) + " s)"
                     : detail);
    }

    // Criterion 4: forward and backward sweeps against dense block solves on
    // tiny meshes, random data.
    {
        std::mt19937 rng(20240816);
        std::string detail;
        bool ok = true;
        StepControls ctl;
        ctl.fp_tol = 1e-13;
        for (int n : {1, 2, 4}) {
            const auto ops = make_operator_set(n, cs.params);
            for (int m : {1, 2, 4}) {
                const TimeGrid grid = uniform_time_grid(cs.params.T, m);
                for (int rep = 0; ok && rep < 20; ++rep) {
                    const SpaceTimeField l = random_field(grid, ops->v_space, rng);
                    const SpaceTimeField f = random_field(grid, ops->x_space, rng);
                    const DenseVector d0 = random_vector(ops->x_space->ndofs, rng);
                    ForwardInput fin;
                    fin.l_field = &l;
                    fin.f_field = &f;
                    fin.d0_coeffs = &d0;
                    const ForwardResult fwd = solve_state(*ops, grid, fin, ctl);
                    gate.track_forward(fwd);
                    const ReferenceSolution fref = reference_forward(*ops, grid, fin);

                    const SpaceTimeField g1 = random_field(grid, ops->v_space, rng);
                    const SpaceTimeField g2 = random_field(grid, ops->x_space, rng);
                    const DenseVector pT = random_vector(ops->x_space->ndofs, rng);
                    AdjointInput ain;
                    ain.g1_field = &g1;
                    ain.g2_field = &g2;
                    ain.terminal = &pT;
                    const AdjointResult adj = solve_adjoint(*ops, grid, ain, ctl);
                    gate.track_adjoint(adj);
                    const ReferenceSolution aref = reference_adjoint(*ops, grid, ain);

                    for (std::size_t k = 0; ok && k < grid.intervals(); ++k) {
                        const double worst = std::max(
                            {max_abs_diff(fwd.phi.coeffs[k], fref.elliptic.coeffs[k]) /
                                 field_scale(fref.elliptic.coeffs[k]),
                             max_abs_diff(fwd.d.coeffs[k], fref.evolving.coeffs[k]) /
                                 field_scale(fref.evolving.coeffs[k]),
                             max_abs_diff(adj.z.coeffs[k], aref.elliptic.coeffs[k]) /
                                 field_scale(aref.elliptic.coeffs[k]),
                             max_abs_diff(adj.p.coeffs[k], aref.evolving.coeffs[k]) /
                                 field_scale(aref.evolving.coeffs[k])});
                        if (worst > 1e-10) {
                            ok = false;
                            detail = "n=" + std::to_string(n) + " M=" + std::to_string(m) +
                                     " rep=" + std::to_string(rep) +
                                     " interval=" + std::to_string(k) +
                                     " deviates from the dense solve by " + fmt(worst);
                        }
                    }
                }
            }
        }
        gate.line(4, ok,
                  ok ? "stepping solvers match dense block solves to 1e-10 on 180 random runs"
                     : detail);
    }

    // Criterion 5: duality identity and gradient consistency.
    {
        std::mt19937 rng(20240817);
        std::string detail;
        bool ok = true;
        std::uniform_int_distribution<int> pick(1, 4);
        for (int rep = 0; ok && rep < 50; ++rep) {
            const int n = pick(rng);
            const int m = pick(rng);
            const auto ops = make_operator_set(n, cs.params);
            const TimeGrid grid = uniform_time_grid(cs.params.T, m);
            const SpaceTimeField l = random_field(grid, ops->v_space, rng);
            const SpaceTimeField g1 = random_field(grid, ops->v_space, rng);
            const SpaceTimeField g2 = random_field(grid, ops->x_space, rng);
            ForwardInput fin;
            fin.l_field = &l;
            const ForwardResult fwd = solve_state(*ops, grid, fin);
            gate.track_forward(fwd);
            AdjointInput ain;
            ain.g1_field = &g1;
            ain.g2_field = &g2;
            const AdjointResult adj = solve_adjoint(*ops, grid, ain);
            gate.track_adjoint(adj);
            const double lhs =
                inner_field(*ops, true, g1, fwd.phi) + inner_field(*ops, false, g2, fwd.d);
            const double rhs = inner_field(*ops, true, l, adj.z);
            const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
            if (std::abs(lhs - rhs) > 1e-9 * scale) {
                ok = false;
                detail = "duality mismatch " + fmt(std::abs(lhs - rhs) / scale) + " at n=" +
                         std::to_string(n) + " M=" + std::to_string(m);
            }
        }

        const ManufacturedCase mc = manufactured_case();
        ControlProblem pb;
        pb.ops = make_operator_set(3, mc.params);
        pb.grid = uniform_time_grid(mc.params.T, 3);
        pb.alpha_l = mc.alpha_l;
        pb.desired_phi = mc.exact_phi;
        pb.desired_d = mc.exact_d;
        pb.control_shift = mc.source_l;
        for (int rep = 0; ok && rep < 20; ++rep) {
            const SpaceTimeField l = random_field(pb.grid, pb.ops->v_space, rng);
            const SpaceTimeField dl = random_field(pb.grid, pb.ops->v_space, rng);
            const SpaceTimeField grad = reduced_gradient(pb, l);
            const double directional = sigma_inner(*pb.ops, grad, dl);
            const double eps = 1e-4;
            const double jp = objective(pb, add_scaled(l, eps, dl));
            const double jm = objective(pb, add_scaled(l, -eps, dl));
            const double fd = (jp - jm) / (2.0 * eps);
            const double scale = std::max(1.0, std::abs(directional));
            if (std::abs(directional - fd) > 1e-6 * scale) {
                ok = false;
                detail = "gradient vs central difference mismatch " +
                         fmt(std::abs(directional - fd) / scale) + " at rep " +
                         std::to_string(rep);
            }
        }
        gate.line(5, ok,
                  ok ? "duality identity holds to 1e-9 and the gradient matches central "
                       "differences to 1e-6"
                     : detail);
    }

    // Criterion 6: per-step stability slack across every run above.
    {
        const bool ok = gate.min_slack >= -1e-10;
        gate.line(6, ok, "smallest per-step stability slack over all runs = " +
                             fmt(gate.min_slack) + (ok ? " >= -1e-10" : " < -1e-10"));
    }

    // Criterion 7: discrete optimality residual on every control solve.
    {
        bool ok = true;
        std::string detail;
        int runs = 0;
        for (const StudyReport* report : gate.ocp_reports) {
            for (const StudyCell& c : report->cells) {
                if (!c.ok || !c.r_vd || !c.grad0_norm) {
                    continue;
                }
                ++runs;
                const double bound = 10.0 * settings.opt.cg_rel_tol * *c.grad0_norm;
                if (*c.r_vd > bound) {
                    ok = false;
                    detail = "optimality residual " + fmt(*c.r_vd) + " exceeds " + fmt(bound) +
                             " at n=" + std::to_string(c.n) + " M=" + std::to_string(c.m);
                }
            }
        }
        ok = ok && runs == 6;
        gate.line(7, ok,
                  ok ? "optimality residual stays within 10x the solver tolerance on all " +
                           std::to_string(runs) + " control solves"
                     : (runs == 6 ? detail
                                  : "expected 6 recorded control solves, saw " +
                                        std::to_string(runs)));
    }

    // Criterion 8: fixed-point contraction ratios across every run above.
    {
        const bool ok = gate.max_excess <= 1e-8;
        gate.line(8, ok, "largest contraction-ratio excess over all runs = " +
                             fmt(gate.max_excess) + (ok ? " <= 1e-8" : " > 1e-8"));
    }

    return gate.all_passed ? 0 : 1;
}
