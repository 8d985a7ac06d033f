#include "ocp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "error_norms.hpp"

namespace dampde {

namespace {

void accumulate(SolveStats& into, const SolveStats& part) {
    into.pcg_iters += part.pcg_iters;
    into.coupled_solves += part.coupled_solves;
    into.max_ratio_excess = std::max(into.max_ratio_excess, part.max_ratio_excess);
}

void check_problem(const ControlProblem& pb) {
    if (!pb.ops) {
        throw ConfigError("control problem has no operator set");
    }
    if (!(pb.alpha_l > 0.0)) {
        throw ConfigError("control penalty weight alpha_l must be positive");
    }
    if (pb.desired_phi && pb.desired_phi_field != nullptr) {
        throw ConfigError("desired elliptic state may be analytic or discrete, not both");
    }
    if (pb.desired_d && pb.desired_d_field != nullptr) {
        throw ConfigError("desired evolving state may be analytic or discrete, not both");
    }
    if (pb.d0 && pb.d0_coeffs != nullptr) {
        throw ConfigError("initial value may be analytic or discrete, not both");
    }
}

void check_control(const ControlProblem& pb, const SpaceTimeField& l) {
    validate_field(l);
    if (!same_grid(l.grid, pb.grid)) {
        throw ConfigError("control grid does not match the problem grid");
    }
    if (l.space->kind != SpaceKind::DirichletP1 || l.space->ndofs != pb.ops->v_space->ndofs) {
        throw ConfigError("control does not live on the Dirichlet space of this mesh");
    }
}

void axpy_field(double a, const SpaceTimeField& x, SpaceTimeField& y) {
    for (std::size_t k = 0; k < y.coeffs.size(); ++k) {
        axpy(a, x.coeffs[k], y.coeffs[k]);
    }
}

void scal_field(double a, SpaceTimeField& x) {
    for (auto& c : x.coeffs) {
        scal(a, c);
    }
}

SpaceTimeField subtract_fields(const SpaceTimeField& a, const SpaceTimeField& b) {
    SpaceTimeField out = a;
    axpy_field(-1.0, b, out);
    return out;
}

ForwardInput forward_input(const ControlProblem& pb, const SpaceTimeField& l) {
    ForwardInput in;
    in.l_field = &l;
    if (pb.d0) {
        in.d0 = &*pb.d0;
    }
    in.d0_coeffs = pb.d0_coeffs;
    return in;
}

// Squared tracking misfit of the two state components, data terms absent
// meaning zero.
double tracking_term(const ControlProblem& pb, const ForwardResult& fwd) {
    const OperatorSet& ops = *pb.ops;
    double acc = 0.0;
    if (pb.desired_phi_field != nullptr) {
        const SpaceTimeField diff = subtract_fields(fwd.phi, *pb.desired_phi_field);
        for (std::size_t k = 0; k < diff.coeffs.size(); ++k) {
            const double nk = ops.norm_v(diff.coeffs[k]);
            acc += diff.grid.tau(k) * nk * nk;
        }
    } else if (pb.desired_phi) {
        const double e = endpoint_l2_error(*ops.mesh, fwd.phi, *pb.desired_phi);
        acc += e * e;
    } else {
        for (std::size_t k = 0; k < fwd.phi.coeffs.size(); ++k) {
            const double nk = ops.norm_v(fwd.phi.coeffs[k]);
            acc += fwd.phi.grid.tau(k) * nk * nk;
        }
    }
    if (pb.desired_d_field != nullptr) {
        const SpaceTimeField diff = subtract_fields(fwd.d, *pb.desired_d_field);
        for (std::size_t k = 0; k < diff.coeffs.size(); ++k) {
            const double nk = ops.norm_x(diff.coeffs[k]);
            acc += diff.grid.tau(k) * nk * nk;
        }
    } else if (pb.desired_d) {
        const double e = endpoint_l2_error(*ops.mesh, fwd.d, *pb.desired_d);
        acc += e * e;
    } else {
        for (std::size_t k = 0; k < fwd.d.coeffs.size(); ++k) {
            const double nk = ops.norm_x(fwd.d.coeffs[k]);
            acc += fwd.d.grid.tau(k) * nk * nk;
        }
    }
    return acc;
}

double control_term(const ControlProblem& pb, const SpaceTimeField& l) {
    if (pb.control_shift) {
        const double e = endpoint_l2_error(*pb.ops->mesh, l, *pb.control_shift);
        return e * e;
    }
    const double n = sigma_norm(*pb.ops, l);
    return n * n;
}

struct GradientEval {
    SpaceTimeField grad;
    double objective = 0.0;
    ForwardResult fwd;
    AdjointResult adj;
};

// One forward solve, one adjoint solve, and the assembled gradient
// alpha_l (l - proj_shift) + z. proj_shift is the already-projected control
// shift; null means zero.
GradientEval evaluate_gradient(const ControlProblem& pb, const SpaceTimeField& l,
                               const StepControls& ctl, const SpaceTimeField* proj_shift) {
    GradientEval out;
    out.fwd = solve_state(*pb.ops, pb.grid, forward_input(pb, l), ctl);

    SpaceTimeField phi_diff;
    SpaceTimeField d_diff;
    AdjointInput ain;
    if (pb.desired_phi_field != nullptr) {
        phi_diff = subtract_fields(out.fwd.phi, *pb.desired_phi_field);
        ain.g1_field = &phi_diff;
    } else if (pb.desired_phi) {
        ain.g1_field = &out.fwd.phi;
        ain.g1 = &*pb.desired_phi;
        ain.g1_combine = true;
    } else {
        ain.g1_field = &out.fwd.phi;
    }
    if (pb.desired_d_field != nullptr) {
        d_diff = subtract_fields(out.fwd.d, *pb.desired_d_field);
        ain.g2_field = &d_diff;
    } else if (pb.desired_d) {
        ain.g2_field = &out.fwd.d;
        ain.g2 = &*pb.desired_d;
        ain.g2_combine = true;
    } else {
        ain.g2_field = &out.fwd.d;
    }
    out.adj = solve_adjoint(*pb.ops, pb.grid, ain, ctl);

    out.grad = l;
    scal_field(pb.alpha_l, out.grad);
    if (proj_shift != nullptr) {
        axpy_field(-pb.alpha_l, *proj_shift, out.grad);
    }
    axpy_field(1.0, out.adj.z, out.grad);

    out.objective = 0.5 * tracking_term(pb, out.fwd) + 0.5 * pb.alpha_l * control_term(pb, l);
    return out;
}

SpaceTimeField hessian_core(const ControlProblem& pb, const SpaceTimeField& dl,
                            const StepControls& ctl, SolveStats* stats, double* min_state_slack,
                            double* min_adjoint_slack) {
    ForwardInput fin;
    fin.l_field = &dl;
    ForwardResult fwd = solve_state(*pb.ops, pb.grid, fin, ctl);

    AdjointInput ain;
    ain.g1_field = &fwd.phi;
    ain.g2_field = &fwd.d;
    AdjointResult adj = solve_adjoint(*pb.ops, pb.grid, ain, ctl);

    if (stats != nullptr) {
        accumulate(*stats, fwd.stats);
        accumulate(*stats, adj.stats);
    }
    if (min_state_slack != nullptr) {
        *min_state_slack = std::min(*min_state_slack, fwd.stability.min_slack);
    }
    if (min_adjoint_slack != nullptr) {
        *min_adjoint_slack = std::min(*min_adjoint_slack, adj.stability.min_slack);
    }

    SpaceTimeField out = dl;
    scal_field(pb.alpha_l, out);
    axpy_field(1.0, adj.z, out);
    return out;
}

} // namespace

double sigma_inner(const OperatorSet& ops, const SpaceTimeField& u, const SpaceTimeField& v) {
    if (!same_grid(u.grid, v.grid) || u.coeffs.size() != v.coeffs.size()) {
        throw ConfigError("control fields live on different time grids");
    }
    double acc = 0.0;
    DenseVector tmp(ops.v_space->ndofs);
    for (std::size_t k = 0; k < u.coeffs.size(); ++k) {
        ops.mass_vv.multiply(u.coeffs[k], tmp);
        acc += u.grid.tau(k) * dot(tmp, v.coeffs[k]);
    }
    return acc;
}

double sigma_norm(const OperatorSet& ops, const SpaceTimeField& u) {
    return std::sqrt(std::max(0.0, sigma_inner(ops, u, u)));
}

SpaceTimeField project_control(const OperatorSet& ops, const TimeGrid& grid,
                               const TimeFunction& fn, SolveStats* stats) {
    SpaceTimeField out = zero_field(grid, ops.v_space);
    if (fn.separable()) {
        const DenseVector load = assemble_load(*ops.mesh, *ops.v_space, fn.spatial);
        PcgResult res = ops.solve_mass_vv(load);
        if (stats != nullptr) {
            stats->pcg_iters += res.iters;
        }
        const std::vector<double> vals = endpoint_scalars(grid, fn.temporal);
        for (std::size_t k = 0; k < grid.intervals(); ++k) {
            out.coeffs[k] = res.x;
            scal(vals[k], out.coeffs[k]);
        }
        return out;
    }
    for (std::size_t k = 0; k < grid.intervals(); ++k) {
        const DenseVector load = endpoint_load(*ops.mesh, *ops.v_space, grid, fn, k);
        PcgResult res = ops.solve_mass_vv(load);
        if (stats != nullptr) {
            stats->pcg_iters += res.iters;
        }
        out.coeffs[k] = std::move(res.x);
    }
    return out;
}

double objective(const ControlProblem& pb, const SpaceTimeField& l, const StepControls& ctl) {
    check_problem(pb);
    check_control(pb, l);
    const ForwardResult fwd = solve_state(*pb.ops, pb.grid, forward_input(pb, l), ctl);
    return 0.5 * tracking_term(pb, fwd) + 0.5 * pb.alpha_l * control_term(pb, l);
}

SpaceTimeField reduced_gradient(const ControlProblem& pb, const SpaceTimeField& l,
                                const StepControls& ctl) {
    check_problem(pb);
    check_control(pb, l);
    SpaceTimeField proj;
    const SpaceTimeField* ps = nullptr;
    if (pb.control_shift) {
        proj = project_control(*pb.ops, pb.grid, *pb.control_shift);
        ps = &proj;
    }
    return evaluate_gradient(pb, l, ctl, ps).grad;
}

SpaceTimeField hessian_apply(const ControlProblem& pb, const SpaceTimeField& dl,
                             const StepControls& ctl) {
    check_problem(pb);
    check_control(pb, dl);
    return hessian_core(pb, dl, ctl, nullptr, nullptr, nullptr);
}

OcpResult solve_ocp(const ControlProblem& pb, const OptimizerConfig& cfg,
                    const StepControls& ctl) {
    check_problem(pb);
    if (!(cfg.cg_rel_tol > 0.0)) {
        throw ConfigError("optimizer tolerance must be positive");
    }
    if (cfg.max_cg_iter < 1) {
        throw ConfigError("optimizer iteration cap must be positive");
    }

    const OperatorSet& ops = *pb.ops;
    OcpResult res;
    OcpHistory& hist = res.history;

    SpaceTimeField proj;
    const SpaceTimeField* ps = nullptr;
    if (pb.control_shift) {
        proj = project_control(ops, pb.grid, *pb.control_shift, &res.stats);
        ps = &proj;
    }

    SpaceTimeField l = zero_field(pb.grid, ops.v_space);
    GradientEval e0 = evaluate_gradient(pb, l, ctl, ps);
    accumulate(res.stats, e0.fwd.stats);
    accumulate(res.stats, e0.adj.stats);
    res.min_state_slack = std::min(res.min_state_slack, e0.fwd.stability.min_slack);
    res.min_adjoint_slack = std::min(res.min_adjoint_slack, e0.adj.stability.min_slack);

    double j = e0.objective;
    const double grad0_norm = sigma_norm(ops, e0.grad);
    hist.grad0_norm = grad0_norm;
    hist.iterations.push_back({j, grad0_norm});
    const double target = cfg.cg_rel_tol * grad0_norm;

    SpaceTimeField r = std::move(e0.grad);
    scal_field(-1.0, r);
    double rho = grad0_norm * grad0_norm;
    bool converged = grad0_norm <= target || grad0_norm == 0.0;

    if (!converged) {
        SpaceTimeField p = r;
        SpaceTimeField h;
        while (hist.cg_iters < cfg.max_cg_iter) {
            h = hessian_core(pb, p, ctl, &res.stats, &res.min_state_slack,
                             &res.min_adjoint_slack);
            const double php = sigma_inner(ops, p, h);
            if (!(php > 0.0)) {
                throw NumericalError("reduced Hessian lost positive definiteness");
            }
            const double step = rho / php;
            axpy_field(step, p, l);
            axpy_field(-step, h, r);
            j -= 0.5 * step * rho;
            ++hist.cg_iters;
            const double rho_next = sigma_inner(ops, r, r);
            const double rnorm = std::sqrt(std::max(0.0, rho_next));
            hist.iterations.push_back({j, rnorm});
            if (rnorm <= target) {
                converged = true;
                break;
            }
            scal_field(rho_next / rho, p);
            axpy_field(1.0, r, p);
            rho = rho_next;
        }
    }

    GradientEval ef = evaluate_gradient(pb, l, ctl, ps);
    accumulate(res.stats, ef.fwd.stats);
    accumulate(res.stats, ef.adj.stats);
    res.min_state_slack = std::min(res.min_state_slack, ef.fwd.stability.min_slack);
    res.min_adjoint_slack = std::min(res.min_adjoint_slack, ef.adj.stability.min_slack);

    hist.converged = converged;
    hist.r_vd = sigma_norm(ops, ef.grad);
    hist.objective = ef.objective;
    res.l = std::move(l);
    res.phi = std::move(ef.fwd.phi);
    res.d = std::move(ef.fwd.d);
    res.z = std::move(ef.adj.z);
    res.p = std::move(ef.adj.p);

    if (!converged) {
        auto best = std::make_shared<OcpResult>(std::move(res));
        throw MaxIterExceeded("control solve hit the conjugate gradient iteration cap",
                              best->history.cg_iters, best->history.r_vd, best);
    }
    return res;
}

} // namespace dampde
