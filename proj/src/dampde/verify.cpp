#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "dense.hpp"
#include "errors.hpp"
#include "error_norms.hpp"
#include "manufactured.hpp"
#include "ocp.hpp"
#include "quadrature.hpp"

namespace dampde {

namespace {

// One interval as a single dense block system in (sol, vec):
//   A_ell sol - kappa_sol M_vx vec          = base_load
//   -kappa_vec tau E sol + (1 + r tau) vec  = vec_in + w
void dense_coupled_step(const OperatorSet& ops, double tau, double kappa_sol, double kappa_vec,
                        const DenseVector& vec_in, const DenseVector& base_load,
                        const DenseVector* w, DenseVector& sol, DenseVector& vec) {
    const std::size_t nv = ops.v_space->ndofs;
    const std::size_t nx = ops.x_space->ndofs;
    const double r = ops.params.beta / ops.params.delta;
    DenseMatrix a(static_cast<int>(nv + nx), static_cast<int>(nv + nx));
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t k = ops.a_ell.row_ptr[i]; k < ops.a_ell.row_ptr[i + 1]; ++k) {
            a(static_cast<int>(i), static_cast<int>(ops.a_ell.col_idx[k])) = ops.a_ell.vals[k];
        }
        for (std::size_t k = ops.mass_vx.row_ptr[i]; k < ops.mass_vx.row_ptr[i + 1]; ++k) {
            a(static_cast<int>(i), static_cast<int>(nv + ops.mass_vx.col_idx[k])) =
                -kappa_sol * ops.mass_vx.vals[k];
        }
    }
    for (std::size_t ix = 0; ix < nx; ++ix) {
        a(static_cast<int>(nv + ix), static_cast<int>(nv + ix)) = 1.0 + r * tau;
        const std::size_t node = ops.x_space->node_of_dof[ix];
        const std::ptrdiff_t jv = ops.v_space->dof_of_node[node];
        if (jv >= 0) {
            a(static_cast<int>(nv + ix), static_cast<int>(jv)) = -kappa_vec * tau;
        }
    }
    DenseVector rhs(nv + nx, 0.0);
    for (std::size_t i = 0; i < nv; ++i) {
        rhs[i] = base_load[i];
    }
    for (std::size_t ix = 0; ix < nx; ++ix) {
        rhs[nv + ix] = vec_in[ix] + (w != nullptr ? (*w)[ix] : 0.0);
    }
    const DenseVector u = dense_solve(a, rhs);
    sol.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(nv));
    vec.assign(u.begin() + static_cast<std::ptrdiff_t>(nv), u.end());
}

DenseVector initial_value(const OperatorSet& ops, const ForwardInput& in) {
    if (in.d0 != nullptr && in.d0_coeffs != nullptr) {
        throw ConfigError("initial value may be analytic or discrete, not both");
    }
    if (in.d0_coeffs != nullptr) {
        if (in.d0_coeffs->size() != ops.x_space->ndofs) {
            throw ConfigError("initial value size does not match the free space");
        }
        return *in.d0_coeffs;
    }
    if (in.d0 != nullptr) {
        const TimeFunction& fn = *in.d0;
        const DenseVector load = assemble_load(
            *ops.mesh, *ops.x_space, [&fn](double x, double y) { return fn.evaluate(0.0, x, y); });
        return ops.solve_mass_xx(load).x;
    }
    return zeros(ops.x_space->ndofs);
}

} // namespace

ReferenceSolution reference_forward(const OperatorSet& ops, const TimeGrid& grid,
                                    const ForwardInput& in) {
    ReferenceSolution out;
    out.elliptic = zero_field(grid, ops.v_space);
    out.evolving = zero_field(grid, ops.x_space);
    VDataProvider l_prov(ops, grid, in.l, in.l_field);
    XDataProvider f_prov(ops, grid, in.f, in.f_field, nullptr);
    DenseVector prev = initial_value(ops, in);
    out.evolving.initial_trace = prev;
    DenseVector load;
    DenseVector w;
    for (std::size_t k = 0; k < grid.intervals(); ++k) {
        l_prov.get(k, load);
        const DenseVector* wp = nullptr;
        if (f_prov.present()) {
            f_prov.get(k, w);
            wp = &w;
        }
        dense_coupled_step(ops, grid.tau(k), ops.params.beta, ops.params.beta / ops.params.delta,
                           prev, load, wp, out.elliptic.coeffs[k], out.evolving.coeffs[k]);
        prev = out.evolving.coeffs[k];
    }
    return out;
}

ReferenceSolution reference_adjoint(const OperatorSet& ops, const TimeGrid& grid,
                                    const AdjointInput& in) {
    ReferenceSolution out;
    out.elliptic = zero_field(grid, ops.v_space);
    out.evolving = zero_field(grid, ops.x_space);
    VDataProvider g1_prov(ops, grid, in.g1, in.g1_field, in.g1_combine);
    XDataProvider g2_prov(ops, grid, in.g2, in.g2_field, nullptr, in.g2_combine);
    DenseVector next;
    if (in.terminal != nullptr) {
        next = *in.terminal;
    } else {
        next = zeros(ops.x_space->ndofs);
    }
    DenseVector load;
    DenseVector w;
    for (std::size_t k = grid.intervals(); k-- > 0;) {
        g1_prov.get(k, load);
        const DenseVector* wp = nullptr;
        if (g2_prov.present()) {
            g2_prov.get(k, w);
            wp = &w;
        }
        dense_coupled_step(ops, grid.tau(k), ops.params.beta / ops.params.delta, ops.params.beta,
                           next, load, wp, out.elliptic.coeffs[k], out.evolving.coeffs[k]);
        next = out.evolving.coeffs[k];
    }
    return out;
}

DenseVector random_vector(std::size_t n, std::mt19937& rng, double amplitude) {
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    DenseVector v(n);
    for (double& e : v) {
        e = dist(rng);
    }
    return v;
}

SpaceTimeField random_field(const TimeGrid& grid, std::shared_ptr<const FeSpace> space,
                            std::mt19937& rng, double amplitude) {
    SpaceTimeField f = zero_field(grid, std::move(space));
    for (auto& c : f.coeffs) {
        c = random_vector(c.size(), rng, amplitude);
    }
    return f;
}

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

double max_abs(const DenseVector& v) {
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

double field_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
        for (std::size_t i = 0; i < a.coeffs[k].size(); ++i) {
            m = std::max(m, std::abs(a.coeffs[k][i] - b.coeffs[k][i]));
        }
    }
    return m;
}

double field_scale(const SpaceTimeField& a) {
    double m = 1.0;
    for (const auto& c : a.coeffs) {
        m = std::max(m, max_abs(c));
    }
    return m;
}

double inner_v_spacetime(const OperatorSet& ops, const SpaceTimeField& a,
                         const SpaceTimeField& b) {
    DenseVector tmp(ops.v_space->ndofs);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
        ops.mass_vv.multiply(a.coeffs[k], tmp);
        acc += a.grid.tau(k) * dot(tmp, b.coeffs[k]);
    }
    return acc;
}

double inner_x_spacetime(const OperatorSet& ops, const SpaceTimeField& a,
                         const SpaceTimeField& b) {
    DenseVector tmp(ops.x_space->ndofs);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
        ops.mass_xx.multiply(a.coeffs[k], tmp);
        acc += a.grid.tau(k) * dot(tmp, b.coeffs[k]);
    }
    return acc;
}

using Suite = void (*)(VerifyResult&);

void suite_quadrature(VerifyResult& r) {
    double worst = 0.0;
    // Gauss rule on [0,1] must integrate t^5 exactly.
    double s = 0.0;
    for (const auto& qp : default_quadrature().time_rule) {
        s += qp.weight * std::pow(qp.t, 5);
    }
    worst = std::max(worst, std::abs(s - 1.0 / 6.0));

    // Triangle rules must integrate degree <= 5 monomials exactly over the
    // square assembled from two cells.
    const Mesh mesh = build_unit_square_mesh(1);
    const auto integrate = [&](const QuadratureRule& rule, auto&& f) {
        double acc = 0.0;
        for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
            const auto& tri = mesh.tris[t];
            const auto& p0 = mesh.nodes[tri[0]];
            const auto& p1 = mesh.nodes[tri[1]];
            const auto& p2 = mesh.nodes[tri[2]];
            const double jac = 2.0 * triangle_area(mesh, t);
            for (const auto& qp : rule.space_rule) {
                const double x = qp.bary[0] * p0[0] + qp.bary[1] * p1[0] + qp.bary[2] * p2[0];
                const double y = qp.bary[0] * p0[1] + qp.bary[1] * p1[1] + qp.bary[2] * p2[1];
                acc += qp.weight * jac * f(x, y);
            }
        }
        return acc;
    };
    const auto x4y = [](double x, double y) { return x * x * x * x * y; };
    worst = std::max(worst, std::abs(integrate(default_quadrature(), x4y) - 0.1));
    worst = std::max(worst, std::abs(integrate(refined_quadrature(), x4y) - 0.1));
    const auto x4y3 = [](double x, double y) { return x * x * x * x * y * y * y; };
    worst = std::max(worst, std::abs(integrate(refined_quadrature(), x4y3) - 1.0 / 20.0));

    // The two orders must agree on a non-polynomial space-time norm.
    const ManufacturedCase mc = manufactured_case();
    const Mesh fine = build_unit_square_mesh(24);
    auto vfine = std::make_shared<FeSpace>(make_fe_space(fine, SpaceKind::DirichletP1));
    const SpaceTimeField zero = zero_field(uniform_time_grid(1.0, 8), vfine);
    const double e5 = spacetime_l2_error(fine, zero, mc.exact_phi, default_quadrature());
    const double e7 = spacetime_l2_error(fine, zero, mc.exact_phi, refined_quadrature());
    const double rel = std::abs(e5 - e7) / e7;
    r.passed = worst <= 1e-13 && rel <= 1e-8;
    r.detail = "monomial defect " + fmt(worst) + ", order disagreement " + fmt(rel);
}

void suite_manufactured(VerifyResult& r) {
    const ManufacturedCase mc = manufactured_case();
    const double pi = std::numbers::pi;
    const double alpha = mc.params.alpha;
    const double beta = mc.params.beta;
    const double rate = beta / mc.params.delta;
    const double amp = beta / (beta + mc.params.delta);
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = dist(rng);
        const double x = dist(rng);
        const double y = dist(rng);
        const double sinsin = std::sin(pi * x) * std::sin(pi * y);
        const double phi = mc.exact_phi.evaluate(t, x, y);
        const double d = mc.exact_d.evaluate(t, x, y);
        const double l = mc.source_l.evaluate(t, x, y);
        const double dd_dt = amp * sinsin * (std::exp(t) + rate * std::exp(-rate * t));
        const double lap_phi = -2.0 * pi * pi * sinsin * std::exp(t);
        worst = std::max(worst, std::abs(dd_dt + rate * (d - phi)));
        worst = std::max(worst, std::abs(-alpha * lap_phi + beta * phi - beta * d - l));
    }
    r.passed = worst <= 1e-10;
    r.detail = "max pointwise residual " + fmt(worst);
}

void suite_space_identities(VerifyResult& r) {
    const auto ops = make_operator_set(3, ModelParams{});
    std::mt19937 rng(7);
    const DenseVector u = random_vector(ops->v_space->ndofs, rng);
    const DenseVector eu = ops->embed(u);
    DenseVector lhs(ops->v_space->ndofs);
    DenseVector rhs(ops->v_space->ndofs);
    ops->mass_vx.multiply(eu, lhs);
    ops->mass_vv.multiply(u, rhs);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
    }
    DenseVector lx(ops->x_space->ndofs);
    DenseVector rx(ops->x_space->ndofs);
    ops->mass_xx.multiply(eu, lx);
    ops->mass_xv.multiply(u, rx);
    for (std::size_t i = 0; i < lx.size(); ++i) {
        worst = std::max(worst, std::abs(lx[i] - rx[i]));
    }
    worst = std::max(worst, std::abs(ops->norm_x(eu) - ops->norm_v(u)));
    r.passed = worst <= 1e-13;
    r.detail = "max identity defect " + fmt(worst);
}

void suite_oracle_state(VerifyResult& r) {
    std::mt19937 rng(101);
    double worst = 0.0;
    for (int n : {1, 2, 3}) {
        const auto ops = make_operator_set(n, ModelParams{});
        const TimeGrid grid = make_time_grid({0.0, 0.4, 0.7, 1.0});
        const SpaceTimeField l = random_field(grid, ops->v_space, rng);
        const SpaceTimeField f = random_field(grid, ops->x_space, rng);
        const DenseVector d0 = random_vector(ops->x_space->ndofs, rng);
        ForwardInput in;
        in.l_field = &l;
        in.f_field = &f;
        in.d0_coeffs = &d0;
        StepControls ctl;
        ctl.fp_tol = 1e-13;
        const ForwardResult got = solve_state(*ops, grid, in, ctl);
        const ReferenceSolution ref = reference_forward(*ops, grid, in);
        worst = std::max(worst, field_diff(got.phi, ref.elliptic) / field_scale(ref.elliptic));
        worst = std::max(worst, field_diff(got.d, ref.evolving) / field_scale(ref.evolving));
    }
    r.passed = worst <= 1e-10;
    r.detail = "max relative disagreement " + fmt(worst);
}

void suite_oracle_adjoint(VerifyResult& r) {
    std::mt19937 rng(202);
    double worst = 0.0;
    for (int n : {1, 2, 3}) {
        const auto ops = make_operator_set(n, ModelParams{});
        const TimeGrid grid = make_time_grid({0.0, 0.25, 0.65, 1.0});
        const SpaceTimeField g1 = random_field(grid, ops->v_space, rng);
        const SpaceTimeField g2 = random_field(grid, ops->x_space, rng);
        const DenseVector pT = random_vector(ops->x_space->ndofs, rng);
        AdjointInput in;
        in.g1_field = &g1;
        in.g2_field = &g2;
        in.terminal = &pT;
        StepControls ctl;
        ctl.fp_tol = 1e-13;
        const AdjointResult got = solve_adjoint(*ops, grid, in, ctl);
        const ReferenceSolution ref = reference_adjoint(*ops, grid, in);
        worst = std::max(worst, field_diff(got.z, ref.elliptic) / field_scale(ref.elliptic));
        worst = std::max(worst, field_diff(got.p, ref.evolving) / field_scale(ref.evolving));
    }
    r.passed = worst <= 1e-10;
    r.detail = "max relative disagreement " + fmt(worst);
}

void suite_duality(VerifyResult& r) {
    std::mt19937 rng(303);
    const auto ops = make_operator_set(3, ModelParams{});
    const TimeGrid grid = uniform_time_grid(1.0, 3);
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        const SpaceTimeField dl = random_field(grid, ops->v_space, rng);
        const SpaceTimeField g1 = random_field(grid, ops->v_space, rng);
        const SpaceTimeField g2 = random_field(grid, ops->x_space, rng);
        ForwardInput fin;
        fin.l_field = &dl;
        const ForwardResult fwd = solve_state(*ops, grid, fin);
        AdjointInput ain;
        ain.g1_field = &g1;
        ain.g2_field = &g2;
        const AdjointResult adj = solve_adjoint(*ops, grid, ain);
        const double lhs =
            inner_v_spacetime(*ops, g1, fwd.phi) + inner_x_spacetime(*ops, g2, fwd.d);
        const double rhs = inner_v_spacetime(*ops, dl, adj.z);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
    r.passed = worst <= 1e-9;
    r.detail = "max relative identity defect " + fmt(worst);
}

void suite_mode_equivalence(VerifyResult& r) {
    std::mt19937 rng(404);
    double worst = 0.0;
    for (int n : {1, 2, 4}) {
        const auto ops = make_operator_set(n, ModelParams{}, 1e-13);
        const TimeGrid grid = uniform_time_grid(1.0, 2);
        const SpaceTimeField l = random_field(grid, ops->v_space, rng);
        const DenseVector d0 = random_vector(ops->x_space->ndofs, rng);
        ForwardInput in;
        in.l_field = &l;
        in.d0_coeffs = &d0;
        StepControls fp;
        fp.mode = StepMode::FixedPoint;
        fp.fp_tol = 1e-12;
        StepControls mono;
        mono.mode = StepMode::Monolithic;
        const ForwardResult a = solve_state(*ops, grid, in, fp);
        const ForwardResult b = solve_state(*ops, grid, in, mono);
        worst = std::max(worst, field_diff(a.phi, b.phi) / field_scale(b.phi));
        worst = std::max(worst, field_diff(a.d, b.d) / field_scale(b.d));
    }
    r.passed = worst <= 1e-11;
    r.detail = "max relative disagreement " + fmt(worst);
}

void suite_stability_slack(VerifyResult& r) {
    const ManufacturedCase mc = manufactured_case();
    const auto ops = make_operator_set(8, mc.params);
    const TimeGrid grid = uniform_time_grid(mc.params.T, 8);
    ForwardInput fin;
    fin.l = &mc.source_l;
    fin.d0 = &mc.d0;
    const ForwardResult fwd = solve_state(*ops, grid, fin);
    AdjointInput ain;
    ain.g1 = &mc.exact_phi;
    ain.g2 = &mc.exact_d;
    const AdjointResult adj = solve_adjoint(*ops, grid, ain);
    const double min_slack = std::min(fwd.stability.min_slack, adj.stability.min_slack);
    const double excess = std::max(fwd.stats.max_ratio_excess, adj.stats.max_ratio_excess);
    r.passed = min_slack >= -1e-10 && excess <= 1e-8;
    r.detail = "min slack " + fmt(min_slack) + ", contraction excess " + fmt(excess);
}

void suite_gradient(VerifyResult& r) {
    std::mt19937 rng(505);
    const ManufacturedCase mc = manufactured_case();
    ControlProblem pb;
    pb.ops = make_operator_set(3, mc.params);
    pb.grid = uniform_time_grid(mc.params.T, 3);
    pb.alpha_l = mc.alpha_l;
    pb.desired_phi = mc.exact_phi;
    pb.desired_d = mc.exact_d;
    pb.control_shift = mc.source_l;
    pb.d0 = mc.d0;
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        const SpaceTimeField l = random_field(pb.grid, pb.ops->v_space, rng);
        const SpaceTimeField dl = random_field(pb.grid, pb.ops->v_space, rng);
        const SpaceTimeField grad = reduced_gradient(pb, l);
        const double directional = sigma_inner(*pb.ops, grad, dl);
        const double eps = 1e-4;
        SpaceTimeField lp = l;
        SpaceTimeField lm = l;
        for (std::size_t k = 0; k < l.coeffs.size(); ++k) {
            axpy(eps, dl.coeffs[k], lp.coeffs[k]);
            axpy(-eps, dl.coeffs[k], lm.coeffs[k]);
        }
        const double jp = objective(pb, lp);
        const double jm = objective(pb, lm);
        const double fd = (jp - jm) / (2.0 * eps);
        const double scale = 1.0 + std::abs(objective(pb, l));
        worst = std::max(worst, std::abs(directional - fd) / scale);
    }
    r.passed = worst <= 1e-6;
    r.detail = "max scaled derivative mismatch " + fmt(worst);
}

void suite_optimizer(VerifyResult& r) {
    const ManufacturedCase mc = manufactured_case();
    ControlProblem pb;
    pb.ops = make_operator_set(4, mc.params);
    pb.grid = uniform_time_grid(mc.params.T, 4);
    pb.alpha_l = mc.alpha_l;
    pb.desired_phi = mc.exact_phi;
    pb.desired_d = mc.exact_d;
    pb.control_shift = mc.source_l;
    pb.d0 = mc.d0;
    OptimizerConfig cfg;
    const OcpResult res = solve_ocp(pb, cfg);
    bool monotone = true;
    for (std::size_t i = 1; i < res.history.iterations.size(); ++i) {
        if (res.history.iterations[i].objective >
            res.history.iterations[i - 1].objective + 1e-12) {
            monotone = false;
        }
    }
    const double bound = 10.0 * cfg.cg_rel_tol * res.history.grad0_norm;
    r.passed = res.history.converged && monotone && res.history.r_vd <= bound;
    r.detail = "r_vd " + fmt(res.history.r_vd) + " vs bound " + fmt(bound) + ", " +
               std::to_string(res.history.cg_iters) + " iterations" +
               (monotone ? "" : ", objective not monotone");
}

} // namespace

std::vector<VerifyResult> run_verify_suites() {
    const std::pair<const char*, Suite> suites[] = {
        {"quadrature-rules", suite_quadrature},
        {"manufactured-residuals", suite_manufactured},
        {"space-identities", suite_space_identities},
        {"oracle-state", suite_oracle_state},
        {"oracle-adjoint", suite_oracle_adjoint},
        {"duality-identity", suite_duality},
        {"mode-equivalence", suite_mode_equivalence},
        {"stability-slack", suite_stability_slack},
        {"gradient-consistency", suite_gradient},
        {"optimizer-convergence", suite_optimizer},
    };
    std::vector<VerifyResult> results;
    results.reserve(std::size(suites));
    for (const auto& [name, suite] : suites) {
        VerifyResult r;
        r.name = name;
        try {
            suite(r);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

bool all_passed(const std::vector<VerifyResult>& results) {
    for (const auto& r : results) {
        if (!r.passed) {
            return false;
        }
    }
    return true;
}

std::string verify_report(const std::vector<VerifyResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += r.passed ? "PASS " : "FAIL ";
        out += r.name;
        out += ": ";
        out += r.detail;
        out += '\n';
    }
    out += all_passed(results) ? "all suites passed\n" : "at least one suite failed\n";
    return out;
}

} // namespace dampde
