#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adjoint_solver.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "operators.hpp"
#include "state_solver.hpp"

namespace dampde {

// Tracking-type control problem:
//   minimize 1/2 ||phi - phi_d||^2 + 1/2 ||d - d_d||^2 + alpha_l/2 ||l - l_d||^2
// over controls constant on each time interval and P1-Dirichlet in space,
// subject to the coupled state equations with initial value d0. Desired states
// may be analytic functions or discrete fields (at most one of each pair);
// absent data means zero.
struct ControlProblem {
    std::shared_ptr<const OperatorSet> ops;
    TimeGrid grid;
    double alpha_l = 1.0;
    std::optional<TimeFunction> desired_phi;
    const SpaceTimeField* desired_phi_field = nullptr;
    std::optional<TimeFunction> desired_d;
    const SpaceTimeField* desired_d_field = nullptr;
    std::optional<TimeFunction> control_shift;  // l_d
    std::optional<TimeFunction> d0;
    const DenseVector* d0_coeffs = nullptr;
};

struct OptimizerConfig {
    double cg_rel_tol = 1e-10;
    int max_cg_iter = 500;
};

struct OcpIteration {
    double objective = 0.0;  // tracked through the exact quadratic decrease
    double grad_norm = 0.0;  // recurred residual norm in the control inner product
};

struct OcpHistory {
    std::vector<OcpIteration> iterations;  // entry 0 describes the zero start
    double grad0_norm = 0.0;
    double r_vd = 0.0;  // ||alpha_l (l - P l_d) + z||_sigma at the returned control
    int cg_iters = 0;
    double objective = 0.0;  // fresh evaluation at the returned control
    bool converged = false;
};

struct OcpResult {
    SpaceTimeField l;
    SpaceTimeField phi;
    SpaceTimeField d;
    SpaceTimeField z;
    SpaceTimeField p;
    OcpHistory history;
    SolveStats stats;  // aggregated over all inner forward/adjoint solves
    double min_state_slack = std::numeric_limits<double>::infinity();
    double min_adjoint_slack = std::numeric_limits<double>::infinity();
};

// Thrown when the iteration cap is hit; carries the best iterate found.
class MaxIterExceeded : public NonConvergence {
public:
    MaxIterExceeded(const std::string& what, int iters, double residual,
                    std::shared_ptr<OcpResult> best)
        : NonConvergence(what, iters, residual), best_iterate(std::move(best)) {}

    std::shared_ptr<OcpResult> best_iterate;
};

// <u,v>_sigma = sum_k tau_k u_k' M_vv v_k, the L2(time x domain) inner product
// on the control space.
double sigma_inner(const OperatorSet& ops, const SpaceTimeField& u, const SpaceTimeField& v);
double sigma_norm(const OperatorSet& ops, const SpaceTimeField& u);

// Representation of an analytic function in the control space: the value at
// each interval's right endpoint followed by a spatial mass solve. Matches
// how the solver represents analytic data per interval.
SpaceTimeField project_control(const OperatorSet& ops, const TimeGrid& grid,
                               const TimeFunction& fn, SolveStats* stats = nullptr);

double objective(const ControlProblem& pb, const SpaceTimeField& l, const StepControls& ctl = {});

// Riesz representative of the derivative of the reduced objective in the
// control inner product: alpha_l (l - P l_d) + z(l).
SpaceTimeField reduced_gradient(const ControlProblem& pb, const SpaceTimeField& l,
                                const StepControls& ctl = {});

// Action of the reduced Hessian: alpha_l dl + z-part of the adjoint of the
// linearized state driven by dl with zero initial value.
SpaceTimeField hessian_apply(const ControlProblem& pb, const SpaceTimeField& dl,
                             const StepControls& ctl = {});

// Conjugate gradients on the reduced problem from the zero control, in the
// sigma inner product, stopping at cg_rel_tol relative to the initial
// gradient norm.
OcpResult solve_ocp(const ControlProblem& pb, const OptimizerConfig& cfg = {},
                    const StepControls& ctl = {});

} // namespace dampde
