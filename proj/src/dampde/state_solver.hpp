#pragma once

#include "dampde/field.hpp"
#include "dampde/operators.hpp"
#include "dampde/timegrid.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace dampde {

enum class StepMode {
    FixedPoint, // contraction iteration on the evolution variable
    Monolithic, // one linear solve after eliminating the evolution update
};

struct StepControls {
    StepMode mode = StepMode::FixedPoint;
    double fp_tol = 1e-13;
    int fp_cap = 200;
    // Above this contraction factor the fixed point starts from a monolithic
    // solve instead of the previous interval value, which keeps the iteration
    // count low for very large (beta/delta) tau.
    double mono_start_threshold = 0.8;
};

// Counters accumulated over a sweep (both directions use the same record).
struct SolveStats {
    long long pcg_iters = 0;  // inner PCG iterations over all linear solves
    long long coupled_solves = 0; // elliptic-type solves inside coupled steps
    double max_ratio_excess = -std::numeric_limits<double>::infinity();
    // Largest observed (successive-difference ratio - contraction bound).
};

// Diagnostics of one sweep: per-interval slack of the energy-style bound
//   |d_m| <= |d_{m-1}| + (tau_m/delta) |(P_tau l)_m| + |int_{I_m} f|
// (or its backward mirror), the running maxima, and the weighted jump sum
// sum_m tau_m^{-1} |[d]_{m-1}|^2 with the initial trace as value ahead of
// interval 0.
struct StabilityReport {
    double max_d_norm = 0.0;
    double max_phi_norm = 0.0;
    std::vector<double> slack;
    double min_slack = std::numeric_limits<double>::infinity();
    double jump_sum = 0.0;
};

// Per-tau factorization cache for the eliminated coupled-step matrix.
class MonoCache {
public:
    struct Entry {
        double tau;
        CsrMatrix matrix;
        IcFactor ic;
    };

    const Entry& get(const OperatorSet& ops, double tau);

private:
    std::vector<std::unique_ptr<Entry>> entries_;
};

// One interval of either sweep. Solves the coupled pair
//   A_ell sol = kappa_sol M_vx vec + base_load
//   vec = c (vec_in + kappa_vec tau embed(sol) + w),  c = 1/(1 + (beta/delta) tau)
// where the forward sweep uses (kappa_sol, kappa_vec) = (beta, beta/delta)
// with sol = phi, vec = d, and the backward sweep uses (beta/delta, beta)
// with sol = z, vec = p.
struct CoupledStepInput {
    double tau = 0.0;
    double kappa_sol = 0.0;
    double kappa_vec = 0.0;
    const DenseVector* vec_in = nullptr;    // on the free space
    const DenseVector* base_load = nullptr; // load on the Dirichlet space
    const DenseVector* w = nullptr;         // nodal on the free space, null = zero
    const DenseVector* sol_warm = nullptr;  // warm start, null = zero
};

struct CoupledStepResult {
    DenseVector sol;
    DenseVector vec;
    double contraction_bound = 0.0; // q = (beta/delta) tau / (1 + (beta/delta) tau)
    double max_ratio_excess = -std::numeric_limits<double>::infinity();
    int solves = 0;
    long long pcg_iters = 0;
};

CoupledStepResult coupled_step(const OperatorSet& ops, const CoupledStepInput& in,
                               const StepControls& ctl, MonoCache& mono);

// Elliptic sub-solve alpha (grad phi, grad psi) + beta (phi, psi) =
// beta (d, psi) + (load_l, psi), the discrete solution operator of the
// nonlocal variable for frozen d.
DenseVector solve_elliptic(const OperatorSet& ops, const DenseVector& d_coeffs,
                           const DenseVector& load_l, SolveStats* stats = nullptr);

// One forward interval: d_prev and the interval loads in, (phi_m, d_m) out.
// f_load is the load vector of int_{I_m} f dt (converted nodally by a mass
// solve); pass null when f vanishes.
struct StepResult {
    DenseVector phi;
    DenseVector d;
    double contraction_bound = 0.0;
    double max_ratio_excess = -std::numeric_limits<double>::infinity();
    long long pcg_iters = 0;
    int solves = 0;
};

StepResult step_interval(const OperatorSet& ops, const TimeGrid& grid, std::size_t interval,
                         const DenseVector& d_prev, const DenseVector& load_l,
                         const DenseVector* f_load, const StepControls& ctl);

// Data feeds for a sweep: l-type data lives against the Dirichlet space,
// f-type data against the free space. Each may be analytic (time function)
// or already discrete (piecewise-constant field).

struct ForwardInput {
    const TimeFunction* l = nullptr;
    const SpaceTimeField* l_field = nullptr; // Dirichlet-space history
    const TimeFunction* d0 = nullptr;
    const DenseVector* d0_coeffs = nullptr; // nodal values on the free space
    const TimeFunction* f = nullptr;
    const SpaceTimeField* f_field = nullptr; // free-space history
};

struct ForwardResult {
    SpaceTimeField phi;
    SpaceTimeField d;
    SolveStats stats;
    StabilityReport stability;
};

ForwardResult solve_state(const OperatorSet& ops, const TimeGrid& grid, const ForwardInput& in,
                          const StepControls& ctl = StepControls{});

// Recomputes the forward diagnostics record for given fields and data.
StabilityReport stability_report(const OperatorSet& ops, const SpaceTimeField& phi,
                                 const SpaceTimeField& d, const TimeFunction* l,
                                 const SpaceTimeField* l_field, const TimeFunction* f = nullptr,
                                 const SpaceTimeField* f_field = nullptr);

// Internal provider helpers shared by the forward and backward sweeps.
// Analytic data is represented on each interval by its value at the
// interval's right endpoint; discrete fields are used as-is.

// Per-interval load of the Dirichlet-space data representative and, on
// request, its L2 norm. With combine = false the data is either analytic
// (fn) or discrete (field); with combine = true it is the difference
// field - fn, as needed by tracking-type adjoint loads.
class VDataProvider {
public:
    VDataProvider(const OperatorSet& ops, const TimeGrid& grid, const TimeFunction* fn,
                  const SpaceTimeField* field, bool combine = false);

    void get(std::size_t interval, DenseVector& load, double* rep_norm = nullptr) const;
    bool present() const { return fn_ != nullptr || field_ != nullptr; }

private:
    const OperatorSet& ops_;
    const TimeGrid& grid_;
    const TimeFunction* fn_;
    const SpaceTimeField* field_;
    bool combine_;
    DenseVector separable_load_;
    double separable_norm_ = 0.0;
    std::vector<double> separable_vals_;
};

// Per-interval nodal contribution w = tau_k * M^{-1} (load of the data
// representative) on the free space, plus (on request) the norm
// tau_k * |representative| for the stability bound. Supports the same
// combine semantics as VDataProvider.
class XDataProvider {
public:
    XDataProvider(const OperatorSet& ops, const TimeGrid& grid, const TimeFunction* fn,
                  const SpaceTimeField* field, SolveStats* stats, bool combine = false);

    bool present() const { return fn_ != nullptr || field_ != nullptr; }
    void get(std::size_t interval, DenseVector& w, double* int_norm = nullptr) const;

private:
    const OperatorSet& ops_;
    const TimeGrid& grid_;
    const TimeFunction* fn_;
    const SpaceTimeField* field_;
    SolveStats* stats_;
    bool combine_;
    DenseVector separable_w_; // nodal coefficients of the projected spatial part
    double separable_norm_ = 0.0;
    std::vector<double> separable_vals_;
};

// L2(Omega) norm of a spatial function by the space quadrature rule.
double spatial_l2_norm(const Mesh& mesh, const SpatialFn& f,
                       const QuadratureRule& quad = default_quadrature());

} // namespace dampde
