#pragma once

#include "field.hpp"
#include "operators.hpp"
#include "state_solver.hpp"

namespace dampde {

// Right-hand-side data for the backward-in-time solve. Each of the two data
// terms may be analytic, discrete, or (with the combine flag set) the
// difference field minus function; exactly the combinations VDataProvider and
// XDataProvider accept.
struct AdjointInput {
    const TimeFunction* g1 = nullptr;        // data tested against the Dirichlet space
    const SpaceTimeField* g1_field = nullptr;
    bool g1_combine = false;
    const TimeFunction* g2 = nullptr;        // data tested against the free space
    const SpaceTimeField* g2_field = nullptr;
    bool g2_combine = false;
    const DenseVector* terminal = nullptr;   // value of p past the final time; null means zero
};

struct AdjointResult {
    SpaceTimeField z;  // Dirichlet space
    SpaceTimeField p;  // free space
    SolveStats stats;
    // max_phi_norm holds max ||z||, max_d_norm holds max ||p||; slack[k] is
    // ||p_{k+1}|| + tau_k*beta*||z_k|| + ||w_k|| - ||p_k|| for the backward
    // update, and jump_sum weights the backward jumps (terminal one included).
    StabilityReport stability;
};

AdjointResult solve_adjoint(const OperatorSet& ops, const TimeGrid& grid, const AdjointInput& in,
                            const StepControls& ctl = {});

// Evaluates the space-time form B((phi,d),(z,p)) for piecewise-constant-in-time
// fields from the assembled matrices, jump terms included.
double bilinear_form_apply(const OperatorSet& ops, const SpaceTimeField& phi,
                           const SpaceTimeField& d, const SpaceTimeField& z,
                           const SpaceTimeField& p);

} // namespace dampde
