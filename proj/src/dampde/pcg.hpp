#pragma once

#include "dampde/csr.hpp"
#include "dampde/vec.hpp"

namespace dampde {

enum class Preconditioner {
    None,
    Jacobi,
    Ic0,  // incomplete Cholesky on the existing pattern
};

struct SolverConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    // 0 selects the default budget 10 * sqrt(dofs) + 100.
    int max_iter = 0;
    Preconditioner preconditioner = Preconditioner::Jacobi;
};

struct PcgResult {
    DenseVector x;
    int iters = 0;
    double residual = 0.0;
};

// Incomplete Cholesky factor restricted to the lower-triangular pattern of A.
// apply() solves L L^T z = r.
struct IcFactor {
    CsrMatrix lower;    // L, diagonal stored last in each row
    CsrMatrix lower_t;  // L^T for the backward sweep

    void apply(const DenseVector& r, DenseVector& z) const;
};

IcFactor ic0_factor(const CsrMatrix& a);

// Conjugate gradients for symmetric positive definite systems. Stops when the
// true residual satisfies |A x - b| <= max(rel_tol * |b|, abs_tol).
PcgResult pcg_solve(const CsrMatrix& a, const DenseVector& b, const SolverConfig& cfg);

// Variant with a warm start and an externally owned preconditioner, used on
// the time-stepping hot path. Either prebuilt factor pointer may be null, in
// which case cfg.preconditioner decides what gets built locally.
PcgResult pcg_solve_ex(const CsrMatrix& a,
                       const DenseVector& b,
                       const SolverConfig& cfg,
                       const DenseVector* x0,
                       const IcFactor* ic,
                       const DenseVector* jacobi_inv_diag);

} // namespace dampde
