#pragma once

#include "dampde/csr.hpp"
#include "dampde/mesh.hpp"
#include "dampde/pcg.hpp"
#include "dampde/space.hpp"
#include "dampde/vec.hpp"

#include <memory>

namespace dampde {

// Model coefficients of the coupled elliptic/evolution pair: diffusion weight
// alpha, coupling strength beta, relaxation time delta, final time T.
struct ModelParams {
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 0.1;
    double T = 1.0;
};

void validate_params(const ModelParams& params);

// Matrices and factorizations tied to one mesh and one parameter set. Built
// once, then shared read-only; every member function is const and safe to
// call concurrently.
struct OperatorSet {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const FeSpace> v_space; // DirichletP1
    std::shared_ptr<const FeSpace> x_space; // FreeP1
    ModelParams params;
    double pcg_rel_tol = 1e-12;

    CsrMatrix stiffness; // K on the Dirichlet space
    CsrMatrix mass_vv;
    CsrMatrix mass_vx; // rows Dirichlet, cols free
    CsrMatrix mass_xv; // transpose of mass_vx
    CsrMatrix mass_xx;
    CsrMatrix a_ell; // alpha K + beta M_vv
    IcFactor a_ell_ic;
    DenseVector mass_vv_inv_diag;
    DenseVector mass_xx_inv_diag;

    double inner_v(const DenseVector& u, const DenseVector& w) const;
    double inner_x(const DenseVector& u, const DenseVector& w) const;
    double norm_v(const DenseVector& u) const;
    double norm_x(const DenseVector& u) const;

    DenseVector embed(const DenseVector& v) const;
    void embed(const DenseVector& v, DenseVector& out) const;
    DenseVector restrict_v(const DenseVector& x) const;

    // Elliptic solve with the cached incomplete Cholesky preconditioner,
    // optionally warm-started.
    PcgResult solve_a_ell(const DenseVector& rhs, const DenseVector* x0 = nullptr) const;

    // Mass solves with Jacobi preconditioning.
    PcgResult solve_mass_vv(const DenseVector& rhs) const;
    PcgResult solve_mass_xx(const DenseVector& rhs) const;

    // alpha K + beta c M_vv for c = 1 / (1 + (beta/delta) tau), the matrix of
    // the per-interval coupled step after eliminating the evolution update.
    CsrMatrix coupled_step_matrix(double tau) const;
};

std::shared_ptr<const OperatorSet> make_operator_set(int n, const ModelParams& params,
                                                     double pcg_rel_tol = 1e-12);

} // namespace dampde
