#include "dampde/operators.hpp"

#include "dampde/assemble.hpp"
#include "dampde/errors.hpp"

#include <cmath>
#include <utility>

namespace dampde {

void validate_params(const ModelParams& params) {
    if (!(params.alpha > 0.0)) {
        throw ConfigError("model parameter alpha must be positive");
    }
    if (!(params.beta > 0.0)) {
        throw ConfigError("model parameter beta must be positive");
    }
    if (!(params.delta > 0.0)) {
        throw ConfigError("model parameter delta must be positive");
    }
    if (!(params.T > 0.0)) {
        throw ConfigError("final time T must be positive");
    }
}

double OperatorSet::inner_v(const DenseVector& u, const DenseVector& w) const {
    DenseVector mw;
    mass_vv.multiply(w, mw);
    return dot(u, mw);
}

double OperatorSet::inner_x(const DenseVector& u, const DenseVector& w) const {
    DenseVector mw;
    mass_xx.multiply(w, mw);
    return dot(u, mw);
}

double OperatorSet::norm_v(const DenseVector& u) const {
    return std::sqrt(std::max(0.0, inner_v(u, u)));
}

double OperatorSet::norm_x(const DenseVector& u) const {
    return std::sqrt(std::max(0.0, inner_x(u, u)));
}

DenseVector OperatorSet::embed(const DenseVector& v) const {
    return embed_dirichlet(*mesh, *v_space, v);
}

void OperatorSet::embed(const DenseVector& v, DenseVector& out) const {
    embed_dirichlet(*mesh, *v_space, v, out);
}

DenseVector OperatorSet::restrict_v(const DenseVector& x) const {
    return restrict_to_dirichlet(*mesh, *v_space, x);
}

PcgResult OperatorSet::solve_a_ell(const DenseVector& rhs, const DenseVector* x0) const {
    SolverConfig cfg;
    cfg.rel_tol = pcg_rel_tol;
    cfg.abs_tol = 0.0;
    return pcg_solve_ex(a_ell, rhs, cfg, x0, &a_ell_ic, nullptr);
}

PcgResult OperatorSet::solve_mass_vv(const DenseVector& rhs) const {
    SolverConfig cfg;
    cfg.rel_tol = pcg_rel_tol;
    cfg.abs_tol = 0.0;
    return pcg_solve_ex(mass_vv, rhs, cfg, nullptr, nullptr, &mass_vv_inv_diag);
}

PcgResult OperatorSet::solve_mass_xx(const DenseVector& rhs) const {
    SolverConfig cfg;
    cfg.rel_tol = pcg_rel_tol;
    cfg.abs_tol = 0.0;
    return pcg_solve_ex(mass_xx, rhs, cfg, nullptr, nullptr, &mass_xx_inv_diag);
}

CsrMatrix OperatorSet::coupled_step_matrix(double tau) const {
    const double ratio = params.beta / params.delta;
    const double c = 1.0 / (1.0 + ratio * tau);
    return add_same_pattern(params.alpha, stiffness, params.beta * c, mass_vv);
}

namespace {

DenseVector positive_inverse_diag(const CsrMatrix& m) {
    DenseVector d(m.nrows, 1.0);
    for (std::size_t i = 0; i < m.nrows; ++i) {
        const double v = m.diag(i);
        if (!(v > 0.0)) {
            throw NumericalError("mass matrix has a nonpositive diagonal entry");
        }
        d[i] = 1.0 / v;
    }
    return d;
}

} // namespace

std::shared_ptr<const OperatorSet> make_operator_set(int n, const ModelParams& params,
                                                     double pcg_rel_tol) {
    validate_params(params);
    if (!(pcg_rel_tol > 0.0)) {
        throw ConfigError("pcg_rel_tol must be positive");
    }
    auto ops = std::make_shared<OperatorSet>();
    auto mesh = std::make_shared<Mesh>(build_unit_square_mesh(n));
    ops->mesh = mesh;
    ops->v_space = std::make_shared<FeSpace>(make_fe_space(*mesh, SpaceKind::DirichletP1));
    ops->x_space = std::make_shared<FeSpace>(make_fe_space(*mesh, SpaceKind::FreeP1));
    ops->params = params;
    ops->pcg_rel_tol = pcg_rel_tol;

    ops->stiffness = assemble_stiffness(*mesh, *ops->v_space);
    ops->mass_vv = assemble_mass(*mesh, *ops->v_space, *ops->v_space);
    ops->mass_vx = assemble_mass(*mesh, *ops->x_space, *ops->v_space);
    ops->mass_xv = transpose(ops->mass_vx);
    ops->mass_xx = assemble_mass(*mesh, *ops->x_space, *ops->x_space);
    ops->a_ell = add_same_pattern(params.alpha, ops->stiffness, params.beta, ops->mass_vv);
    ops->a_ell_ic = ic0_factor(ops->a_ell);
    ops->mass_vv_inv_diag = positive_inverse_diag(ops->mass_vv);
    ops->mass_xx_inv_diag = positive_inverse_diag(ops->mass_xx);
    return ops;
}

} // namespace dampde
