#include "adjoint_solver.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace dampde {

AdjointResult solve_adjoint(const OperatorSet& ops, const TimeGrid& grid, const AdjointInput& in,
                            const StepControls& ctl) {
    AdjointResult out;
    SolveStats& stats = out.stats;
    VDataProvider g1_prov(ops, grid, in.g1, in.g1_field, in.g1_combine);
    XDataProvider g2_prov(ops, grid, in.g2, in.g2_field, &stats, in.g2_combine);

    DenseVector terminal;
    if (in.terminal != nullptr) {
        if (in.terminal->size() != ops.x_space->ndofs) {
            throw ConfigError("terminal value size does not match the free space");
        }
        terminal = *in.terminal;
    } else {
        terminal = zeros(ops.x_space->ndofs);
    }

    const std::size_t m = grid.intervals();
    out.z = zero_field(grid, ops.v_space);
    out.p = zero_field(grid, ops.x_space);

    StabilityReport& rep = out.stability;
    rep.slack.assign(m, 0.0);

    MonoCache mono;
    const double beta = ops.params.beta;
    const double delta = ops.params.delta;
    const DenseVector* p_next = &terminal;
    double next_norm = ops.norm_x(terminal);
    const DenseVector* warm = nullptr;
    DenseVector load;
    DenseVector w;
    DenseVector jump;

    for (std::size_t k = m; k-- > 0;) {
        g1_prov.get(k, load);
        const DenseVector* wp = nullptr;
        if (g2_prov.present()) {
            g2_prov.get(k, w);
            wp = &w;
        }

        CoupledStepInput cin;
        cin.tau = grid.tau(k);
        cin.kappa_sol = beta / delta;
        cin.kappa_vec = beta;
        cin.vec_in = p_next;
        cin.base_load = &load;
        cin.w = wp;
        cin.sol_warm = warm;
        CoupledStepResult cs = coupled_step(ops, cin, ctl, mono);
        stats.pcg_iters += cs.pcg_iters;
        stats.coupled_solves += cs.solves;
        stats.max_ratio_excess = std::max(stats.max_ratio_excess, cs.max_ratio_excess);

        const double p_norm = ops.norm_x(cs.vec);
        const double z_norm = ops.norm_v(cs.sol);
        rep.max_d_norm = std::max(rep.max_d_norm, p_norm);
        rep.max_phi_norm = std::max(rep.max_phi_norm, z_norm);
        const double w_norm = wp != nullptr ? ops.norm_x(*wp) : 0.0;
        rep.slack[k] = next_norm + cin.tau * beta * z_norm + w_norm - p_norm;
        rep.min_slack = std::min(rep.min_slack, rep.slack[k]);
        jump = *p_next;
        axpy(-1.0, cs.vec, jump);
        const double jn = ops.norm_x(jump);
        rep.jump_sum += jn * jn / cin.tau;

        out.z.coeffs[k] = std::move(cs.sol);
        out.p.coeffs[k] = std::move(cs.vec);
        warm = &out.z.coeffs[k];
        p_next = &out.p.coeffs[k];
        next_norm = p_norm;
    }
    return out;
}

double bilinear_form_apply(const OperatorSet& ops, const SpaceTimeField& phi,
                           const SpaceTimeField& d, const SpaceTimeField& z,
                           const SpaceTimeField& p) {
    validate_field(phi);
    validate_field(d);
    validate_field(z);
    validate_field(p);
    const TimeGrid& grid = phi.grid;
    if (!same_grid(d.grid, grid) || !same_grid(z.grid, grid) || !same_grid(p.grid, grid)) {
        throw ConfigError("fields live on different time grids");
    }
    if (phi.space->ndofs != ops.v_space->ndofs || z.space->ndofs != ops.v_space->ndofs ||
        d.space->ndofs != ops.x_space->ndofs || p.space->ndofs != ops.x_space->ndofs) {
        throw ConfigError("field spaces do not match the operator set");
    }

    const double alpha = ops.params.alpha;
    const double beta = ops.params.beta;
    const double ratio = beta / ops.params.delta;
    const std::size_t m = grid.intervals();

    double total = 0.0;
    DenseVector tmp_v(ops.v_space->ndofs);
    DenseVector tmp_x(ops.x_space->ndofs);
    for (std::size_t k = 0; k < m; ++k) {
        const DenseVector& phik = phi.coeffs[k];
        const DenseVector& dk = d.coeffs[k];
        const DenseVector& zk = z.coeffs[k];
        const DenseVector& pk = p.coeffs[k];
        double part = 0.0;
        if (ops.v_space->ndofs > 0) {
            ops.stiffness.multiply(phik, tmp_v);
            part += alpha * dot(tmp_v, zk);
            ops.mass_vv.multiply(phik, tmp_v);
            part += beta * dot(tmp_v, zk);
            ops.mass_vx.multiply(dk, tmp_v);
            part -= beta * dot(tmp_v, zk);
            ops.mass_vx.multiply(pk, tmp_v);
            part -= ratio * dot(tmp_v, phik);
        }
        ops.mass_xx.multiply(pk, tmp_x);
        part += ratio * dot(dk, tmp_x);
        total += grid.tau(k) * part;
    }

    // Jump contributions: ([d]_{k}, p_k) for interior nodes plus the first
    // interval value tested against p_0; the initial trace enters the
    // right-hand side of the scheme, not the form itself.
    DenseVector mass_p(ops.x_space->ndofs);
    for (std::size_t k = 0; k < m; ++k) {
        ops.mass_xx.multiply(p.coeffs[k], mass_p);
        if (k == 0) {
            total += dot(d.coeffs[0], mass_p);
        } else {
            total += dot(d.coeffs[k], mass_p) - dot(d.coeffs[k - 1], mass_p);
        }
    }
    return total;
}

} // namespace dampde
