#include "dampde/state_solver.hpp"

#include "dampde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dampde {

double spatial_l2_norm(const Mesh& mesh, const SpatialFn& f, const QuadratureRule& quad) {
    double acc = 0.0;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tri = mesh.tris[t];
        const double jac = 2.0 * triangle_area(mesh, t);
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        for (const auto& q : quad.space_rule) {
            const double x = q.bary[0] * p0[0] + q.bary[1] * p1[0] + q.bary[2] * p2[0];
            const double y = q.bary[0] * p0[1] + q.bary[1] * p1[1] + q.bary[2] * p2[1];
            const double v = f(x, y);
            acc += v * v * q.weight * jac;
        }
    }
    return std::sqrt(std::max(0.0, acc));
}

const MonoCache::Entry& MonoCache::get(const OperatorSet& ops, double tau) {
    for (const auto& e : entries_) {
        if (e->tau == tau) {
            return *e;
        }
    }
    auto entry = std::make_unique<Entry>();
    entry->tau = tau;
    entry->matrix = ops.coupled_step_matrix(tau);
    entry->ic = ic0_factor(entry->matrix);
    entries_.push_back(std::move(entry));
    return *entries_.back();
}

namespace {

// vec = c * (vec_in + w) + scale * embed(sol)
void compose_vec(const OperatorSet& ops, const DenseVector& base_vec, double scale,
                 const DenseVector& sol, DenseVector& vec) {
    ops.embed(sol, vec);
    scal(scale, vec);
    axpy(1.0, base_vec, vec);
}

} // namespace

CoupledStepResult coupled_step(const OperatorSet& ops, const CoupledStepInput& in,
                               const StepControls& ctl, MonoCache& mono) {
    const std::size_t nx = ops.x_space->ndofs;
    const std::size_t nv = ops.v_space->ndofs;
    if (in.vec_in == nullptr || in.base_load == nullptr || in.vec_in->size() != nx ||
        in.base_load->size() != nv || (in.w != nullptr && in.w->size() != nx)) {
        throw ConfigError("coupled_step input sizes do not match the operator set");
    }
    if (!(in.tau > 0.0)) {
        throw ConfigError("coupled_step requires a positive interval length");
    }

    const double r = ops.params.beta / ops.params.delta;
    const double c = 1.0 / (1.0 + r * in.tau);
    const double q = r * in.tau * c;
    const double vec_scale = c * in.kappa_vec * in.tau;

    CoupledStepResult out;
    out.contraction_bound = q;

    // in_plus_w = vec_in + w, base_vec = c * in_plus_w.
    DenseVector in_plus_w = *in.vec_in;
    if (in.w != nullptr) {
        axpy(1.0, *in.w, in_plus_w);
    }
    DenseVector base_vec = in_plus_w;
    scal(c, base_vec);

    SolverConfig mono_cfg;
    mono_cfg.rel_tol = ops.pcg_rel_tol;
    mono_cfg.abs_tol = 0.0;

    auto solve_mono = [&](const DenseVector* warm) {
        const auto& entry = mono.get(ops, in.tau);
        DenseVector rhs;
        ops.mass_vx.multiply(in_plus_w, rhs);
        scal(c * in.kappa_sol, rhs);
        axpy(1.0, *in.base_load, rhs);
        PcgResult res = pcg_solve_ex(entry.matrix, rhs, mono_cfg, warm, &entry.ic, nullptr);
        out.pcg_iters += res.iters;
        out.solves += 1;
        return std::move(res.x);
    };

    // Full elliptic solve sol = A^{-1}(kappa_sol M_vx vec + base_load).
    auto solve_full = [&](const DenseVector& vec, const DenseVector* warm) {
        DenseVector rhs;
        ops.mass_vx.multiply(vec, rhs);
        scal(in.kappa_sol, rhs);
        axpy(1.0, *in.base_load, rhs);
        PcgResult res = ops.solve_a_ell(rhs, warm);
        out.pcg_iters += res.iters;
        out.solves += 1;
        return std::move(res.x);
    };

    if (ctl.mode == StepMode::Monolithic) {
        out.sol = solve_mono(in.sol_warm);
        // Update through the weak form and a mass solve instead of the nodal
        // shortcut; cross-checks M_xx embed(sol) == M_vx' sol.
        DenseVector rhs;
        ops.mass_xv.multiply(out.sol, rhs);
        scal(vec_scale, rhs);
        DenseVector mb;
        ops.mass_xx.multiply(base_vec, mb);
        axpy(1.0, mb, rhs);
        PcgResult res = ops.solve_mass_xx(rhs);
        out.pcg_iters += res.iters;
        out.vec = std::move(res.x);
        return out;
    }

    // Fixed-point path. Pick the start value: the natural one is vec_in; for
    // strong contraction-resisting steps (large (beta/delta) tau) a monolithic
    // presolve lands nearly on the fixed point and the same increment loop
    // polishes it.
    DenseVector vec;
    DenseVector sol;
    if (q > ctl.mono_start_threshold && nv > 0) {
        DenseVector sol0 = solve_mono(in.sol_warm);
        DenseVector vec0;
        compose_vec(ops, base_vec, vec_scale, sol0, vec0);
        sol = solve_full(vec0, &sol0);
        vec = std::move(vec0);
    } else {
        sol = solve_full(*in.vec_in, in.sol_warm);
        vec = *in.vec_in;
    }

    // One application of the map from (vec, sol = S(vec)).
    DenseVector vec_next;
    compose_vec(ops, base_vec, vec_scale, sol, vec_next);
    DenseVector dvec = vec_next;
    axpy(-1.0, vec, dvec);
    vec = std::move(vec_next);
    double dnorm = ops.norm_x(dvec);

    const double ratio_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ops.norm_x(vec));

    DenseVector dsol;
    DenseVector warm;
    double prev_ratio = q;
    int iter = 0;
    while (dnorm > ctl.fp_tol * std::max(1.0, ops.norm_x(vec))) {
        if (iter >= ctl.fp_cap) {
            throw NonConvergence("coupled step fixed point exceeded its iteration cap", iter,
                                 dnorm);
        }
        ++iter;
        // dsol tracks the solution increment for the vec increment; warm
        // start by scaling the previous increment with the observed ratio.
        DenseVector rhs;
        ops.mass_vx.multiply(dvec, rhs);
        scal(in.kappa_sol, rhs);
        const DenseVector* warm_ptr = nullptr;
        if (!dsol.empty()) {
            warm = dsol;
            scal(prev_ratio, warm);
            warm_ptr = &warm;
        }
        PcgResult res = ops.solve_a_ell(rhs, warm_ptr);
        out.pcg_iters += res.iters;
        out.solves += 1;
        dsol = std::move(res.x);
        axpy(1.0, dsol, sol);

        DenseVector dvec_next;
        ops.embed(dsol, dvec_next);
        scal(vec_scale, dvec_next);
        axpy(1.0, dvec_next, vec);
        const double dnorm_next = ops.norm_x(dvec_next);
        if (dnorm > ratio_floor) {
            const double ratio = dnorm_next / dnorm;
            out.max_ratio_excess = std::max(out.max_ratio_excess, ratio - q);
            prev_ratio = ratio;
        }
        dvec = std::move(dvec_next);
        dnorm = dnorm_next;
    }

    // Refresh the elliptic variable against the final vec so the elliptic
    // equation holds to solver accuracy, not just to fp_tol.
    if (dnorm > 0.0 && nv > 0) {
        DenseVector rhs;
        ops.mass_vx.multiply(dvec, rhs);
        scal(in.kappa_sol, rhs);
        const DenseVector* warm_ptr = nullptr;
        if (!dsol.empty()) {
            warm = dsol;
            scal(prev_ratio, warm);
            warm_ptr = &warm;
        }
        PcgResult res = ops.solve_a_ell(rhs, warm_ptr);
        out.pcg_iters += res.iters;
        out.solves += 1;
        axpy(1.0, res.x, sol);
    }

    out.sol = std::move(sol);
    out.vec = std::move(vec);
    return out;
}

DenseVector solve_elliptic(const OperatorSet& ops, const DenseVector& d_coeffs,
                           const DenseVector& load_l, SolveStats* stats) {
    if (d_coeffs.size() != ops.x_space->ndofs || load_l.size() != ops.v_space->ndofs) {
        throw ConfigError("solve_elliptic input sizes do not match the operator set");
    }
    DenseVector rhs;
    ops.mass_vx.multiply(d_coeffs, rhs);
    scal(ops.params.beta, rhs);
    axpy(1.0, load_l, rhs);
    PcgResult res = ops.solve_a_ell(rhs);
    if (stats != nullptr) {
        stats->pcg_iters += res.iters;
    }
    return std::move(res.x);
}

StepResult step_interval(const OperatorSet& ops, const TimeGrid& grid, std::size_t interval,
                         const DenseVector& d_prev, const DenseVector& load_l,
                         const DenseVector* f_load, const StepControls& ctl) {
    if (interval >= grid.intervals()) {
        throw ConfigError("time interval index out of range");
    }
    long long extra_iters = 0;
    DenseVector w;
    const DenseVector* wp = nullptr;
    if (f_load != nullptr && !f_load->empty()) {
        if (f_load->size() != ops.x_space->ndofs) {
            throw ConfigError("f load size does not match the free space");
        }
        PcgResult res = ops.solve_mass_xx(*f_load);
        extra_iters = res.iters;
        w = std::move(res.x);
        wp = &w;
    }
    MonoCache mono;
    CoupledStepInput in;
    in.tau = grid.tau(interval);
    in.kappa_sol = ops.params.beta;
    in.kappa_vec = ops.params.beta / ops.params.delta;
    in.vec_in = &d_prev;
    in.base_load = &load_l;
    in.w = wp;
    CoupledStepResult cs = coupled_step(ops, in, ctl, mono);

    StepResult out;
    out.phi = std::move(cs.sol);
    out.d = std::move(cs.vec);
    out.contraction_bound = cs.contraction_bound;
    out.max_ratio_excess = cs.max_ratio_excess;
    out.pcg_iters = cs.pcg_iters + extra_iters;
    out.solves = cs.solves;
    return out;
}

namespace {

// Evaluator of fn at the right endpoint of interval k as a spatial function.
SpatialFn endpoint_fn(const TimeGrid& grid, const TimeFunction& fn, std::size_t k) {
    const double t1 = grid.breakpoints[k + 1];
    return [&fn, t1](double x, double y) { return fn.evaluate(t1, x, y); };
}

void check_field_space(const SpaceTimeField& field, const TimeGrid& grid, SpaceKind kind,
                       std::size_t ndofs, const char* what) {
    validate_field(field);
    if (field.space->kind != kind || field.space->ndofs != ndofs) {
        throw ConfigError(std::string(what) + " does not live on the expected space of this mesh");
    }
    if (!same_grid(field.grid, grid)) {
        throw ConfigError(std::string(what) + " time grid does not match the solver grid");
    }
}

} // namespace

VDataProvider::VDataProvider(const OperatorSet& ops, const TimeGrid& grid, const TimeFunction* fn,
                             const SpaceTimeField* field, bool combine)
    : ops_(ops), grid_(grid), fn_(fn), field_(field), combine_(combine) {
    if (combine_) {
        if (field_ == nullptr) {
            throw ConfigError("combined data requires a discrete field");
        }
    } else if (fn_ != nullptr && field_ != nullptr) {
        throw ConfigError("data may be analytic or discrete, not both");
    }
    if (field_ != nullptr) {
        check_field_space(*field_, grid, SpaceKind::DirichletP1, ops.v_space->ndofs,
                          "Dirichlet-space data field");
    }
    if (fn_ != nullptr && fn_->separable()) {
        separable_load_ = assemble_load(*ops.mesh, *ops.v_space, fn_->spatial);
        separable_norm_ = spatial_l2_norm(*ops.mesh, fn_->spatial);
        separable_vals_ = endpoint_scalars(grid, fn_->temporal);
    }
}

void VDataProvider::get(std::size_t interval, DenseVector& load, double* rep_norm) const {
    const double sign = combine_ ? -1.0 : 1.0;
    if (field_ != nullptr) {
        ops_.mass_vv.multiply(field_->coeffs[interval], load);
    } else {
        load.assign(ops_.v_space->ndofs, 0.0);
    }
    if (fn_ != nullptr) {
        if (fn_->separable()) {
            if (combine_) {
                axpy(sign * separable_vals_[interval], separable_load_, load);
            } else {
                load = separable_load_;
                scal(separable_vals_[interval], load);
            }
        } else {
            DenseVector part = endpoint_load(*ops_.mesh, *ops_.v_space, grid_, *fn_, interval);
            if (combine_) {
                axpy(sign, part, load);
            } else {
                load = std::move(part);
            }
        }
    }
    if (rep_norm == nullptr) {
        return;
    }
    if (combine_) {
        if (fn_ == nullptr) {
            *rep_norm = ops_.norm_v(field_->coeffs[interval]);
        } else if (fn_->separable()) {
            const double a = separable_vals_[interval];
            const SpatialFn& s = fn_->spatial;
            *rep_norm = l2_error_vs_function(
                *ops_.mesh, *ops_.v_space, field_->coeffs[interval],
                [a, &s](double x, double y) { return a * s(x, y); });
        } else {
            *rep_norm = l2_error_vs_function(*ops_.mesh, *ops_.v_space, field_->coeffs[interval],
                                             endpoint_fn(grid_, *fn_, interval));
        }
    } else if (field_ != nullptr) {
        *rep_norm = ops_.norm_v(field_->coeffs[interval]);
    } else if (fn_ == nullptr) {
        *rep_norm = 0.0;
    } else if (fn_->separable()) {
        *rep_norm = std::abs(separable_vals_[interval]) * separable_norm_;
    } else {
        *rep_norm = spatial_l2_norm(*ops_.mesh, endpoint_fn(grid_, *fn_, interval));
    }
}

XDataProvider::XDataProvider(const OperatorSet& ops, const TimeGrid& grid, const TimeFunction* fn,
                             const SpaceTimeField* field, SolveStats* stats, bool combine)
    : ops_(ops), grid_(grid), fn_(fn), field_(field), stats_(stats), combine_(combine) {
    if (combine_) {
        if (field_ == nullptr) {
            throw ConfigError("combined data requires a discrete field");
        }
    } else if (fn_ != nullptr && field_ != nullptr) {
        throw ConfigError("data may be analytic or discrete, not both");
    }
    if (field_ != nullptr) {
        check_field_space(*field_, grid, SpaceKind::FreeP1, ops.x_space->ndofs,
                          "free-space data field");
    }
    if (fn_ != nullptr && fn_->separable()) {
        const DenseVector load = assemble_load(*ops.mesh, *ops.x_space, fn_->spatial);
        PcgResult res = ops.solve_mass_xx(load);
        if (stats_ != nullptr) {
            stats_->pcg_iters += res.iters;
        }
        separable_w_ = std::move(res.x);
        separable_norm_ = spatial_l2_norm(*ops.mesh, fn_->spatial);
        separable_vals_ = endpoint_scalars(grid, fn_->temporal);
    }
}

void XDataProvider::get(std::size_t interval, DenseVector& w, double* int_norm) const {
    const double tau = grid_.tau(interval);
    const double sign = combine_ ? -1.0 : 1.0;
    if (field_ != nullptr) {
        w = field_->coeffs[interval];
        scal(tau, w);
    } else {
        w.assign(ops_.x_space->ndofs, 0.0);
    }
    if (fn_ != nullptr) {
        if (fn_->separable()) {
            if (combine_) {
                axpy(sign * tau * separable_vals_[interval], separable_w_, w);
            } else {
                w = separable_w_;
                scal(tau * separable_vals_[interval], w);
            }
        } else {
            DenseVector load = endpoint_load(*ops_.mesh, *ops_.x_space, grid_, *fn_, interval);
            PcgResult res = ops_.solve_mass_xx(load);
            if (stats_ != nullptr) {
                stats_->pcg_iters += res.iters;
            }
            if (combine_) {
                axpy(sign * tau, res.x, w);
            } else {
                w = std::move(res.x);
                scal(tau, w);
            }
        }
    }
    if (int_norm == nullptr) {
        return;
    }
    if (combine_) {
        *int_norm = ops_.norm_x(w);
    } else if (field_ != nullptr) {
        *int_norm = tau * ops_.norm_x(field_->coeffs[interval]);
    } else if (fn_ == nullptr) {
        *int_norm = 0.0;
    } else if (fn_->separable()) {
        *int_norm = tau * std::abs(separable_vals_[interval]) * separable_norm_;
    } else {
        *int_norm = tau * spatial_l2_norm(*ops_.mesh, endpoint_fn(grid_, *fn_, interval));
    }
}

ForwardResult solve_state(const OperatorSet& ops, const TimeGrid& grid, const ForwardInput& in,
                          const StepControls& ctl) {
    if (in.d0 != nullptr && in.d0_coeffs != nullptr) {
        throw ConfigError("initial value may be analytic or discrete, not both");
    }
    ForwardResult out;
    SolveStats& stats = out.stats;
    VDataProvider l_prov(ops, grid, in.l, in.l_field);
    XDataProvider f_prov(ops, grid, in.f, in.f_field, &stats);

    DenseVector d0;
    if (in.d0_coeffs != nullptr) {
        if (in.d0_coeffs->size() != ops.x_space->ndofs) {
            throw ConfigError("initial value size does not match the free space");
        }
        d0 = *in.d0_coeffs;
    } else if (in.d0 != nullptr) {
        const TimeFunction& fn = *in.d0;
        const DenseVector load = assemble_load(
            *ops.mesh, *ops.x_space, [&fn](double x, double y) { return fn.evaluate(0.0, x, y); });
        PcgResult res = ops.solve_mass_xx(load);
        stats.pcg_iters += res.iters;
        d0 = std::move(res.x);
    } else {
        d0 = zeros(ops.x_space->ndofs);
    }

    const std::size_t m = grid.intervals();
    out.phi = zero_field(grid, ops.v_space);
    out.d = zero_field(grid, ops.x_space);
    out.d.initial_trace = std::move(d0);

    StabilityReport& rep = out.stability;
    rep.slack.assign(m, 0.0);

    MonoCache mono;
    const double delta = ops.params.delta;
    const DenseVector* d_prev = &*out.d.initial_trace;
    double prev_norm = ops.norm_x(*d_prev);
    const DenseVector* warm = nullptr;
    DenseVector load;
    DenseVector w;
    DenseVector jump;

    for (std::size_t k = 0; k < m; ++k) {
        double l_norm = 0.0;
        l_prov.get(k, load, &l_norm);
        double f_norm = 0.0;
        const DenseVector* wp = nullptr;
        if (f_prov.present()) {
            f_prov.get(k, w, &f_norm);
            wp = &w;
        }

        CoupledStepInput cin;
        cin.tau = grid.tau(k);
        cin.kappa_sol = ops.params.beta;
        cin.kappa_vec = ops.params.beta / delta;
        cin.vec_in = d_prev;
        cin.base_load = &load;
        cin.w = wp;
        cin.sol_warm = warm;
        CoupledStepResult cs = coupled_step(ops, cin, ctl, mono);
        stats.pcg_iters += cs.pcg_iters;
        stats.coupled_solves += cs.solves;
        stats.max_ratio_excess = std::max(stats.max_ratio_excess, cs.max_ratio_excess);

        const double d_norm = ops.norm_x(cs.vec);
        const double phi_norm = ops.norm_v(cs.sol);
        rep.max_d_norm = std::max(rep.max_d_norm, d_norm);
        rep.max_phi_norm = std::max(rep.max_phi_norm, phi_norm);
        rep.slack[k] = prev_norm + (cin.tau / delta) * l_norm + f_norm - d_norm;
        rep.min_slack = std::min(rep.min_slack, rep.slack[k]);
        jump = cs.vec;
        axpy(-1.0, *d_prev, jump);
        const double jn = ops.norm_x(jump);
        rep.jump_sum += jn * jn / cin.tau;

        out.phi.coeffs[k] = std::move(cs.sol);
        out.d.coeffs[k] = std::move(cs.vec);
        warm = &out.phi.coeffs[k];
        d_prev = &out.d.coeffs[k];
        prev_norm = d_norm;
    }
    return out;
}

StabilityReport stability_report(const OperatorSet& ops, const SpaceTimeField& phi,
                                 const SpaceTimeField& d, const TimeFunction* l,
                                 const SpaceTimeField* l_field, const TimeFunction* f,
                                 const SpaceTimeField* f_field) {
    validate_field(phi);
    validate_field(d);
    if (!same_grid(phi.grid, d.grid)) {
        throw ConfigError("state fields live on different time grids");
    }
    const TimeGrid& grid = d.grid;
    VDataProvider l_prov(ops, grid, l, l_field);
    XDataProvider f_prov(ops, grid, f, f_field, nullptr);

    StabilityReport rep;
    const std::size_t m = grid.intervals();
    rep.slack.assign(m, 0.0);
    DenseVector prev =
        d.initial_trace ? *d.initial_trace : zeros(ops.x_space->ndofs);
    double prev_norm = ops.norm_x(prev);
    DenseVector load;
    DenseVector w;
    DenseVector jump;
    for (std::size_t k = 0; k < m; ++k) {
        double l_norm = 0.0;
        l_prov.get(k, load, &l_norm);
        double f_norm = 0.0;
        if (f_prov.present()) {
            f_prov.get(k, w, &f_norm);
        }
        const double d_norm = ops.norm_x(d.coeffs[k]);
        rep.max_d_norm = std::max(rep.max_d_norm, d_norm);
        rep.max_phi_norm = std::max(rep.max_phi_norm, ops.norm_v(phi.coeffs[k]));
        rep.slack[k] = prev_norm + (grid.tau(k) / ops.params.delta) * l_norm + f_norm - d_norm;
        rep.min_slack = std::min(rep.min_slack, rep.slack[k]);
        jump = d.coeffs[k];
        axpy(-1.0, prev, jump);
        const double jn = ops.norm_x(jump);
        rep.jump_sum += jn * jn / grid.tau(k);
        prev = d.coeffs[k];
        prev_norm = d_norm;
    }
    return rep;
}

} // namespace dampde
