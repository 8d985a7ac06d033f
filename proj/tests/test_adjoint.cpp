#include "doctest.h"

#include <cmath>
#include <random>

#include "dampde/adjoint_solver.hpp"
#include "dampde/operators.hpp"
#include "dampde/state_solver.hpp"
#include "dampde/verify.hpp"

using namespace dampde;

namespace {

double max_abs(const DenseVector& v) {
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

double max_abs_diff(const DenseVector& a, const DenseVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

double inner_v(const OperatorSet& ops, const SpaceTimeField& a, const SpaceTimeField& b) {
    double acc = 0.0;
    DenseVector tmp(ops.v_space->ndofs);
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
        ops.mass_vv.multiply(a.coeffs[k], tmp);
        acc += a.grid.tau(k) * dot(tmp, b.coeffs[k]);
    }
    return acc;
}

double inner_x(const OperatorSet& ops, const SpaceTimeField& a, const SpaceTimeField& b) {
    double acc = 0.0;
    DenseVector tmp(ops.x_space->ndofs);
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
        ops.mass_xx.multiply(a.coeffs[k], tmp);
        acc += a.grid.tau(k) * dot(tmp, b.coeffs[k]);
    }
    return acc;
}

} // namespace

TEST_CASE("adjoint of zero data is zero") {
    const auto ops = make_operator_set(3, ModelParams{});
    const TimeGrid grid = uniform_time_grid(1.0, 3);
    const AdjointResult res = solve_adjoint(*ops, grid, AdjointInput{});
    for (const auto& c : res.z.coeffs) {
        CHECK(max_abs(c) == 0.0);
    }
    for (const auto& c : res.p.coeffs) {
        CHECK(max_abs(c) == 0.0);
    }
}

TEST_CASE("backward sweep agrees with the dense block oracle") {
    std::mt19937 rng(83);
    const auto ops = make_operator_set(2, ModelParams{});
    const TimeGrid grid = make_time_grid({0.0, 0.3, 1.0});
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
    for (std::size_t k = 0; k < grid.intervals(); ++k) {
        CHECK(max_abs_diff(got.z.coeffs[k], ref.elliptic.coeffs[k]) <=
              1e-10 * std::max(1.0, max_abs(ref.elliptic.coeffs[k])));
        CHECK(max_abs_diff(got.p.coeffs[k], ref.evolving.coeffs[k]) <=
              1e-10 * std::max(1.0, max_abs(ref.evolving.coeffs[k])));
    }
}

TEST_CASE("backward sweep is the forward sweep reversed in time") {
    const ModelParams params;
    const double delta = params.delta;
    const auto ops = make_operator_set(4, params);
    const TimeGrid grid = make_time_grid({0.0, 0.2, 0.5, 0.7, 1.0});
    const TimeGrid reversed = reversed_time_grid(grid);

    const TimeFunction g1 =
        make_time_function([](double, double x, double y) { return x + 2.0 * y; });
    const TimeFunction g2 =
        make_time_function([](double, double x, double y) { return 1.0 + x * y; });
    const TimeFunction f_scaled = make_time_function(
        [delta](double, double x, double y) { return (1.0 + x * y) / delta; });
    std::mt19937 rng(97);
    const DenseVector pT = random_vector(ops->x_space->ndofs, rng);
    DenseVector d0 = pT;
    scal(1.0 / delta, d0);

    AdjointInput ain;
    ain.g1 = &g1;
    ain.g2 = &g2;
    ain.terminal = &pT;
    StepControls ctl;
    ctl.fp_tol = 1e-13;
    const AdjointResult adj = solve_adjoint(*ops, grid, ain, ctl);

    ForwardInput fin;
    fin.l = &g1;
    fin.f = &f_scaled;
    fin.d0_coeffs = &d0;
    const ForwardResult fwd = solve_state(*ops, reversed, fin, ctl);

    const std::size_t m = grid.intervals();
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = m - 1 - k;
        CHECK(max_abs_diff(adj.z.coeffs[k], fwd.phi.coeffs[j]) <= 1e-10);
        DenseVector scaled = fwd.d.coeffs[j];
        scal(delta, scaled);
        CHECK(max_abs_diff(adj.p.coeffs[k], scaled) <= 1e-10);
    }
}

TEST_CASE("forward and adjoint solves are adjoint to each other") {
    std::mt19937 rng(103);
    const auto ops = make_operator_set(3, ModelParams{});
    const TimeGrid grid = make_time_grid({0.0, 0.4, 0.6, 1.0});
    for (int rep = 0; rep < 3; ++rep) {
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
        const double lhs = inner_v(*ops, g1, fwd.phi) + inner_x(*ops, g2, fwd.d);
        const double rhs = inner_v(*ops, dl, adj.z);
        CHECK(std::abs(lhs - rhs) <=
              1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
}

TEST_CASE("space-time form vanishes on zero fields") {
    const auto ops = make_operator_set(2, ModelParams{});
    const TimeGrid grid = uniform_time_grid(1.0, 2);
    const SpaceTimeField zv = zero_field(grid, ops->v_space);
    const SpaceTimeField zx = zero_field(grid, ops->x_space);
    CHECK(bilinear_form_apply(*ops, zv, zx, zv, zx) == 0.0);
}

TEST_CASE("space-time form reproduces the forward data terms") {
    std::mt19937 rng(107);
    const auto ops = make_operator_set(3, ModelParams{});
    const TimeGrid grid = make_time_grid({0.0, 0.3, 0.55, 1.0});
    const SpaceTimeField l = random_field(grid, ops->v_space, rng);
    const SpaceTimeField f = random_field(grid, ops->x_space, rng);
    const DenseVector d0 = random_vector(ops->x_space->ndofs, rng);
    ForwardInput fin;
    fin.l_field = &l;
    fin.f_field = &f;
    fin.d0_coeffs = &d0;
    StepControls ctl;
    ctl.fp_tol = 1e-14;
    const ForwardResult fwd = solve_state(*ops, grid, fin, ctl);

    for (int rep = 0; rep < 3; ++rep) {
        const SpaceTimeField z = random_field(grid, ops->v_space, rng);
        const SpaceTimeField p = random_field(grid, ops->x_space, rng);
        const double b = bilinear_form_apply(*ops, fwd.phi, fwd.d, z, p);
        const double expected = inner_v(*ops, l, z) + inner_x(*ops, f, p) +
                                dot(ops->mass_xx.multiply(d0), p.coeffs[0]);
        CHECK(std::abs(b - expected) <=
              1e-9 * std::max({1.0, std::abs(b), std::abs(expected)}));
    }
}

TEST_CASE("space-time form reproduces the adjoint data terms") {
    std::mt19937 rng(109);
    const auto ops = make_operator_set(3, ModelParams{});
    const TimeGrid grid = make_time_grid({0.0, 0.25, 0.8, 1.0});
    const SpaceTimeField g1 = random_field(grid, ops->v_space, rng);
    const SpaceTimeField g2 = random_field(grid, ops->x_space, rng);
    const DenseVector pT = random_vector(ops->x_space->ndofs, rng);
    AdjointInput ain;
    ain.g1_field = &g1;
    ain.g2_field = &g2;
    ain.terminal = &pT;
    StepControls ctl;
    ctl.fp_tol = 1e-14;
    const AdjointResult adj = solve_adjoint(*ops, grid, ain, ctl);

    for (int rep = 0; rep < 3; ++rep) {
        const SpaceTimeField psi = random_field(grid, ops->v_space, rng);
        const SpaceTimeField lam = random_field(grid, ops->x_space, rng);
        const double b = bilinear_form_apply(*ops, psi, lam, adj.z, adj.p);
        const double expected = inner_v(*ops, g1, psi) + inner_x(*ops, g2, lam) +
                                dot(ops->mass_xx.multiply(pT), lam.coeffs.back());
        CHECK(std::abs(b - expected) <=
              1e-9 * std::max({1.0, std::abs(b), std::abs(expected)}));
    }
}

TEST_CASE("backward stability diagnostics match their definition") {
    std::mt19937 rng(113);
    const ModelParams params;
    const auto ops = make_operator_set(3, params);
    const TimeGrid grid = make_time_grid({0.0, 0.5, 0.75, 1.0});
    const SpaceTimeField g2 = random_field(grid, ops->x_space, rng);
    const DenseVector pT = random_vector(ops->x_space->ndofs, rng);
    AdjointInput in;
    in.g2_field = &g2;
    in.terminal = &pT;
    const AdjointResult res = solve_adjoint(*ops, grid, in);

    const std::size_t m = grid.intervals();
    double jump_sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double tau = grid.tau(k);
        const DenseVector& next = k + 1 < m ? res.p.coeffs[k + 1] : pT;
        DenseVector w = g2.coeffs[k];
        scal(tau, w);
        const double slack = ops->norm_x(next) + tau * params.beta * ops->norm_v(res.z.coeffs[k]) +
                             ops->norm_x(w) - ops->norm_x(res.p.coeffs[k]);
        CHECK(res.stability.slack[k] == doctest::Approx(slack).epsilon(1e-10));
        CHECK(res.stability.slack[k] >= -1e-10);
        DenseVector jump = next;
        axpy(-1.0, res.p.coeffs[k], jump);
        const double jn = ops->norm_x(jump);
        jump_sum += jn * jn / tau;
    }
    CHECK(res.stability.jump_sum == doctest::Approx(jump_sum).epsilon(1e-10));
}
