#include "doctest.h"

#include <cmath>
#include <random>

#include "dampde/csr.hpp"
#include "dampde/dense.hpp"
#include "dampde/errors.hpp"
#include "dampde/mesh.hpp"
#include "dampde/assemble.hpp"
#include "dampde/operators.hpp"
#include "dampde/pcg.hpp"
#include "dampde/space.hpp"
#include "dampde/vec.hpp"

using namespace dampde;

namespace {

CsrMatrix csr_from_dense(const DenseMatrix& a) {
    TripletBuilder tb(static_cast<std::size_t>(a.nrows), static_cast<std::size_t>(a.ncols));
    for (int i = 0; i < a.nrows; ++i) {
        for (int j = 0; j < a.ncols; ++j) {
            if (a(i, j) != 0.0) {
                tb.add(static_cast<std::size_t>(i), static_cast<std::size_t>(j), a(i, j));
            }
        }
    }
    return tb.build();
}

DenseMatrix random_spd(int dim, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseMatrix r(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            r(i, j) = dist(rng);
        }
    }
    DenseMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) {
                s += r(k, i) * r(k, j);
            }
            a(i, j) = s + (i == j ? static_cast<double>(dim) : 0.0);
        }
    }
    return a;
}

double residual_norm(const CsrMatrix& a, const DenseVector& x, const DenseVector& b) {
    DenseVector r = a.multiply(x);
    axpy(-1.0, b, r);
    return nrm2(r);
}

} // namespace

TEST_CASE("csr construction and products") {
    TripletBuilder tb(2, 3);
    tb.add(0, 2, 1.0);
    tb.add(0, 0, 2.0);
    tb.add(1, 1, 3.0);
    tb.add(0, 2, 0.5);  // duplicate merges
    const CsrMatrix a = tb.build();
    CHECK(a.nrows == 2);
    CHECK(a.ncols == 3);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        for (std::size_t k = a.row_ptr[i] + 1; k < a.row_ptr[i + 1]; ++k) {
            CHECK(a.col_idx[k - 1] < a.col_idx[k]);
        }
    }
    const DenseVector y = a.multiply(DenseVector{1.0, 2.0, 3.0});
    CHECK(y[0] == doctest::Approx(2.0 + 4.5).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(6.0).epsilon(1e-15));

    const CsrMatrix at = transpose(a);
    CHECK(at.nrows == 3);
    CHECK(at.ncols == 2);
    const DenseVector yt = at.multiply(DenseVector{1.0, 1.0});
    CHECK(yt[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(yt[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(yt[2] == doctest::Approx(1.5).epsilon(1e-15));

    CHECK(a.diag(0) == 2.0);
    CHECK(a.diag(1) == 3.0);
}

TEST_CASE("same-pattern matrix combination") {
    TripletBuilder ta(2, 2);
    ta.add(0, 0, 1.0);
    ta.add(1, 1, 2.0);
    ta.add(0, 1, 3.0);
    TripletBuilder tb(2, 2);
    tb.add(0, 0, 4.0);
    tb.add(1, 1, 5.0);
    tb.add(0, 1, 6.0);
    const CsrMatrix c = add_same_pattern(2.0, ta.build(), -1.0, tb.build());
    CHECK(c.diag(0) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(c.diag(1) == doctest::Approx(-1.0).epsilon(1e-15));

    TripletBuilder tc(2, 2);
    tc.add(0, 0, 1.0);
    tc.add(1, 0, 1.0);
    CHECK_THROWS_AS(add_same_pattern(1.0, ta.build(), 1.0, tc.build()), ConfigError);
}

TEST_CASE("dense solver") {
    DenseMatrix eye(3, 3);
    for (int i = 0; i < 3; ++i) {
        eye(i, i) = 1.0;
    }
    const DenseVector b{1.0, -2.0, 3.0};
    const DenseVector x = dense_solve(eye, b);
    for (int i = 0; i < 3; ++i) {
        CHECK(x[static_cast<std::size_t>(i)] ==
              doctest::Approx(b[static_cast<std::size_t>(i)]).epsilon(1e-14));
    }

    DenseMatrix perm(3, 3);
    perm(0, 2) = 1.0;
    perm(1, 0) = 1.0;
    perm(2, 1) = 1.0;
    const DenseVector px = dense_solve(perm, b);
    CHECK(px[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(px[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(px[1] == doctest::Approx(3.0).epsilon(1e-14));

    std::mt19937 rng(5);
    const DenseMatrix a = random_spd(50, rng);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector rhs(50);
    for (double& e : rhs) {
        e = dist(rng);
    }
    const DenseVector sol = dense_solve(a, rhs);
    DenseVector res(50, 0.0);
    for (int i = 0; i < 50; ++i) {
        double s = 0.0;
        for (int j = 0; j < 50; ++j) {
            s += a(i, j) * sol[static_cast<std::size_t>(j)];
        }
        res[static_cast<std::size_t>(i)] = s - rhs[static_cast<std::size_t>(i)];
    }
    CHECK(nrm2(res) / nrm2(rhs) <= 1e-10);

    DenseMatrix singular(2, 2);
    singular(0, 0) = 1.0;
    singular(0, 1) = 1.0;
    singular(1, 0) = 1.0;
    singular(1, 1) = 1.0;
    CHECK_THROWS_AS(dense_solve(singular, DenseVector{1.0, 2.0}), SingularMatrix);
}

TEST_CASE("pcg on small systems") {
    TripletBuilder td(3, 3);
    td.add(0, 0, 2.0);
    td.add(1, 1, 4.0);
    td.add(2, 2, 8.0);
    const CsrMatrix diag = td.build();
    const PcgResult dr = pcg_solve(diag, DenseVector{2.0, 4.0, 8.0}, SolverConfig{});
    for (double e : dr.x) {
        CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    }

    const PcgResult zr = pcg_solve(diag, DenseVector{0.0, 0.0, 0.0}, SolverConfig{});
    CHECK(zr.iters == 0);
    for (double e : zr.x) {
        CHECK(e == 0.0);
    }

    DenseMatrix a3(3, 3);
    a3(0, 0) = 4.0;
    a3(0, 1) = 1.0;
    a3(1, 0) = 1.0;
    a3(1, 1) = 3.0;
    a3(1, 2) = 1.0;
    a3(2, 1) = 1.0;
    a3(2, 2) = 2.0;
    const DenseVector b3{1.0, 2.0, 3.0};
    const DenseVector dense_x = dense_solve(a3, b3);
    const PcgResult pg = pcg_solve(csr_from_dense(a3), b3, SolverConfig{});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(pg.x[i] - dense_x[i]) <= 1e-10);
    }
}

TEST_CASE("pcg on random spd and nonconvergence") {
    std::mt19937 rng(17);
    const DenseMatrix a = random_spd(50, rng);
    const CsrMatrix acsr = csr_from_dense(a);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector b(50);
    for (double& e : b) {
        e = dist(rng);
    }
    SolverConfig cfg;
    cfg.rel_tol = 1e-12;
    const PcgResult r = pcg_solve(acsr, b, cfg);
    CHECK(residual_norm(acsr, r.x, b) <= 1e-10);

    SolverConfig tight;
    tight.max_iter = 1;
    tight.rel_tol = 1e-15;
    tight.abs_tol = 0.0;
    CHECK_THROWS_AS(pcg_solve(acsr, b, tight), NonConvergence);
}

TEST_CASE("pcg matches dense on assembled elliptic systems") {
    const auto ops = make_operator_set(8, ModelParams{});
    DenseMatrix dense(static_cast<int>(ops->a_ell.nrows), static_cast<int>(ops->a_ell.ncols));
    for (std::size_t i = 0; i < ops->a_ell.nrows; ++i) {
        for (std::size_t k = ops->a_ell.row_ptr[i]; k < ops->a_ell.row_ptr[i + 1]; ++k) {
            dense(static_cast<int>(i), static_cast<int>(ops->a_ell.col_idx[k])) =
                ops->a_ell.vals[k];
        }
    }
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector b(ops->a_ell.nrows);
    for (double& e : b) {
        e = dist(rng);
    }
    const DenseVector xd = dense_solve(dense, b);
    const PcgResult xp = ops->solve_a_ell(b);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        diff = std::max(diff, std::abs(xd[i] - xp.x[i]));
        scale = std::max(scale, std::abs(xd[i]));
    }
    CHECK(diff / scale <= 1e-9);

    // The Jacobi preconditioner never needs more iterations than none.
    long long plain = 0;
    long long jacobi = 0;
    for (int rep = 0; rep < 10; ++rep) {
        for (double& e : b) {
            e = dist(rng);
        }
        SolverConfig none;
        none.preconditioner = Preconditioner::None;
        SolverConfig jac;
        jac.preconditioner = Preconditioner::Jacobi;
        plain += pcg_solve(ops->a_ell, b, none).iters;
        jacobi += pcg_solve(ops->a_ell, b, jac).iters;
    }
    CHECK(jacobi <= plain);

    // Incomplete Cholesky agrees with Jacobi solves.
    SolverConfig ic;
    ic.preconditioner = Preconditioner::Ic0;
    const PcgResult xi = pcg_solve(ops->a_ell, b, ic);
    const PcgResult xj = pcg_solve(ops->a_ell, b, SolverConfig{});
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(std::abs(xi.x[i] - xj.x[i]) <= 1e-10);
    }
}
