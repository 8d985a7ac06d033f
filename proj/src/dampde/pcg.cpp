#include "dampde/pcg.hpp"

#include "dampde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dampde {

void IcFactor::apply(const DenseVector& r, DenseVector& z) const {
    const std::size_t n = lower.nrows;
    static thread_local DenseVector y;
    y.assign(n, 0.0);
    // Forward solve L y = r. The diagonal is the last entry of each row.
    for (std::size_t i = 0; i < n; ++i) {
        double s = r[i];
        const std::size_t begin = lower.row_ptr[i];
        const std::size_t end = lower.row_ptr[i + 1];
        for (std::size_t k = begin; k + 1 < end; ++k) {
            s -= lower.vals[k] * y[lower.col_idx[k]];
        }
        y[i] = s / lower.vals[end - 1];
    }
    // Backward solve L^T z = y. The diagonal is the first entry of each row.
    z.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        const std::size_t begin = lower_t.row_ptr[ii];
        const std::size_t end = lower_t.row_ptr[ii + 1];
        for (std::size_t k = begin + 1; k < end; ++k) {
            s -= lower_t.vals[k] * z[lower_t.col_idx[k]];
        }
        z[ii] = s / lower_t.vals[begin];
    }
}

namespace {

// Attempts the factorization of A + shift * diag(A). Returns false when a
// nonpositive pivot shows up, which signals the caller to enlarge the shift.
bool try_ic0(const CsrMatrix& a, double shift, CsrMatrix& lower) {
    const std::size_t n = a.nrows;
    lower.nrows = n;
    lower.ncols = n;
    lower.row_ptr.assign(n + 1, 0);
    lower.col_idx.clear();
    lower.vals.clear();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const std::size_t j = a.col_idx[k];
            if (j > i) {
                continue;
            }
            double v = a.vals[k];
            if (j == i) {
                v += shift * v;
            }
            lower.col_idx.push_back(j);
            lower.vals.push_back(v);
        }
        lower.row_ptr[i + 1] = lower.col_idx.size();
    }

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row_begin = lower.row_ptr[i];
        const std::size_t row_end = lower.row_ptr[i + 1];
        if (row_begin == row_end || lower.col_idx[row_end - 1] != i) {
            return false;  // structurally missing diagonal
        }
        for (std::size_t k = row_begin; k < row_end; ++k) {
            const std::size_t j = lower.col_idx[k];
            // Dot product of rows i and j over columns < j.
            double s = lower.vals[k];
            std::size_t pi = row_begin;
            std::size_t pj = lower.row_ptr[j];
            const std::size_t pj_end = lower.row_ptr[j + 1];
            while (pi < k && pj + 1 < pj_end) {
                const std::size_t ci = lower.col_idx[pi];
                const std::size_t cj = lower.col_idx[pj];
                if (ci == cj) {
                    s -= lower.vals[pi] * lower.vals[pj];
                    ++pi;
                    ++pj;
                } else if (ci < cj) {
                    ++pi;
                } else {
                    ++pj;
                }
            }
            if (j == i) {
                if (s <= 0.0) {
                    return false;
                }
                lower.vals[k] = std::sqrt(s);
            } else {
                lower.vals[k] = s / lower.vals[lower.row_ptr[j + 1] - 1];
            }
        }
    }
    return true;
}

DenseVector inverse_diagonal(const CsrMatrix& a) {
    DenseVector d(a.nrows, 1.0);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        const double v = a.diag(i);
        if (v <= 0.0) {
            throw NumericalError("jacobi preconditioner requires a positive diagonal");
        }
        d[i] = 1.0 / v;
    }
    return d;
}

} // namespace

IcFactor ic0_factor(const CsrMatrix& a) {
    if (a.nrows != a.ncols) {
        throw ConfigError("ic0_factor requires a square matrix");
    }
    IcFactor f;
    double shift = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        if (try_ic0(a, shift, f.lower)) {
            f.lower_t = transpose(f.lower);
            return f;
        }
        shift = (shift == 0.0) ? 1e-3 : 2.0 * shift;
    }
    throw NumericalError("incomplete Cholesky failed even with a large diagonal shift");
}

PcgResult pcg_solve(const CsrMatrix& a, const DenseVector& b, const SolverConfig& cfg) {
    return pcg_solve_ex(a, b, cfg, nullptr, nullptr, nullptr);
}

PcgResult pcg_solve_ex(const CsrMatrix& a,
                       const DenseVector& b,
                       const SolverConfig& cfg,
                       const DenseVector* x0,
                       const IcFactor* ic,
                       const DenseVector* jacobi_inv_diag) {
    if (a.nrows != a.ncols || a.nrows != b.size()) {
        throw ConfigError("pcg_solve requires a square matrix matching the right-hand side");
    }
    const std::size_t n = b.size();
    PcgResult out;
    if (n == 0) {
        return out;
    }

    const double bnorm = nrm2(b);
    const double target = std::max(cfg.rel_tol * bnorm, cfg.abs_tol);
    const int budget =
        cfg.max_iter > 0 ? cfg.max_iter
                         : static_cast<int>(10.0 * std::sqrt(static_cast<double>(n)) + 100.0);

    // Local preconditioner storage when no prebuilt one was handed in.
    IcFactor local_ic;
    DenseVector local_diag;
    if (ic == nullptr && jacobi_inv_diag == nullptr) {
        if (cfg.preconditioner == Preconditioner::Ic0) {
            local_ic = ic0_factor(a);
            ic = &local_ic;
        } else if (cfg.preconditioner == Preconditioner::Jacobi) {
            local_diag = inverse_diagonal(a);
            jacobi_inv_diag = &local_diag;
        }
    }

    auto precondition = [&](const DenseVector& r, DenseVector& z) {
        if (ic != nullptr) {
            ic->apply(r, z);
        } else if (jacobi_inv_diag != nullptr) {
            z.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = (*jacobi_inv_diag)[i] * r[i];
            }
        } else {
            z = r;
        }
    };

    DenseVector x = (x0 != nullptr) ? *x0 : zeros(n);
    DenseVector r(n), q(n), z(n), p(n);
    a.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - r[i];
    }
    double rnorm = nrm2(r);
    if (rnorm <= target) {
        out.x = std::move(x);
        out.residual = rnorm;
        return out;
    }

    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    int iters = 0;
    while (iters < budget) {
        a.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            throw NumericalError("pcg_solve hit a nonpositive curvature direction; "
                                 "the matrix is not symmetric positive definite");
        }
        const double alpha = rz / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        ++iters;
        rnorm = nrm2(r);
        if (rnorm <= target) {
            // Confirm against the true residual before declaring victory; the
            // recurrence can drift after many iterations.
            a.multiply(x, q);
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = b[i] - q[i];
            }
            rnorm = nrm2(r);
            if (rnorm <= target) {
                out.x = std::move(x);
                out.iters = iters;
                out.residual = rnorm;
                return out;
            }
            // Restart the direction from the refreshed residual.
            precondition(r, z);
            p = z;
            rz = dot(r, z);
            continue;
        }
        precondition(r, z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    throw NonConvergence("pcg_solve exhausted its iteration budget before reaching tolerance",
                         iters, rnorm);
}

} // namespace dampde
