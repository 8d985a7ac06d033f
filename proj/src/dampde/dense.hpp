#pragma once

#include <vector>

#include "dampde/vec.hpp"

namespace dampde {

// Small row-major dense matrix. Used for the brute-force direct solver that
// serves as an oracle for the sparse and time-stepping paths.
struct DenseMatrix {
    int nrows = 0;
    int ncols = 0;
    std::vector<double> data;  // row-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : nrows(r), ncols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * ncols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * ncols + j]; }
};

// Direct solve by LU with partial pivoting. Guards dimensions above 2000.
// Throws SingularMatrix when the best pivot falls below 1e-14 times the
// largest entry of A.
DenseVector dense_solve(const DenseMatrix& a, const DenseVector& b);

} // namespace dampde
