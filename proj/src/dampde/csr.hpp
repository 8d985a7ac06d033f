#pragma once

#include <cstddef>
#include <vector>

#include "dampde/vec.hpp"

namespace dampde {

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row; duplicate entries are merged at build time.
struct CsrMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<std::size_t> row_ptr;  // size nrows + 1
    std::vector<std::size_t> col_idx;
    std::vector<double> vals;

    // y = A x
    void multiply(const DenseVector& x, DenseVector& y) const;
    DenseVector multiply(const DenseVector& x) const;

    // Diagonal entry of row i, 0 when absent from the pattern.
    double diag(std::size_t i) const;
};

// Accumulates (row, col, value) contributions, then merges them into CSR form.
class TripletBuilder {
public:
    TripletBuilder(std::size_t nrows, std::size_t ncols);

    void add(std::size_t row, std::size_t col, double value);
    CsrMatrix build();

private:
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    std::size_t nrows_;
    std::size_t ncols_;
    std::vector<Entry> entries_;
};

CsrMatrix transpose(const CsrMatrix& a);

// c = alpha * a + beta * b for matrices with identical sparsity patterns.
CsrMatrix add_same_pattern(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b);

} // namespace dampde
