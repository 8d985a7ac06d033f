#include "dampde/csr.hpp"

#include <algorithm>
#include <cassert>

#include "dampde/errors.hpp"

namespace dampde {

void CsrMatrix::multiply(const DenseVector& x, DenseVector& y) const {
    if (x.size() != ncols) {
        throw ConfigError("CsrMatrix::multiply: dimension mismatch");
    }
    y.assign(nrows, 0.0);
    for (std::size_t i = 0; i < nrows; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            s += vals[k] * x[col_idx[k]];
        }
        y[i] = s;
    }
}

DenseVector CsrMatrix::multiply(const DenseVector& x) const {
    DenseVector y;
    multiply(x, y);
    return y;
}

double CsrMatrix::diag(std::size_t i) const {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        if (col_idx[k] == i) return vals[k];
        if (col_idx[k] > i) break;
    }
    return 0.0;
}

TripletBuilder::TripletBuilder(std::size_t nrows, std::size_t ncols)
    : nrows_(nrows), ncols_(ncols) {}

void TripletBuilder::add(std::size_t row, std::size_t col, double value) {
    assert(row < nrows_ && col < ncols_);
    entries_.push_back({row, col, value});
}

CsrMatrix TripletBuilder::build() {
    // stable_sort keeps insertion order within equal keys, so the merge below
    // sums contributions in a reproducible order.
    std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });

    CsrMatrix m;
    m.nrows = nrows_;
    m.ncols = ncols_;
    m.row_ptr.assign(nrows_ + 1, 0);

    std::size_t i = 0;
    while (i < entries_.size()) {
        const std::size_t row = entries_[i].row;
        const std::size_t col = entries_[i].col;
        double sum = 0.0;
        while (i < entries_.size() && entries_[i].row == row && entries_[i].col == col) {
            sum += entries_[i].value;
            ++i;
        }
        m.col_idx.push_back(col);
        m.vals.push_back(sum);
        m.row_ptr[row + 1] += 1;
    }
    for (std::size_t r = 0; r < nrows_; ++r) m.row_ptr[r + 1] += m.row_ptr[r];

    entries_.clear();
    entries_.shrink_to_fit();
    return m;
}

CsrMatrix transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.nrows = a.ncols;
    t.ncols = a.nrows;
    t.row_ptr.assign(t.nrows + 1, 0);
    t.col_idx.resize(a.col_idx.size());
    t.vals.resize(a.vals.size());

    for (std::size_t idx : a.col_idx) t.row_ptr[idx + 1] += 1;
    for (std::size_t r = 0; r < t.nrows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];

    std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const std::size_t j = a.col_idx[k];
            const std::size_t pos = next[j]++;
            t.col_idx[pos] = i;
            t.vals[pos] = a.vals[k];
        }
    }
    return t;
}

CsrMatrix add_same_pattern(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
    if (a.nrows != b.nrows || a.ncols != b.ncols || a.row_ptr != b.row_ptr ||
        a.col_idx != b.col_idx) {
        throw ConfigError("add_same_pattern: sparsity patterns differ");
    }
    CsrMatrix c = a;
    for (std::size_t k = 0; k < c.vals.size(); ++k) {
        c.vals[k] = alpha * a.vals[k] + beta * b.vals[k];
    }
    return c;
}

} // namespace dampde
