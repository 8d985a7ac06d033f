#include "dampde/dense.hpp"

#include <cmath>

#include "dampde/errors.hpp"

namespace dampde {

DenseVector dense_solve(const DenseMatrix& a, const DenseVector& b) {
    const int n = a.nrows;
    if (n != a.ncols) throw ConfigError("dense_solve: matrix not square");
    if (n > 2000) throw ConfigError("dense_solve: dimension above the 2000 guard");
    if (static_cast<int>(b.size()) != n) throw ConfigError("dense_solve: dimension mismatch");
    if (n == 0) return {};

    std::vector<double> lu = a.data;
    DenseVector x = b;

    double amax = 0.0;
    for (double v : lu) amax = std::max(amax, std::fabs(v));
    const double pivot_floor = 1e-14 * amax;

    auto at = [&](int i, int j) -> double& { return lu[static_cast<std::size_t>(i) * n + j]; };

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(at(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(at(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= pivot_floor) {
            throw SingularMatrix("dense_solve: pivot below 1e-14 * max|A|");
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(k, j));
            std::swap(x[piv], x[k]);
        }
        const double inv = 1.0 / at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = at(i, k) * inv;
            if (f == 0.0) continue;
            at(i, k) = f;
            for (int j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
            x[i] -= f * x[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= at(i, j) * x[j];
        x[i] = s / at(i, i);
    }
    return x;
}

} // namespace dampde
