#include "dampde/vec.hpp"

#include <cassert>
#include <cmath>

namespace dampde {

double dot(const DenseVector& x, const DenseVector& y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double nrm2(const DenseVector& x) {
    return std::sqrt(dot(x, x));
}

void axpy(double a, const DenseVector& x, DenseVector& y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scal(double a, DenseVector& x) {
    for (double& v : x) v *= a;
}

DenseVector zeros(std::size_t n) {
    return DenseVector(n, 0.0);
}

} // namespace dampde
