#pragma once

#include <cstddef>
#include <vector>

namespace dampde {

// Coefficient vector role shared by loads, solution vectors and nodal fields.
using DenseVector = std::vector<double>;

double dot(const DenseVector& x, const DenseVector& y);
double nrm2(const DenseVector& x);

// y += a * x
void axpy(double a, const DenseVector& x, DenseVector& y);
void scal(double a, DenseVector& x);

DenseVector zeros(std::size_t n);

} // namespace dampde
