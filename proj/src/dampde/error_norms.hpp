#pragma once

#include <vector>

#include "assemble.hpp"
#include "field.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace dampde {

// L2 distance over time x domain between a piecewise-constant-in-time P1 field
// and a space-time function: sqrt of the time-quadrature sum of spatial L2
// errors at the quadrature times of each interval.
double spacetime_l2_error(const Mesh& mesh, const SpaceTimeField& field, const TimeFunction& exact,
                          const QuadratureRule& quad = default_quadrature());

// L2 norm over time x domain of a piecewise-constant-in-time P1 field.
double spacetime_l2_norm(const Mesh& mesh, const SpaceTimeField& field);

// Step-end error: sqrt of sum_k tau_k * (spatial L2 distance between the
// field's value on interval k and the comparison function at the interval's
// right endpoint t_{k+1}). This is the metric behind the tabulated study
// errors; it weights one sample per step instead of integrating across it.
double endpoint_l2_error(const Mesh& mesh, const SpaceTimeField& field, const TimeFunction& exact,
                         const QuadratureRule& quad = default_quadrature());

// Experimental orders of convergence: entry i is
// ln(e_i / e_{i+1}) / ln(r_i / r_{i+1}) for consecutive pairs.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& resolutions);

} // namespace dampde
