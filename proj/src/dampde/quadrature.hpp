#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dampde {

// Quadrature point on the reference triangle, stored in barycentric
// coordinates; the weight includes the reference-triangle measure so that
// sum(w) = 1/2.
struct TrianglePoint {
    std::array<double, 3> bary;
    double weight;
};

// Gauss point on [0,1] with sum(w) = 1.
struct LinePoint {
    double t;
    double weight;
};

struct QuadratureRule {
    std::vector<TrianglePoint> space_rule;
    std::vector<LinePoint> time_rule;
};

// Degree-5 space rule (7 points) paired with degree-5 time rule (3 points).
// This is the rule used everywhere outside of self-check code.
const QuadratureRule& default_quadrature();

// Higher-order pair (degree-7 space, 5-point time) for cross-checking that
// quadrature error is negligible.
const QuadratureRule& refined_quadrature();

} // namespace dampde
