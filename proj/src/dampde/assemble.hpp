#pragma once

#include "dampde/csr.hpp"
#include "dampde/mesh.hpp"
#include "dampde/pcg.hpp"
#include "dampde/quadrature.hpp"
#include "dampde/space.hpp"
#include "dampde/vec.hpp"

#include <functional>

namespace dampde {

using SpatialFn = std::function<double(double, double)>;

// Closed-form P1 element matrices on a triangle of the given geometry.
std::array<std::array<double, 3>, 3> element_mass_matrix(double area);
std::array<std::array<double, 3>, 3> element_stiffness_matrix(
    const std::array<double, 2>& p0,
    const std::array<double, 2>& p1,
    const std::array<double, 2>& p2);

// Mass matrix with rows indexed by the test space and columns by the trial
// space: entry (i,j) = (trial_j, test_i)_{L2}.
CsrMatrix assemble_mass(const Mesh& mesh, const FeSpace& trial, const FeSpace& test);

CsrMatrix assemble_stiffness(const Mesh& mesh, const FeSpace& space);

// Load vector (f, psi_i) by the given space quadrature rule.
DenseVector assemble_load(const Mesh& mesh,
                          const FeSpace& space,
                          const SpatialFn& f,
                          const QuadratureRule& quad = default_quadrature());

// Coefficients of the L2 projection of f onto the space (mass solve).
DenseVector l2_project(const Mesh& mesh,
                       const FeSpace& space,
                       const SpatialFn& f,
                       const SolverConfig& cfg = SolverConfig{});

// u' M v for the space's mass matrix.
double l2_inner_space(const Mesh& mesh, const FeSpace& space,
                      const DenseVector& u, const DenseVector& v);

// |u_h - f|_{L2(Omega)} by the given quadrature rule, with u_h the P1
// function of the coefficients (constrained dofs read as zero).
double l2_error_vs_function(const Mesh& mesh, const FeSpace& space, const DenseVector& coeffs,
                            const SpatialFn& f,
                            const QuadratureRule& quad = default_quadrature());

} // namespace dampde
