#include "dampde/assemble.hpp"

#include "dampde/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dampde {

std::array<std::array<double, 3>, 3> element_mass_matrix(double area) {
    const double off = area / 12.0;
    const double dia = area / 6.0;
    return {{{dia, off, off}, {off, dia, off}, {off, off, dia}}};
}

std::array<std::array<double, 3>, 3> element_stiffness_matrix(
    const std::array<double, 2>& p0,
    const std::array<double, 2>& p1,
    const std::array<double, 2>& p2) {
    // Gradient of basis i is (b_i, c_i) / (2 area) with the classic cyclic
    // edge differences.
    const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
    const double area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double scale = 1.0 / (2.0 * area2); // = 1 / (4 area)
    std::array<std::array<double, 3>, 3> k{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            k[i][j] = scale * (b[i] * b[j] + c[i] * c[j]);
        }
    }
    return k;
}

CsrMatrix assemble_mass(const Mesh& mesh, const FeSpace& trial, const FeSpace& test) {
    TripletBuilder builder(test.ndofs, trial.ndofs);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tri = mesh.tris[t];
        const auto local = element_mass_matrix(triangle_area(mesh, t));
        for (int i = 0; i < 3; ++i) {
            const std::ptrdiff_t row = test.dof_of_node[tri[i]];
            if (row < 0) {
                continue;
            }
            for (int j = 0; j < 3; ++j) {
                const std::ptrdiff_t col = trial.dof_of_node[tri[j]];
                if (col < 0) {
                    continue;
                }
                builder.add(static_cast<std::size_t>(row), static_cast<std::size_t>(col),
                            local[i][j]);
            }
        }
    }
    return builder.build();
}

CsrMatrix assemble_stiffness(const Mesh& mesh, const FeSpace& space) {
    TripletBuilder builder(space.ndofs, space.ndofs);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tri = mesh.tris[t];
        const auto local = element_stiffness_matrix(mesh.nodes[tri[0]], mesh.nodes[tri[1]],
                                                    mesh.nodes[tri[2]]);
        for (int i = 0; i < 3; ++i) {
            const std::ptrdiff_t row = space.dof_of_node[tri[i]];
            if (row < 0) {
                continue;
            }
            for (int j = 0; j < 3; ++j) {
                const std::ptrdiff_t col = space.dof_of_node[tri[j]];
                if (col < 0) {
                    continue;
                }
                builder.add(static_cast<std::size_t>(row), static_cast<std::size_t>(col),
                            local[i][j]);
            }
        }
    }
    return builder.build();
}

DenseVector assemble_load(const Mesh& mesh,
                          const FeSpace& space,
                          const SpatialFn& f,
                          const QuadratureRule& quad) {
    DenseVector load(space.ndofs, 0.0);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tri = mesh.tris[t];
        const double jac = 2.0 * triangle_area(mesh, t); // reference area is 1/2
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        for (const auto& q : quad.space_rule) {
            const double x = q.bary[0] * p0[0] + q.bary[1] * p1[0] + q.bary[2] * p2[0];
            const double y = q.bary[0] * p0[1] + q.bary[1] * p1[1] + q.bary[2] * p2[1];
            const double fw = f(x, y) * q.weight * jac;
            for (int i = 0; i < 3; ++i) {
                const std::ptrdiff_t dof = space.dof_of_node[tri[i]];
                if (dof >= 0) {
                    load[static_cast<std::size_t>(dof)] += fw * q.bary[i];
                }
            }
        }
    }
    return load;
}

DenseVector l2_project(const Mesh& mesh,
                       const FeSpace& space,
                       const SpatialFn& f,
                       const SolverConfig& cfg) {
    const CsrMatrix mass = assemble_mass(mesh, space, space);
    const DenseVector load = assemble_load(mesh, space, f);
    return pcg_solve(mass, load, cfg).x;
}

double l2_inner_space(const Mesh& mesh, const FeSpace& space,
                      const DenseVector& u, const DenseVector& v) {
    if (u.size() != space.ndofs || v.size() != space.ndofs) {
        throw ConfigError("l2_inner_space operands must match the space dimension");
    }
    const CsrMatrix mass = assemble_mass(mesh, space, space);
    DenseVector mv(v.size());
    mass.multiply(v, mv);
    return dot(u, mv);
}

double l2_error_vs_function(const Mesh& mesh, const FeSpace& space, const DenseVector& coeffs,
                            const SpatialFn& f, const QuadratureRule& quad) {
    if (coeffs.size() != space.ndofs) {
        throw ConfigError("coefficient size does not match the space dimension");
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tri = mesh.tris[t];
        const double jac = 2.0 * triangle_area(mesh, t);
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        double local[3];
        for (int i = 0; i < 3; ++i) {
            const std::ptrdiff_t dof = space.dof_of_node[tri[i]];
            local[i] = dof >= 0 ? coeffs[static_cast<std::size_t>(dof)] : 0.0;
        }
        for (const auto& q : quad.space_rule) {
            const double x = q.bary[0] * p0[0] + q.bary[1] * p1[0] + q.bary[2] * p2[0];
            const double y = q.bary[0] * p0[1] + q.bary[1] * p1[1] + q.bary[2] * p2[1];
            const double uh = q.bary[0] * local[0] + q.bary[1] * local[1] + q.bary[2] * local[2];
            const double diff = uh - f(x, y);
            acc += diff * diff * q.weight * jac;
        }
    }
    return std::sqrt(std::max(0.0, acc));
}

} // namespace dampde
