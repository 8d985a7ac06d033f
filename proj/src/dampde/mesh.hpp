#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dampde {

// Uniform triangulation of the unit square. The n x n grid of cells is split
// along the diagonal from the lower-left to the upper-right corner of each
// cell, giving 2 n^2 right triangles with legs of length 1/n.
struct Mesh {
    int n = 0;                                    // cells per side
    double h = 0.0;                               // longest edge, sqrt(2)/n
    std::vector<std::array<double, 2>> nodes;     // (n+1)^2 vertices
    std::vector<std::array<std::size_t, 3>> tris; // vertex ids, counterclockwise
    std::vector<bool> on_boundary;                // per node

    std::size_t node_id(int i, int j) const {
        return static_cast<std::size_t>(j) * (n + 1) + static_cast<std::size_t>(i);
    }
};

Mesh build_unit_square_mesh(int n);

// Signed area of a triangle; positive for counterclockwise orientation.
double triangle_area(const Mesh& mesh, std::size_t tri);

} // namespace dampde
