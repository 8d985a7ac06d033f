#include "dampde/mesh.hpp"

#include "dampde/errors.hpp"

#include <cmath>

namespace dampde {

Mesh build_unit_square_mesh(int n) {
    if (n < 1) {
        throw ConfigError("mesh resolution n must be at least 1");
    }
    Mesh mesh;
    mesh.n = n;
    mesh.h = std::sqrt(2.0) / n;

    const int np = n + 1;
    mesh.nodes.reserve(static_cast<std::size_t>(np) * np);
    mesh.on_boundary.reserve(static_cast<std::size_t>(np) * np);
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            mesh.on_boundary.push_back(i == 0 || j == 0 || i == n || j == n);
        }
    }

    mesh.tris.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t p00 = mesh.node_id(i, j);
            const std::size_t p10 = mesh.node_id(i + 1, j);
            const std::size_t p01 = mesh.node_id(i, j + 1);
            const std::size_t p11 = mesh.node_id(i + 1, j + 1);
            mesh.tris.push_back({p00, p10, p11});
            mesh.tris.push_back({p00, p11, p01});
        }
    }
    return mesh;
}

double triangle_area(const Mesh& mesh, std::size_t tri) {
    const auto& t = mesh.tris[tri];
    const auto& a = mesh.nodes[t[0]];
    const auto& b = mesh.nodes[t[1]];
    const auto& c = mesh.nodes[t[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

} // namespace dampde
