#pragma once

#include "dampde/mesh.hpp"
#include "dampde/vec.hpp"

#include <cstddef>
#include <vector>

namespace dampde {

enum class SpaceKind {
    DirichletP1, // piecewise linears vanishing on the boundary
    FreeP1,      // piecewise linears with no constraint
};

// Continuous P1 space over a mesh. Dofs are numbered by increasing node id;
// the Dirichlet variant skips boundary nodes, so dof_of_node holds -1 there.
struct FeSpace {
    SpaceKind kind = SpaceKind::FreeP1;
    std::size_t ndofs = 0;
    std::vector<std::ptrdiff_t> dof_of_node;
    std::vector<std::size_t> node_of_dof;
};

FeSpace make_fe_space(const Mesh& mesh, SpaceKind kind);

// Zero-extension of Dirichlet coefficients to all nodes of the free space,
// and its transpose (restriction to interior nodes).
DenseVector embed_dirichlet(const Mesh& mesh, const FeSpace& v, const DenseVector& x);
void embed_dirichlet(const Mesh& mesh, const FeSpace& v, const DenseVector& x, DenseVector& out);
DenseVector restrict_to_dirichlet(const Mesh& mesh, const FeSpace& v, const DenseVector& x);

} // namespace dampde
