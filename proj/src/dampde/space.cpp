#include "dampde/space.hpp"

#include "dampde/errors.hpp"

namespace dampde {

FeSpace make_fe_space(const Mesh& mesh, SpaceKind kind) {
    FeSpace space;
    space.kind = kind;
    const std::size_t nnodes = mesh.nodes.size();
    space.dof_of_node.assign(nnodes, -1);
    space.node_of_dof.reserve(nnodes);
    for (std::size_t node = 0; node < nnodes; ++node) {
        if (kind == SpaceKind::DirichletP1 && mesh.on_boundary[node]) {
            continue;
        }
        space.dof_of_node[node] = static_cast<std::ptrdiff_t>(space.node_of_dof.size());
        space.node_of_dof.push_back(node);
    }
    space.ndofs = space.node_of_dof.size();
    return space;
}

void embed_dirichlet(const Mesh& mesh, const FeSpace& v, const DenseVector& x, DenseVector& out) {
    if (v.kind != SpaceKind::DirichletP1 || x.size() != v.ndofs) {
        throw ConfigError("embed_dirichlet expects Dirichlet coefficients of matching size");
    }
    out.assign(mesh.nodes.size(), 0.0);
    for (std::size_t dof = 0; dof < v.ndofs; ++dof) {
        out[v.node_of_dof[dof]] = x[dof];
    }
}

DenseVector embed_dirichlet(const Mesh& mesh, const FeSpace& v, const DenseVector& x) {
    DenseVector out;
    embed_dirichlet(mesh, v, x, out);
    return out;
}

DenseVector restrict_to_dirichlet(const Mesh& mesh, const FeSpace& v, const DenseVector& x) {
    if (v.kind != SpaceKind::DirichletP1 || x.size() != mesh.nodes.size()) {
        throw ConfigError("restrict_to_dirichlet expects nodal values on the full mesh");
    }
    DenseVector out(v.ndofs, 0.0);
    for (std::size_t dof = 0; dof < v.ndofs; ++dof) {
        out[dof] = x[v.node_of_dof[dof]];
    }
    return out;
}

} // namespace dampde
