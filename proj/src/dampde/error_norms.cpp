#include "error_norms.hpp"

#include <cmath>

#include "csr.hpp"
#include "errors.hpp"

namespace dampde {

namespace {

// Spatial quadrature moments of the field coefficients against the spatial
// factor s: a = int u^2, b = int u*s, c = int s^2, all by the same rule.
struct SeparableMoments {
    CsrMatrix mass;
    DenseVector load;
    double s_sq = 0.0;
};

SeparableMoments separable_moments(const Mesh& mesh, const FeSpace& space, const SpatialFn& s,
                                   const QuadratureRule& quad) {
    SeparableMoments m;
    m.mass = assemble_mass(mesh, space, space);
    m.load = assemble_load(mesh, space, s, quad);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tri = mesh.tris[t];
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        const double jac = 2.0 * triangle_area(mesh, t);
        for (const auto& qp : quad.space_rule) {
            const double x = qp.bary[0] * p0[0] + qp.bary[1] * p1[0] + qp.bary[2] * p2[0];
            const double y = qp.bary[0] * p0[1] + qp.bary[1] * p1[1] + qp.bary[2] * p2[1];
            const double v = s(x, y);
            m.s_sq += qp.weight * jac * v * v;
        }
    }
    return m;
}

} // namespace

double spacetime_l2_error(const Mesh& mesh, const SpaceTimeField& field, const TimeFunction& exact,
                          const QuadratureRule& quad) {
    validate_field(field);
    const TimeGrid& grid = field.grid;
    const std::size_t m = grid.intervals();
    double total = 0.0;
    if (exact.separable()) {
        const SeparableMoments mom = separable_moments(mesh, *field.space, exact.spatial, quad);
        DenseVector mu(field.space->ndofs);
        for (std::size_t k = 0; k < m; ++k) {
            const DenseVector& u = field.coeffs[k];
            mom.mass.multiply(u, mu);
            const double a = dot(u, mu);
            const double b = dot(u, mom.load);
            const double t0 = grid.breakpoints[k];
            const double tau = grid.tau(k);
            for (const auto& tq : quad.time_rule) {
                const double f = exact.temporal(t0 + tau * tq.t);
                total += tau * tq.weight * (a - 2.0 * f * b + f * f * mom.s_sq);
            }
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            const double t0 = grid.breakpoints[k];
            const double tau = grid.tau(k);
            for (const auto& tq : quad.time_rule) {
                const double t = t0 + tau * tq.t;
                const double e = l2_error_vs_function(
                    mesh, *field.space, field.coeffs[k],
                    [&exact, t](double x, double y) { return exact.evaluate(t, x, y); }, quad);
                total += tau * tq.weight * e * e;
            }
        }
    }
    return std::sqrt(std::max(0.0, total));
}

double endpoint_l2_error(const Mesh& mesh, const SpaceTimeField& field, const TimeFunction& exact,
                         const QuadratureRule& quad) {
    validate_field(field);
    const TimeGrid& grid = field.grid;
    const std::size_t m = grid.intervals();
    double total = 0.0;
    if (exact.separable()) {
        const SeparableMoments mom = separable_moments(mesh, *field.space, exact.spatial, quad);
        DenseVector mu(field.space->ndofs);
        for (std::size_t k = 0; k < m; ++k) {
            const DenseVector& u = field.coeffs[k];
            mom.mass.multiply(u, mu);
            const double a = dot(u, mu);
            const double b = dot(u, mom.load);
            const double f = exact.temporal(grid.breakpoints[k + 1]);
            total += grid.tau(k) * (a - 2.0 * f * b + f * f * mom.s_sq);
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            const double t1 = grid.breakpoints[k + 1];
            const double e = l2_error_vs_function(
                mesh, *field.space, field.coeffs[k],
                [&exact, t1](double x, double y) { return exact.evaluate(t1, x, y); }, quad);
            total += grid.tau(k) * e * e;
        }
    }
    return std::sqrt(std::max(0.0, total));
}

double spacetime_l2_norm(const Mesh& mesh, const SpaceTimeField& field) {
    validate_field(field);
    const CsrMatrix mass = assemble_mass(mesh, *field.space, *field.space);
    DenseVector mu(field.space->ndofs);
    double total = 0.0;
    for (std::size_t k = 0; k < field.grid.intervals(); ++k) {
        mass.multiply(field.coeffs[k], mu);
        total += field.grid.tau(k) * dot(field.coeffs[k], mu);
    }
    return std::sqrt(std::max(0.0, total));
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& resolutions) {
    if (errors.size() != resolutions.size()) {
        throw ConfigError("convergence order needs equally many errors and resolutions");
    }
    if (errors.size() < 2) {
        throw ConfigError("convergence order needs at least two refinement levels");
    }
    for (double e : errors) {
        if (!(e > 0.0)) {
            throw ConfigError("convergence order is undefined for nonpositive errors");
        }
    }
    for (double r : resolutions) {
        if (!(r > 0.0)) {
            throw ConfigError("convergence order is undefined for nonpositive resolutions");
        }
    }
    std::vector<double> out(errors.size() - 1);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double denom = std::log(resolutions[i] / resolutions[i + 1]);
        if (denom == 0.0) {
            throw ConfigError("convergence order needs distinct consecutive resolutions");
        }
        out[i] = std::log(errors[i] / errors[i + 1]) / denom;
    }
    return out;
}

} // namespace dampde
