#include "dampde/field.hpp"

#include "dampde/errors.hpp"
#include "dampde/quadrature.hpp"

#include <utility>

namespace dampde {

SpaceTimeField zero_field(const TimeGrid& grid, std::shared_ptr<const FeSpace> space) {
    SpaceTimeField field;
    field.grid = grid;
    field.space = std::move(space);
    field.coeffs.assign(grid.intervals(), DenseVector(field.space->ndofs, 0.0));
    return field;
}

void validate_field(const SpaceTimeField& field) {
    if (!field.space) {
        throw ConfigError("space-time field has no space attached");
    }
    if (field.coeffs.size() != field.grid.intervals()) {
        throw ConfigError("space-time field does not cover every time interval");
    }
    for (const auto& c : field.coeffs) {
        if (c.size() != field.space->ndofs) {
            throw ConfigError("space-time field coefficient size does not match its space");
        }
    }
    if (field.initial_trace && field.initial_trace->size() != field.space->ndofs) {
        throw ConfigError("space-time field initial trace size does not match its space");
    }
}

TimeFunction make_time_function(std::function<double(double, double, double)> evaluate,
                                Smoothness smoothness) {
    TimeFunction f;
    f.evaluate = std::move(evaluate);
    f.smoothness = smoothness;
    return f;
}

TimeFunction make_separable(SpatialFn spatial, std::function<double(double)> temporal,
                            Smoothness smoothness) {
    TimeFunction f;
    f.spatial = spatial;
    f.temporal = temporal;
    f.smoothness = smoothness;
    f.evaluate = [spatial = std::move(spatial), temporal = std::move(temporal)](
                     double t, double x, double y) { return temporal(t) * spatial(x, y); };
    return f;
}

TimeFunction zero_time_function() {
    return make_separable([](double, double) { return 0.0; }, [](double) { return 0.0; });
}

DenseVector time_average_load(const Mesh& mesh,
                              const FeSpace& space,
                              const TimeGrid& grid,
                              const TimeFunction& l,
                              std::size_t interval) {
    if (interval >= grid.intervals()) {
        throw ConfigError("time interval index out of range");
    }
    const double t0 = grid.breakpoints[interval];
    const double tau = grid.tau(interval);
    const auto& time_rule = default_quadrature().time_rule;

    if (l.separable()) {
        DenseVector load = assemble_load(mesh, space, l.spatial);
        double avg = 0.0;
        for (const auto& q : time_rule) {
            avg += q.weight * l.temporal(t0 + tau * q.t);
        }
        scal(avg, load);
        return load;
    }

    DenseVector load(space.ndofs, 0.0);
    for (const auto& q : time_rule) {
        const double t = t0 + tau * q.t;
        DenseVector part = assemble_load(mesh, space,
                                         [&](double x, double y) { return l.evaluate(t, x, y); });
        axpy(q.weight, part, load);
    }
    return load;
}

std::vector<double> time_average_scalars(const TimeGrid& grid,
                                         const std::function<double(double)>& f) {
    const auto& time_rule = default_quadrature().time_rule;
    std::vector<double> out(grid.intervals(), 0.0);
    for (std::size_t k = 0; k < grid.intervals(); ++k) {
        const double t0 = grid.breakpoints[k];
        const double tau = grid.tau(k);
        double avg = 0.0;
        for (const auto& q : time_rule) {
            avg += q.weight * f(t0 + tau * q.t);
        }
        out[k] = avg;
    }
    return out;
}

DenseVector endpoint_load(const Mesh& mesh,
                          const FeSpace& space,
                          const TimeGrid& grid,
                          const TimeFunction& l,
                          std::size_t interval) {
    if (interval >= grid.intervals()) {
        throw ConfigError("time interval index out of range");
    }
    const double t1 = grid.breakpoints[interval + 1];
    if (l.separable()) {
        DenseVector load = assemble_load(mesh, space, l.spatial);
        scal(l.temporal(t1), load);
        return load;
    }
    return assemble_load(mesh, space,
                         [&l, t1](double x, double y) { return l.evaluate(t1, x, y); });
}

std::vector<double> endpoint_scalars(const TimeGrid& grid,
                                     const std::function<double(double)>& f) {
    std::vector<double> out(grid.intervals(), 0.0);
    for (std::size_t k = 0; k < grid.intervals(); ++k) {
        out[k] = f(grid.breakpoints[k + 1]);
    }
    return out;
}

} // namespace dampde
