#pragma once

#include "dampde/assemble.hpp"
#include "dampde/mesh.hpp"
#include "dampde/space.hpp"
#include "dampde/timegrid.hpp"
#include "dampde/vec.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace dampde {

// Coefficient history of a function that is constant on each time interval
// and P1 in space: coeffs[k] is the nodal vector on (t_k, t_{k+1}].
struct SpaceTimeField {
    TimeGrid grid;
    std::shared_ptr<const FeSpace> space;
    std::vector<DenseVector> coeffs;
    // For d-type fields, the projected initial value ahead of interval 0.
    std::optional<DenseVector> initial_trace;

    std::size_t intervals() const { return coeffs.size(); }
};

SpaceTimeField zero_field(const TimeGrid& grid, std::shared_ptr<const FeSpace> space);

// Checks grid/space/coefficient-shape consistency; throws ConfigError.
void validate_field(const SpaceTimeField& field);

enum class Smoothness {
    Smooth,          // evaluable and smooth across all of [0,T] x closure(Omega)
    PiecewiseSmooth, // smooth only inside elements/intervals
};

// Continuous-in-time data given by a pointwise evaluator. When the optional
// separable pair is set, evaluator(t,x,y) == temporal(t) * spatial(x,y) and
// assembly routines exploit that splitting.
struct TimeFunction {
    std::function<double(double, double, double)> evaluate;
    Smoothness smoothness = Smoothness::Smooth;
    SpatialFn spatial;
    std::function<double(double)> temporal;

    bool separable() const { return static_cast<bool>(spatial) && static_cast<bool>(temporal); }
};

TimeFunction make_time_function(std::function<double(double, double, double)> evaluate,
                                Smoothness smoothness = Smoothness::Smooth);
TimeFunction make_separable(SpatialFn spatial, std::function<double(double)> temporal,
                            Smoothness smoothness = Smoothness::Smooth);
TimeFunction zero_time_function();

// Load vector of the interval average (1/tau_k) int_{I_k} (l(t), psi_i) dt,
// with the time integral by the default Gauss rule. 0-based interval index.
DenseVector time_average_load(const Mesh& mesh,
                              const FeSpace& space,
                              const TimeGrid& grid,
                              const TimeFunction& l,
                              std::size_t interval);

// Interval averages of a scalar function of t, all intervals at once.
std::vector<double> time_average_scalars(const TimeGrid& grid,
                                         const std::function<double(double)>& f);

// Load vector of l frozen at the right endpoint t_{k+1} of interval k. The
// solver represents continuous-in-time data by this endpoint sample on each
// interval; the reference results it reproduces were produced the same way.
DenseVector endpoint_load(const Mesh& mesh,
                          const FeSpace& space,
                          const TimeGrid& grid,
                          const TimeFunction& l,
                          std::size_t interval);

// Right-endpoint samples of a scalar function of t, all intervals at once.
std::vector<double> endpoint_scalars(const TimeGrid& grid,
                                     const std::function<double(double)>& f);

} // namespace dampde
