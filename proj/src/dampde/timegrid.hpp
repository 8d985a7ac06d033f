#pragma once

#include <cstddef>
#include <vector>

namespace dampde {

// Partition 0 = t_0 < t_1 < ... < t_M = T. Interval k (0-based) is
// (t_k, t_{k+1}] with length tau(k).
struct TimeGrid {
    std::vector<double> breakpoints;

    std::size_t intervals() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
    double tau(std::size_t k) const { return breakpoints[k + 1] - breakpoints[k]; }
    double total_time() const { return breakpoints.back(); }
    double max_tau() const;
};

TimeGrid make_time_grid(std::vector<double> breakpoints);
TimeGrid uniform_time_grid(double total_time, int intervals);

// Grid with the same interval lengths in reverse order; breakpoints are
// T - t_{M-k}. Used by the time-reversal identity between the forward and
// adjoint sweeps.
TimeGrid reversed_time_grid(const TimeGrid& grid);

bool same_grid(const TimeGrid& a, const TimeGrid& b, double tol = 0.0);

} // namespace dampde
