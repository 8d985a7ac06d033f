#include "dampde/timegrid.hpp"

#include "dampde/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dampde {

double TimeGrid::max_tau() const {
    double m = 0.0;
    for (std::size_t k = 0; k < intervals(); ++k) {
        m = std::max(m, tau(k));
    }
    return m;
}

TimeGrid make_time_grid(std::vector<double> breakpoints) {
    if (breakpoints.size() < 2) {
        throw ConfigError("a time grid needs at least one interval");
    }
    if (breakpoints.front() != 0.0) {
        throw ConfigError("a time grid must start at t = 0");
    }
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        if (!(breakpoints[k] < breakpoints[k + 1])) {
            throw ConfigError("time grid breakpoints must be strictly increasing");
        }
    }
    return TimeGrid{std::move(breakpoints)};
}

TimeGrid uniform_time_grid(double total_time, int intervals) {
    if (!(total_time > 0.0)) {
        throw ConfigError("final time T must be positive");
    }
    if (intervals < 1) {
        throw ConfigError("number of time intervals M must be at least 1");
    }
    std::vector<double> pts(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) {
        pts[static_cast<std::size_t>(k)] = total_time * static_cast<double>(k) / intervals;
    }
    pts.front() = 0.0;
    pts.back() = total_time;
    return TimeGrid{std::move(pts)};
}

TimeGrid reversed_time_grid(const TimeGrid& grid) {
    const double total = grid.total_time();
    std::vector<double> pts(grid.breakpoints.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        pts[k] = total - grid.breakpoints[grid.breakpoints.size() - 1 - k];
    }
    pts.front() = 0.0;
    pts.back() = total;
    return TimeGrid{std::move(pts)};
}

bool same_grid(const TimeGrid& a, const TimeGrid& b, double tol) {
    if (a.breakpoints.size() != b.breakpoints.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.breakpoints.size(); ++k) {
        if (std::abs(a.breakpoints[k] - b.breakpoints[k]) > tol) {
            return false;
        }
    }
    return true;
}

} // namespace dampde
