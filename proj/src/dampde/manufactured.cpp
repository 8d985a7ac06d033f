#include "manufactured.hpp"

#include <cmath>
#include <numbers>

namespace dampde {

ManufacturedCase manufactured_case(const ModelParams& params) {
    validate_params(params);
    ManufacturedCase c;
    c.params = params;

    const double pi = std::numbers::pi;
    const SpatialFn sinsin = [pi](double x, double y) {
        return std::sin(pi * x) * std::sin(pi * y);
    };
    const double alpha = params.alpha;
    const double beta = params.beta;
    const double delta = params.delta;
    const double rate = beta / delta;
    const double amp = beta / (beta + delta);

    c.exact_phi = make_separable(sinsin, [](double t) { return std::exp(t); });
    c.exact_d = make_separable(sinsin, [amp, rate](double t) {
        return amp * (std::exp(t) - std::exp(-rate * t));
    });
    c.source_l = make_separable(sinsin, [alpha, beta, amp, rate, pi](double t) {
        return (2.0 * alpha * pi * pi + beta) * std::exp(t) -
               beta * amp * (std::exp(t) - std::exp(-rate * t));
    });
    c.d0 = zero_time_function();
    return c;
}

} // namespace dampde
