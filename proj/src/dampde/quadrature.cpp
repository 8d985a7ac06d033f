#include "dampde/quadrature.hpp"

#include <cmath>

namespace dampde {

namespace {

// Gauss-Legendre nodes and weights on [0,1] for 3, 4, or 5 points,
// from the closed-form expressions on [-1,1].
std::vector<LinePoint> gauss_legendre_01(int npoints) {
    std::vector<std::array<double, 2>> ref; // (node, weight) on [-1,1]
    switch (npoints) {
    case 3: {
        const double x = std::sqrt(3.0 / 5.0);
        ref = {{-x, 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {x, 5.0 / 9.0}};
        break;
    }
    case 4: {
        const double a = std::sqrt((3.0 - 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
        const double b = std::sqrt((3.0 + 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        ref = {{-b, wb}, {-a, wa}, {a, wa}, {b, wb}};
        break;
    }
    default: {
        const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        ref = {{-b, wb}, {-a, wa}, {0.0, 128.0 / 225.0}, {a, wa}, {b, wb}};
        break;
    }
    }
    std::vector<LinePoint> out;
    out.reserve(ref.size());
    for (const auto& p : ref) {
        out.push_back({0.5 * (p[0] + 1.0), 0.5 * p[1]});
    }
    return out;
}

// Classical 7-point rule, exact for total degree 5. Weights carry the
// reference-triangle measure, so they sum to 1/2.
std::vector<TrianglePoint> triangle_rule_degree5() {
    std::vector<TrianglePoint> pts;
    pts.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.5 * 9.0 / 40.0});
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double w1 = 0.5 * (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double w2 = 0.5 * (155.0 + s15) / 1200.0;
    for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
        pts.push_back({{1.0 - 2.0 * a, a, a}, w});
        pts.push_back({{a, 1.0 - 2.0 * a, a}, w});
        pts.push_back({{a, a, 1.0 - 2.0 * a}, w});
    }
    return pts;
}

// Conical product of 5- and 4-point Gauss rules through the Duffy map
// x = u, y = v (1 - u); exact for total degree 7.
std::vector<TrianglePoint> triangle_rule_degree7() {
    const auto gu = gauss_legendre_01(5);
    const auto gv = gauss_legendre_01(4);
    std::vector<TrianglePoint> pts;
    pts.reserve(gu.size() * gv.size());
    for (const auto& pu : gu) {
        for (const auto& pv : gv) {
            const double x = pu.t;
            const double y = pv.t * (1.0 - pu.t);
            const double w = pu.weight * pv.weight * (1.0 - pu.t);
            pts.push_back({{1.0 - x - y, x, y}, w});
        }
    }
    return pts;
}

} // namespace

const QuadratureRule& default_quadrature() {
    static const QuadratureRule rule{triangle_rule_degree5(), gauss_legendre_01(3)};
    return rule;
}

const QuadratureRule& refined_quadrature() {
    static const QuadratureRule rule{triangle_rule_degree7(), gauss_legendre_01(5)};
    return rule;
}

} // namespace dampde
