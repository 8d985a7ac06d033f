#pragma once

#include "field.hpp"
#include "operators.hpp"

namespace dampde {

// Closed-form solution family on the unit square: the elliptic field is
// sin(pi x) sin(pi y) e^t, the evolving field solves the coupling ODE with
// zero initial value, and the source makes the elliptic equation exact.
struct ManufacturedCase {
    ModelParams params;
    TimeFunction exact_phi;
    TimeFunction exact_d;
    TimeFunction source_l;  // doubles as desired control shift and exact optimal control
    TimeFunction d0;        // read at t = 0; identically zero here
    double alpha_l = 1.0;   // tracking-problem regularization weight
};

ManufacturedCase manufactured_case(const ModelParams& params = {});

} // namespace dampde
