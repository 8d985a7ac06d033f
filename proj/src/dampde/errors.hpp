#pragma once

#include <stdexcept>
#include <string>

namespace dampde {

// Invalid user-facing input: bad sizes, malformed config documents, mismatched
// meshes and spaces. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure at run time: solver breakdown, nonconvergence, singular
// systems. The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, int iters, double residual)
        : NumericalError(what), iters(iters), residual(residual) {}

    int iters;
    double residual;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace dampde
