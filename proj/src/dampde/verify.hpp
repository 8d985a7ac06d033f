#pragma once

#include <random>
#include <string>
#include <vector>

#include "adjoint_solver.hpp"
#include "field.hpp"
#include "operators.hpp"
#include "state_solver.hpp"

namespace dampde {

// Brute-force counterpart of the step-by-step solvers: every interval is one
// dense block solve in all unknowns at once, no elimination, no iterative
// solver. Only sensible for tiny meshes; guarded by the dense solver's size
// cap. Data handling is shared with the production path, the stepping is not.
struct ReferenceSolution {
    SpaceTimeField elliptic;  // phi-like component on the Dirichlet space
    SpaceTimeField evolving;  // d-like component on the free space
};

ReferenceSolution reference_forward(const OperatorSet& ops, const TimeGrid& grid,
                                    const ForwardInput& in);
ReferenceSolution reference_adjoint(const OperatorSet& ops, const TimeGrid& grid,
                                    const AdjointInput& in);

DenseVector random_vector(std::size_t n, std::mt19937& rng, double amplitude = 1.0);
SpaceTimeField random_field(const TimeGrid& grid, std::shared_ptr<const FeSpace> space,
                            std::mt19937& rng, double amplitude = 1.0);

struct VerifyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Self-contained invariant suites behind the `verify` subcommand. Each suite
// is deterministic (fixed seeds) and fast enough for routine use.
std::vector<VerifyResult> run_verify_suites();

bool all_passed(const std::vector<VerifyResult>& results);

// One line per suite: "PASS <name>: <detail>" / "FAIL <name>: <detail>".
std::string verify_report(const std::vector<VerifyResult>& results);

} // namespace dampde
