#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace infoflow {

// One cross-method comparison: two independent routes to the same number.
struct CheckResult {
    std::string module;
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

// Runs the cross-checks of every module. Deterministic given the seed.
std::vector<CheckResult> run_verification(std::uint64_t seed);

} // namespace infoflow
