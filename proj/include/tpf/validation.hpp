// validation.hpp: built-in invariant suites behind `tpflux validate`

#pragma once

#include <string>
#include <vector>

namespace tpf::validation {

enum class Level { fast, full };

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst deviation (or the measured ratio for order checks)
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

// fast: fixed seeds and small grids. full: adds refinement studies and the larger
// random ensembles.
std::vector<CheckResult> run_suite(Level level);

} // namespace tpf::validation
