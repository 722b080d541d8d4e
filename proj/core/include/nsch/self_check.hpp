#pragma once

// Operator self-tests run by `nsch check`.

#include <string>
#include <vector>

namespace nsch {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    /// true: pass when value >= threshold (orders); false: value <= threshold.
    bool at_least = false;
    bool passed = false;
};

/// Summation by parts (relative defect <= 1e-13), Laplacian symmetry
/// (<= 1e-12) and observed L2 convergence order (>= 1.9 on nx = 32, 64, 128)
/// of the Laplacian, gradient, divergence and advection operators.
std::vector<CheckResult> run_self_checks();

}  // namespace nsch
