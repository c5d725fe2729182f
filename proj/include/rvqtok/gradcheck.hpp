#pragma once

#include <string>
#include <vector>

#include "rvqtok/modules.hpp"

namespace rvqtok {

struct GradCheckReport {
    bool pass = false;
    double max_rel_err = 0.0;
    std::string worst_location;
    size_t entries_checked = 0;
    std::string failure;  // set when an intermediate went non-finite
};

// Central finite-difference check of a module's analytic backward.
// A fixed random weighting R_k (seeded) turns the outputs into a scalar
//   L = sum_k <R_k, out_k>,
// whose gradient w.r.t. every input and parameter entry is compared
// against (L(x+eps) - L(x-eps)) / (2 eps). Relative error uses
// |a - n| / max(1, |a|, |n|). eps must lie in [1e-7, 1e-3].
GradCheckReport grad_check(DiffModule& module, const std::vector<Matrix>& inputs,
                           double eps, double tol, uint64_t seed = 12345);

}  // namespace rvqtok
