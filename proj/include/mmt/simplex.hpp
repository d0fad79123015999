#pragma once

#include <vector>

namespace mmt {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::vector<int> basis;
    // Certificate re-derived from the final basis, independent of the pivot
    // path: duals from B^T y = c_B and the worst reduced cost.
    std::vector<double> duals;
    double min_reduced_cost = 0.0;
    bool certified = false;
};

// Minimizes c.x subject to A x = b, x >= 0, via a dense two-phase tableau
// simplex with Bland's rule.
LpResult simplex_solve(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                       const std::vector<double>& c);

}  // namespace mmt
