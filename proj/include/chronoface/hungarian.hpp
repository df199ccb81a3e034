#pragma once

#include <vector>

namespace chronoface {

// Minimum-cost perfect assignment on a square cost matrix (Jonker-
// Volgenant style shortest augmenting paths with row/column potentials,
// O(n^3)). Returns, for each row, the assigned column. Deterministic for a
// given matrix. cost[r][c] must be finite.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace chronoface
