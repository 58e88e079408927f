#pragma once

#include <cstddef>
#include <vector>

namespace wbary {

// Balanced transportation problem: ship `supplies` (rows) to `demands`
// (columns) at minimum total cost. Costs may be negative.
struct TransportationProblem {
  std::vector<double> supplies;
  std::vector<double> demands;
  std::vector<double> costs;  // row-major, supplies.size() x demands.size()

  int rows() const { return static_cast<int>(supplies.size()); }
  int cols() const { return static_cast<int>(demands.size()); }
  double cost(int i, int j) const {
    return costs[static_cast<std::size_t>(i) * demands.size() + static_cast<std::size_t>(j)];
  }
};

struct Flow {
  int row = 0;
  int col = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<Flow> flows;  // nonzero flows, sorted by (row, col)
  double objective = 0.0;
  long iterations = 0;
};

struct TransportOptions {
  // Route through the general simplex module instead of the transportation
  // simplex (differential testing).
  bool use_simplex = false;
  double balance_tol = 1e-9;
  int degenerate_streak = 50;
};

// Optimal basic flow. Throws ContractError on unbalanced or nonpositive
// marginals.
TransportPlan solve_transportation(const TransportationProblem& tp,
                                   const TransportOptions& options = {});

}  // namespace wbary
