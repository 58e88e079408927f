#pragma once

#include <utility>
#include <vector>

#include "wbary/model.hpp"

namespace wbary {

// Barycenter approximation supported on original input points, together
// with its transport to every input measure.
struct ApproxBarycenter {
  std::vector<Point> support;
  std::vector<double> mass;
  // flows[i][s]: (point index in measure i, mass) shipped from support[s].
  std::vector<std::vector<std::vector<std::pair<int, double>>>> flows;
  double cost = 0.0;
};

// Vertex of {w : A w = d, w >= 0} built by the minimum-remaining-mass sweep:
// every step assigns the smallest outstanding mass among the current
// pointers to their combination and advances each exhausted pointer.
SparseMass greedy_vertex(const Instance& inst);

// Optimal measure among those supported on the union of input supports.
// Its cost is at most twice the optimal barycenter cost.
ApproxBarycenter two_approx(const Instance& inst);

// Splits every approximate support point into combinations (one destination
// per measure) so that the result is non-mass-splitting and satisfies
// A w = d. Throws ContractError on inconsistent flows.
SparseMass repair_to_vertex(const ApproxBarycenter& apx, const Instance& inst);

}  // namespace wbary
