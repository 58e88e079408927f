#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wbary/model.hpp"
#include "wbary/pricing.hpp"

namespace wbary {

enum class StartMethod { kGreedy, kTwoApprox };

struct SolveConfig {
  StartMethod start = StartMethod::kGreedy;
  PairVariant pair_variant = PairVariant::kLarge;
  double tol = 1e-6;
  std::int64_t max_iter = 100000;
  // Full recomputation of the reduced costs every this many iterations.
  int recompute_period = 500;
  bool polish = true;
  std::uint64_t memory_cap = std::uint64_t{8} << 30;
  // Largest N the direct solve accepts.
  std::uint64_t oracle_cap = 200000;
};

struct BarycenterPoint {
  Point coords;
  double mass = 0.0;
  std::vector<int> assignment;  // point index in each input measure
};

// Per-iteration step times in seconds, summed over the run.
struct StepTimings {
  double setup_rm = 0.0;
  double solve_rm = 0.0;
  double update_reduced_costs = 0.0;
  double calc_best_costs = 0.0;
  double solve_pricing = 0.0;

  double total() const {
    return setup_rm + solve_rm + update_reduced_costs + calc_best_costs + solve_pricing;
  }
};

struct TraceEntry {
  std::int64_t iter = 0;
  double rm_objective = 0.0;
  double pricing_objective = 0.0;
};

struct SolveResult {
  std::vector<BarycenterPoint> barycenter;
  SparseMass w;  // in the input's combination space
  double objective = 0.0;
  double rm_objective = 0.0;  // last restricted-master value, before polish
  std::int64_t iterations = 0;
  bool converged = false;
  StepTimings timings;
  double init_seconds = 0.0;   // initial vertex and cost vector
  double polish_seconds = 0.0;
  std::int64_t peak_memory_bytes = 0;
  std::size_t raw_support = 0;  // nonzeros of sum_j mu_j p_j
  std::vector<TraceEntry> trace;
};

SolveResult solve(const Instance& inst, const SolveConfig& cfg = {});

// Direct solve of the full LP over all N combinations, with columns
// generated on demand. Throws CapacityError when N exceeds cfg.oracle_cap.
SolveResult solve_direct(const Instance& inst, const SolveConfig& cfg = {});

// Bytes an explicit sparse model of the full LP needs: n (row index,
// coefficient) pairs per column plus column start, cost, primal value and
// reduced cost per column.
std::uint64_t explicit_lp_bytes(const Strides& strides);

// Builds the reported barycenter points from w.
std::vector<BarycenterPoint> make_barycenter(const SparseMass& w, const Instance& inst,
                                             const Strides& strides);

const char* to_string(StartMethod s);
const char* to_string(PairVariant v);

}  // namespace wbary
