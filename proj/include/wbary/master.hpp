#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wbary/memory.hpp"
#include "wbary/model.hpp"
#include "wbary/simplex.hpp"

namespace wbary {

// One Dantzig-Wolfe column: a point p of the pricing polytope together with
// its cost c^T p and its image A_m p on the master rows.
struct DWColumn {
  SparseMass p;
  double cost = 0.0;
  tracked_vector<double> amp;
};

// Restricted master problem
//   min sum_j (c^T p_j) mu_j  s.t.  sum_j (A_m p_j) mu_j = d_m,
//                                   -sum_j mu_j = -1,  mu >= 0.
// The convexity row is stated with a negated sign so that its dual sigma
// enters the pricing objective as "+ sigma".
struct MasterState {
  std::vector<DWColumn> columns;
  std::vector<double> mu;
  std::vector<double> y;  // duals of the master rows
  double sigma = 0.0;     // dual of the convexity row
  double objective = 0.0;
  std::optional<lp::Basis> basis;
  std::int64_t last_pivots = 0;
  bool last_warm = false;

  std::vector<double> d_m;
  int master_base = 0;  // first row of A belonging to the master
};

struct RmSolution {
  std::vector<double> mu;
  std::vector<double> y;
  double sigma = 0.0;
  double objective = 0.0;
};

// Starts the master from a point p1 with A p1 = d (in the permuted space)
// and solves it once. Throws ContractError when p1 is infeasible.
MasterState init_rm(const SparseMass& p1, const Instance& permuted, const Strides& strides,
                    const lp::Options& options = {});

// Appends p, computing A_m p and c^T p from p's nonzeros only.
void add_column(MasterState& state, SparseMass p, const Instance& permuted,
                const Strides& strides);

// Re-solves the master, warm-started from the previous optimal basis.
RmSolution solve_rm(MasterState& state, const lp::Options& options = {});

// w = sum_j mu_j p_j with entries at or below the zero tolerance removed.
SparseMass recover_solution(const MasterState& state);

// Solves the full barycenter LP restricted to the union of the supports of
// all generated columns and returns an optimal vertex of it.
SparseMass polish(const MasterState& state, const Instance& permuted, const Strides& strides,
                  const lp::Options& options = {});

// Bytes held by the master's column storage.
std::uint64_t master_storage_bytes(const MasterState& state);

}  // namespace wbary
