#include "wbary/master.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbary/errors.hpp"

namespace wbary {

MasterState init_rm(const SparseMass& p1, const Instance& permuted, const Strides& strides,
                    const lp::Options& options) {
  if (!is_feasible(p1, permuted, strides)) {
    throw ContractError("initial column does not satisfy A w = d");
  }
  MasterState state;
  state.master_base = strides.num_measures() >= 2 ? strides.row_offsets[2] : strides.num_rows();
  const auto d = marginal_vector(permuted);
  state.d_m.assign(d.begin() + state.master_base, d.end());
  add_column(state, p1, permuted, strides);
  solve_rm(state, options);
  return state;
}

void add_column(MasterState& state, SparseMass p, const Instance& permuted,
                const Strides& strides) {
  DWColumn col;
  col.amp.assign(state.d_m.size(), 0.0);
  std::vector<int> indices(strides.num_measures());
  for (const auto& [h, mass] : p) {
    for (std::size_t i = 0; i < strides.num_measures(); ++i) indices[i] = strides.component(h, i);
    col.cost += mass * combination_cost(indices, permuted);
    for (std::size_t i = 2; i < strides.num_measures(); ++i) {
      const int row = strides.row_offsets[i] + indices[i] - state.master_base;
      col.amp[static_cast<std::size_t>(row)] += mass;
    }
  }
  col.p = std::move(p);
  state.columns.push_back(std::move(col));
}

RmSolution solve_rm(MasterState& state, const lp::Options& options) {
  if (state.columns.empty()) throw ContractError("restricted master has no columns");
  const int rows = static_cast<int>(state.d_m.size());
  lp::SparseLP lp(rows + 1);
  std::vector<lp::Entry> entries;
  for (const DWColumn& col : state.columns) {
    entries.clear();
    for (int r = 0; r < rows; ++r) {
      const double v = col.amp[static_cast<std::size_t>(r)];
      if (v != 0.0) entries.emplace_back(r, v);
    }
    entries.emplace_back(rows, -1.0);
    lp.add_column(col.cost, entries);
  }
  std::vector<double> rhs = state.d_m;
  rhs.push_back(-1.0);

  const lp::Solution sol = lp::solve(lp, rhs, state.basis, options);
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalError(std::string("restricted master ended ") + lp::to_string(sol.status) +
                         " although its first column is feasible");
  }
  state.mu = sol.x;
  state.y.assign(sol.duals.begin(), sol.duals.begin() + rows);
  state.sigma = sol.duals[static_cast<std::size_t>(rows)];
  state.objective = sol.objective;
  state.basis = sol.basis;
  state.last_pivots = sol.iterations;
  state.last_warm = sol.warm_started;
  return {state.mu, state.y, state.sigma, state.objective};
}

SparseMass recover_solution(const MasterState& state) {
  SparseMass w;
  for (std::size_t j = 0; j < state.columns.size(); ++j) {
    const double mu = state.mu[j];
    if (mu <= 0.0) continue;
    for (const auto& [h, mass] : state.columns[j].p) w.add(h, mu * mass);
  }
  w.prune();
  return w;
}

SparseMass polish(const MasterState& state, const Instance& permuted, const Strides& strides,
                  const lp::Options& options) {
  std::vector<CombinationIndex> support;
  for (const DWColumn& col : state.columns) {
    for (const auto& [h, mass] : col.p) support.push_back(h);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  lp::SparseLP lp(strides.num_rows());
  std::vector<lp::Entry> entries;
  std::vector<int> indices(strides.num_measures());
  for (CombinationIndex h : support) {
    entries.clear();
    for (std::size_t i = 0; i < strides.num_measures(); ++i) {
      indices[i] = strides.component(h, i);
      entries.emplace_back(strides.row_offsets[i] + indices[i], 1.0);
    }
    lp.add_column(combination_cost(indices, permuted), entries);
  }
  const lp::Solution sol = lp::solve(lp, marginal_vector(permuted), std::nullopt, options);
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalError(std::string("polish LP ended ") + lp::to_string(sol.status));
  }
  SparseMass w;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (sol.x[k] > kMassZeroTol) w.add(support[k], sol.x[k]);
  }
  return w;
}

std::uint64_t master_storage_bytes(const MasterState& state) {
  std::uint64_t bytes = 0;
  for (const DWColumn& col : state.columns) {
    bytes += col.amp.capacity() * sizeof(double);
    bytes += col.p.nonzeros() * (sizeof(CombinationIndex) + sizeof(double));
  }
  return bytes;
}

}  // namespace wbary
