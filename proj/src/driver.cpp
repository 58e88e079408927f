#include "wbary/driver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "wbary/errors.hpp"
#include "wbary/init.hpp"
#include "wbary/master.hpp"
#include "wbary/simplex.hpp"
#include "wbary/transport.hpp"

namespace wbary {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Implicit column source for the full LP: column h has a one in the row of
// each of its n support points.
class ImplicitBarycenterLP final : public lp::ColumnSource {
 public:
  ImplicitBarycenterLP(const Instance& inst, const Strides& strides)
      : strides_(strides), cost_(strides.total) {
    std::vector<int> indices(strides.num_measures());
    for (CombinationIndex h = 0; h < strides.total; ++h) {
      for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = strides.component(h, i);
      cost_[h] = combination_cost(indices, inst);
    }
  }

  int num_rows() const override { return strides_.num_rows(); }
  std::int64_t num_cols() const override { return static_cast<std::int64_t>(strides_.total); }
  double cost(std::int64_t j) const override { return cost_[static_cast<std::size_t>(j)]; }
  void column(std::int64_t j, std::vector<lp::Entry>& out) const override {
    out.clear();
    for (int r : column_support(static_cast<CombinationIndex>(j), strides_)) out.emplace_back(r, 1.0);
  }
  void price(std::span<const double> pi, bool include_cost, std::span<double> out) const override {
    if (include_cost) {
      std::copy(cost_.begin(), cost_.end(), out.begin());
    } else {
      std::fill(out.begin(), out.end(), 0.0);
    }
    for (std::size_t i = 0; i < strides_.num_measures(); ++i) {
      const std::uint64_t run = strides_.n_o[i];
      const auto size = static_cast<std::uint64_t>(strides_.sizes[i]);
      const double* y = pi.data() + strides_.row_offsets[i];
      for (std::uint64_t start = 0; start < strides_.total; start += run * size) {
        for (std::uint64_t j = 0; j < size; ++j) {
          const double v = y[j];
          double* p = out.data() + start + j * run;
          for (std::uint64_t t = 0; t < run; ++t) p[t] -= v;
        }
      }
    }
  }

 private:
  const Strides& strides_;
  tracked_vector<double> cost_;
};

std::vector<int> inverse(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
  return inv;
}

void finalize(SolveResult& result, const Instance& inst, const Strides& strides) {
  result.barycenter = make_barycenter(result.w, inst, strides);
  result.objective = transport_cost(result.w, inst, strides);
}

SolveResult solve_single(const Instance& inst, const Strides& strides) {
  SolveResult result;
  for (std::size_t j = 0; j < inst.measures[0].size(); ++j) {
    result.w.add(static_cast<CombinationIndex>(j), inst.measures[0].masses[j]);
  }
  result.converged = true;
  result.raw_support = result.w.nonzeros();
  finalize(result, inst, strides);
  return result;
}

// Two measures: the whole problem is one transportation problem whose cells
// are the combinations.
SolveResult solve_pair(const Instance& inst, const Strides& strides) {
  const auto t0 = Clock::now();
  TransportationProblem tp;
  tp.supplies = inst.measures[0].masses;
  tp.demands = inst.measures[1].masses;
  tp.costs.resize(strides.total);
  const int cols = strides.sizes[1];
  for (int a = 0; a < strides.sizes[0]; ++a) {
    for (int b = 0; b < cols; ++b) {
      const int idx[] = {a, b};
      tp.costs[static_cast<std::size_t>(a) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(b)] =
          combination_cost(idx, inst);
    }
  }
  const TransportPlan plan = solve_transportation(tp);
  SolveResult result;
  for (const Flow& f : plan.flows) {
    result.w.add(static_cast<CombinationIndex>(f.row) * static_cast<CombinationIndex>(cols) +
                     static_cast<CombinationIndex>(f.col),
                 f.mass);
  }
  result.converged = true;
  result.timings.solve_pricing = seconds_since(t0);
  result.raw_support = result.w.nonzeros();
  finalize(result, inst, strides);
  result.rm_objective = result.objective;
  return result;
}

}  // namespace

const char* to_string(StartMethod s) {
  return s == StartMethod::kGreedy ? "greedy" : "2app";
}

const char* to_string(PairVariant v) {
  switch (v) {
    case PairVariant::kAny:
      return "any";
    case PairVariant::kLarge:
      return "large";
    case PairVariant::kSmall:
      return "small";
  }
  return "unknown";
}

std::vector<BarycenterPoint> make_barycenter(const SparseMass& w, const Instance& inst,
                                             const Strides& strides) {
  std::vector<BarycenterPoint> out;
  out.reserve(w.nonzeros());
  for (const auto& [h, mass] : w) {
    Combination c = tuple_of(h, strides);
    out.push_back({weighted_mean(c, inst), mass, std::move(c.indices)});
  }
  return out;
}

std::uint64_t explicit_lp_bytes(const Strides& strides) {
  const std::uint64_t per_nonzero = sizeof(std::int32_t) + sizeof(double);
  const std::uint64_t per_column = sizeof(std::int64_t) + 3 * sizeof(double);
  return strides.total * (strides.num_measures() * per_nonzero + per_column);
}

SolveResult solve(const Instance& inst, const SolveConfig& cfg) {
  validate(inst);
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.recompute_period < 1) {
    throw ContractError("invalid solver configuration");
  }
  const Strides strides = make_strides(inst.sizes());
  const std::int64_t baseline = MemoryAccount::current();
  MemoryAccount::reset_peak();

  if (inst.num_measures() == 1) return solve_single(inst, strides);
  if (inst.num_measures() == 2) {
    SolveResult r = solve_pair(inst, strides);
    r.peak_memory_bytes = MemoryAccount::peak() - baseline;
    return r;
  }

  const Partition partition = choose_partition(inst, cfg.pair_variant);
  const Instance permuted = permute(inst, partition.perm);
  const Strides pstrides = make_strides(permuted.sizes());
  if (pricing_state_bytes(pstrides, partition) > cfg.memory_cap) {
    throw CapacityError("N = " + std::to_string(strides.total) + " combinations need " +
                        std::to_string(pricing_state_bytes(pstrides, partition)) +
                        " bytes of reduced costs, above the memory cap of " +
                        std::to_string(cfg.memory_cap));
  }

  SolveResult result;
  auto t0 = Clock::now();
  // Initial vertex in the input order, so every pair variant with the same
  // start begins from the same point.
  SparseMass p1 = cfg.start == StartMethod::kGreedy ? greedy_vertex(inst)
                                                    : repair_to_vertex(two_approx(inst), inst);
  p1 = remap(p1, strides, pstrides, partition.perm);
  PricingState pricing = init_reduced_costs(permuted, partition, pstrides, cfg.memory_cap);
  result.init_seconds = seconds_since(t0);

  t0 = Clock::now();
  MasterState master = init_rm(p1, permuted, pstrides);
  result.timings.solve_rm += seconds_since(t0);

  std::vector<double> y_prev(pricing.y);
  std::int64_t iter = 0;
  double last_rm = master.objective;
  while (true) {
    t0 = Clock::now();
    if (iter > 0 && iter % cfg.recompute_period == 0) {
      recompute_reduced_costs(pricing, master.y, pstrides);
    } else {
      update_reduced_costs(pricing, y_prev, master.y, pstrides);
    }
    y_prev = master.y;
    pricing.sigma = master.sigma;
    result.timings.update_reduced_costs += seconds_since(t0);

    t0 = Clock::now();
    best_costs(pricing, partition);
    result.timings.calc_best_costs += seconds_since(t0);

    t0 = Clock::now();
    const PricingResult priced = solve_pricing(pricing, partition, permuted);
    result.timings.solve_pricing += seconds_since(t0);

    result.trace.push_back({iter, master.objective, priced.objective});
    if (priced.objective >= -cfg.tol) {
      result.converged = true;
      break;
    }
    if (iter >= cfg.max_iter) break;

    t0 = Clock::now();
    add_column(master, expand_column(priced.plan, pricing, partition, pstrides), permuted, pstrides);
    result.timings.setup_rm += seconds_since(t0);

    t0 = Clock::now();
    solve_rm(master);
    result.timings.solve_rm += seconds_since(t0);
    ++iter;
    if (master.objective > last_rm + 1e-9 * (1.0 + std::abs(last_rm))) {
      throw NumericalError("restricted master objective increased from " +
                           std::to_string(last_rm) + " to " + std::to_string(master.objective));
    }
    last_rm = master.objective;
  }
  result.iterations = iter;
  result.rm_objective = master.objective;

  SparseMass w = recover_solution(master);
  result.raw_support = w.nonzeros();
  if (cfg.polish) {
    t0 = Clock::now();
    w = polish(master, permuted, pstrides);
    result.polish_seconds = seconds_since(t0);
  }
  result.w = remap(w, pstrides, strides, inverse(partition.perm));
  result.peak_memory_bytes = MemoryAccount::peak() - baseline;
  finalize(result, inst, strides);
  return result;
}

SolveResult solve_direct(const Instance& inst, const SolveConfig& cfg) {
  validate(inst);
  const Strides strides = make_strides(inst.sizes());
  if (strides.total > cfg.oracle_cap) {
    throw CapacityError("direct solve refused: N = " + std::to_string(strides.total) +
                        " combinations exceeds the cap of " + std::to_string(cfg.oracle_cap));
  }
  const std::int64_t baseline = MemoryAccount::current();
  MemoryAccount::reset_peak();
  const auto t0 = Clock::now();
  ImplicitBarycenterLP lp(inst, strides);
  const lp::Solution sol = lp::solve(lp, marginal_vector(inst));
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalError(std::string("direct LP ended ") + lp::to_string(sol.status));
  }
  SolveResult result;
  for (CombinationIndex h = 0; h < strides.total; ++h) {
    if (sol.x[h] > kMassZeroTol) result.w.add(h, sol.x[h]);
  }
  result.converged = true;
  result.iterations = sol.iterations;
  result.timings.solve_rm = seconds_since(t0);
  result.raw_support = result.w.nonzeros();
  result.peak_memory_bytes = MemoryAccount::peak() - baseline;
  finalize(result, inst, strides);
  result.rm_objective = sol.objective;
  return result;
}

}  // namespace wbary
