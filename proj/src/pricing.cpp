#include "wbary/pricing.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "wbary/errors.hpp"

namespace wbary {

Partition choose_partition(const Instance& inst, PairVariant variant) {
  const int n = static_cast<int>(inst.num_measures());
  if (n < 3) throw ContractError("pricing partition needs at least three measures");
  const auto sizes = inst.sizes();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto size_of = [&](int i) { return sizes[static_cast<std::size_t>(i)]; };
  switch (variant) {
    case PairVariant::kAny:
      break;
    case PairVariant::kLarge:
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return size_of(a) > size_of(b); });
      break;
    case PairVariant::kSmall:
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return size_of(a) < size_of(b); });
      break;
  }
  Partition p;
  p.pair = {std::min(order[0], order[1]), std::max(order[0], order[1])};
  p.perm = {p.pair[0], p.pair[1]};
  for (int i = 0; i < n; ++i) {
    if (i != p.pair[0] && i != p.pair[1]) p.perm.push_back(i);
  }
  p.n_u = static_cast<std::uint64_t>(size_of(p.pair[0])) * static_cast<std::uint64_t>(size_of(p.pair[1]));
  const std::vector<int> permuted_sizes = [&] {
    std::vector<int> s;
    for (int k : p.perm) s.push_back(size_of(k));
    return s;
  }();
  p.n_d = make_strides(permuted_sizes).total / p.n_u;
  return p;
}

std::uint64_t pricing_state_bytes(const Strides& strides, const Partition& partition) {
  return strides.total * 2 * sizeof(double) +
         partition.n_u * (sizeof(double) + sizeof(CombinationIndex));
}

int master_row_count(const Strides& strides) {
  return strides.num_rows() - strides.row_offsets[2];
}

namespace {

// Writes c_h for every h in combination order, using
// c_h = sum_i lambda_i |x_i|^2 - |sum_i lambda_i x_i|^2 on coordinates
// centred at the mean of all support points.
void fill_costs(const Instance& inst, const Strides& strides, std::span<double> out) {
  const std::size_t n = inst.num_measures();
  const std::size_t dim = inst.dim();
  Point centre(dim, 0.0);
  std::size_t count = 0;
  for (const auto& m : inst.measures) {
    for (const auto& x : m.points) {
      for (std::size_t k = 0; k < dim; ++k) centre[k] += x[k];
      ++count;
    }
  }
  for (double& v : centre) v /= static_cast<double>(count);

  // Scaled, centred points and their weighted squared norms.
  std::vector<std::vector<double>> scaled(n);
  std::vector<std::vector<double>> moment(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = inst.measures[i];
    const double lambda = inst.lambdas[i];
    scaled[i].resize(m.size() * dim);
    moment[i].resize(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double v = m.points[j][k] - centre[k];
        scaled[i][j * dim + k] = lambda * v;
        sq += v * v;
      }
      moment[i][j] = lambda * sq;
    }
  }

  // Odometer over the first n - 1 measures with running partial sums; the
  // last measure is the innermost contiguous loop.
  std::vector<double> mean((n + 1) * dim, 0.0);
  std::vector<double> second(n + 1, 0.0);
  std::vector<int> digit(n, 0);
  const std::size_t last = n - 1;
  const auto inner = static_cast<std::size_t>(strides.sizes[last]);
  auto refresh = [&](std::size_t from) {
    for (std::size_t i = from; i < last; ++i) {
      const auto j = static_cast<std::size_t>(digit[i]);
      second[i + 1] = second[i] + moment[i][j];
      for (std::size_t k = 0; k < dim; ++k) mean[(i + 1) * dim + k] = mean[i * dim + k] + scaled[i][j * dim + k];
    }
  };
  refresh(0);
  std::size_t h = 0;
  while (true) {
    const double* base = &mean[last * dim];
    for (std::size_t j = 0; j < inner; ++j) {
      double norm = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double v = base[k] + scaled[last][j * dim + k];
        norm += v * v;
      }
      out[h++] = std::max(0.0, second[last] + moment[last][j] - norm);
    }
    // Advance the odometer over measures [0, last).
    std::size_t i = last;
    while (i-- > 0) {
      if (++digit[i] < strides.sizes[i]) break;
      digit[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
    refresh(i);
  }
}

// One pass over a: the trailing measures whose strides fit in a small table
// are summed once into `tail`, the leading ones are added per block.
void subtract_row_duals(std::span<double> a, std::span<const double> delta,
                        const Strides& strides) {
  constexpr std::uint64_t kTailLimit = 8192;
  const std::size_t n = strides.num_measures();
  const int base = strides.row_offsets[2];
  auto dual = [&](std::size_t i, int j) {
    return delta[static_cast<std::size_t>(strides.row_offsets[i] - base + j)];
  };
  std::size_t split = 2;
  while (split < n && strides.n_o[split - 1] > kTailLimit) ++split;
  const std::uint64_t width = strides.n_o[split - 1];
  std::vector<double> tail(width, 0.0);
  for (std::size_t i = split; i < n; ++i) {
    const std::uint64_t run = strides.n_o[i];
    const auto size = static_cast<std::uint64_t>(strides.sizes[i]);
    for (std::uint64_t t = 0; t < width; ++t) tail[t] += dual(i, static_cast<int>((t / run) % size));
  }
  std::vector<int> index(split, 0);
  double* data = a.data();
  for (std::uint64_t start = 0; start < strides.total; start += width) {
    double outer = 0.0;
    for (std::size_t i = 2; i < split; ++i) outer += dual(i, index[i]);
    double* p = data + start;
    for (std::uint64_t t = 0; t < width; ++t) p[t] -= outer + tail[t];
    for (std::size_t i = split; i-- > 0;) {
      if (++index[i] < strides.sizes[i]) break;
      index[i] = 0;
    }
  }
}

}  // namespace

PricingState init_reduced_costs(const Instance& permuted, const Partition& partition,
                                const Strides& strides, std::uint64_t memory_cap) {
  const std::uint64_t bytes = pricing_state_bytes(strides, partition);
  if (bytes > memory_cap) {
    throw CapacityError("pricing state for N = " + std::to_string(strides.total) +
                        " combinations needs " + std::to_string(bytes) +
                        " bytes, above the memory cap of " + std::to_string(memory_cap));
  }
  PricingState state;
  state.cost.resize(strides.total);
  fill_costs(permuted, strides, state.cost);
  state.reduced = state.cost;
  state.best.resize(partition.n_u);
  state.argmin.resize(partition.n_u);
  state.y.assign(static_cast<std::size_t>(master_row_count(strides)), 0.0);
  best_costs(state, partition);
  return state;
}

void update_reduced_costs(PricingState& state, std::span<const double> y_old,
                          std::span<const double> y_new, const Strides& strides) {
  const auto rows = static_cast<std::size_t>(master_row_count(strides));
  if (y_old.size() != rows || y_new.size() != rows) {
    throw ContractError("dual vector length does not match the master rows");
  }
  std::vector<double> delta(rows);
  for (std::size_t r = 0; r < rows; ++r) delta[r] = y_new[r] - y_old[r];
  subtract_row_duals(state.reduced, delta, strides);
  state.y.assign(y_new.begin(), y_new.end());
}

void recompute_reduced_costs(PricingState& state, std::span<const double> y,
                             const Strides& strides) {
  if (y.size() != static_cast<std::size_t>(master_row_count(strides))) {
    throw ContractError("dual vector length does not match the master rows");
  }
  std::copy(state.cost.begin(), state.cost.end(), state.reduced.begin());
  subtract_row_duals(state.reduced, y, strides);
  state.y.assign(y.begin(), y.end());
}

void best_costs(PricingState& state, const Partition& partition) {
  const std::uint64_t nd = partition.n_d;
  const double* a = state.reduced.data();
  for (std::uint64_t j = 0; j < partition.n_u; ++j) {
    const std::uint64_t begin = j * nd;
    std::uint64_t arg = begin;
    double best = a[begin];
    for (std::uint64_t h = begin + 1; h < begin + nd; ++h) {
      if (a[h] < best) {
        best = a[h];
        arg = h;
      }
    }
    state.best[j] = best;
    state.argmin[j] = arg;
  }
}

PricingResult solve_pricing(const PricingState& state, const Partition& partition,
                            const Instance& permuted, const TransportOptions& options) {
  TransportationProblem tp;
  tp.supplies = permuted.measures[0].masses;
  tp.demands = permuted.measures[1].masses;
  if (static_cast<std::uint64_t>(tp.supplies.size() * tp.demands.size()) != partition.n_u) {
    throw ContractError("pricing state does not match the permuted instance");
  }
  tp.costs.assign(state.best.begin(), state.best.end());
  PricingResult result;
  result.plan = solve_transportation(tp, options);
  result.objective = result.plan.objective + state.sigma;
  return result;
}

SparseMass expand_column(const TransportPlan& plan, const PricingState& state,
                         const Partition& partition, const Strides& strides) {
  const auto cols = static_cast<std::uint64_t>(strides.sizes[1]);
  SparseMass p;
  for (const Flow& f : plan.flows) {
    const std::uint64_t j = static_cast<std::uint64_t>(f.row) * cols + static_cast<std::uint64_t>(f.col);
    if (j >= partition.n_u) throw IndexError("flow outside the pricing problem");
    p.add(state.argmin[j], f.mass);
  }
  return p;
}

}  // namespace wbary
