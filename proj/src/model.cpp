#include "wbary/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wbary/errors.hpp"

namespace wbary {

std::vector<int> Instance::sizes() const {
  std::vector<int> out;
  out.reserve(measures.size());
  for (const auto& m : measures) out.push_back(static_cast<int>(m.size()));
  return out;
}

int Instance::total_points() const {
  int rows = 0;
  for (const auto& m : measures) rows += static_cast<int>(m.size());
  return rows;
}

void validate(const Instance& inst) {
  if (inst.measures.empty()) throw ContractError("instance has no measures");
  if (inst.lambdas.size() != inst.measures.size()) {
    throw ContractError("instance has " + std::to_string(inst.measures.size()) +
                        " measures but " + std::to_string(inst.lambdas.size()) +
                        " weights");
  }
  const std::size_t dim = inst.measures.front().dim();
  if (dim == 0) throw ContractError("measure 0: points must have dimension >= 1");
  for (std::size_t i = 0; i < inst.measures.size(); ++i) {
    const auto& m = inst.measures[i];
    const std::string where = "measure " + std::to_string(i) + ": ";
    if (m.points.empty()) throw ContractError(where + "no support points");
    if (m.points.size() != m.masses.size()) {
      throw ContractError(where + std::to_string(m.points.size()) + " points but " +
                          std::to_string(m.masses.size()) + " masses");
    }
    for (std::size_t j = 0; j < m.points.size(); ++j) {
      if (m.points[j].size() != dim) {
        throw ContractError(where + "point " + std::to_string(j) + " has dimension " +
                            std::to_string(m.points[j].size()) + ", expected " +
                            std::to_string(dim));
      }
      for (double x : m.points[j]) {
        if (!std::isfinite(x)) {
          throw ContractError(where + "point " + std::to_string(j) +
                              " has a non-finite coordinate");
        }
      }
      if (!(m.masses[j] > 0.0) || !std::isfinite(m.masses[j])) {
        throw ContractError(where + "mass " + std::to_string(j) +
                            " must be positive and finite");
      }
    }
    const double sum = std::accumulate(m.masses.begin(), m.masses.end(), 0.0);
    if (std::abs(sum - 1.0) > kProbabilitySumTol) {
      throw ContractError(where + "masses sum to " + std::to_string(sum) +
                          ", expected 1");
    }
  }
  double lsum = 0.0;
  for (std::size_t i = 0; i < inst.lambdas.size(); ++i) {
    const double l = inst.lambdas[i];
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw ContractError("weight " + std::to_string(i) + " must be nonnegative");
    }
    lsum += l;
  }
  if (std::abs(lsum - 1.0) > kProbabilitySumTol) {
    throw ContractError("weights sum to " + std::to_string(lsum) + ", expected 1");
  }
}

Instance permute(const Instance& inst, std::span<const int> perm) {
  if (perm.size() != inst.measures.size()) {
    throw ContractError("permutation length does not match measure count");
  }
  Instance out;
  out.measures.reserve(perm.size());
  out.lambdas.reserve(perm.size());
  for (int k : perm) {
    out.measures.push_back(inst.measures.at(static_cast<std::size_t>(k)));
    out.lambdas.push_back(inst.lambdas.at(static_cast<std::size_t>(k)));
  }
  return out;
}

Strides make_strides(std::span<const int> sizes) {
  if (sizes.empty()) throw ContractError("at least one measure is required");
  Strides s;
  s.sizes.assign(sizes.begin(), sizes.end());
  const std::size_t n = sizes.size();
  s.n_o.assign(n, 1);
  std::uint64_t run = 1;
  for (std::size_t k = n; k-- > 0;) {
    if (sizes[k] < 1) {
      throw ContractError("measure " + std::to_string(k) + " has no support points");
    }
    s.n_o[k] = run;
    const auto size = static_cast<std::uint64_t>(sizes[k]);
    if (run > std::numeric_limits<std::uint64_t>::max() / size) {
      throw CapacityError("number of combinations exceeds 64 bits");
    }
    run *= size;
  }
  s.total = run;
  s.row_offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) s.row_offsets[i + 1] = s.row_offsets[i] + sizes[i];
  return s;
}

namespace {

void check_index(CombinationIndex h, const Strides& strides) {
  if (h >= strides.total) {
    throw IndexError("combination index " + std::to_string(h) + " out of range [0, " +
                     std::to_string(strides.total) + ")");
  }
}

}  // namespace

std::vector<int> column_support(CombinationIndex h, const Strides& strides) {
  check_index(h, strides);
  const std::size_t n = strides.num_measures();
  std::vector<int> rows(n);
  // Measure i's row is fixed by the run of n_o[i] ones that h falls in.
  rows[0] = static_cast<int>(h / strides.n_o[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const std::uint64_t block = strides.n_o[i - 1];
    rows[i] = strides.row_offsets[i] + static_cast<int>((h % block) / strides.n_o[i]);
  }
  return rows;
}

Combination tuple_of(CombinationIndex h, const Strides& strides) {
  check_index(h, strides);
  Combination c;
  c.h = h;
  c.indices.resize(strides.num_measures());
  for (std::size_t i = 0; i < strides.num_measures(); ++i) c.indices[i] = strides.component(h, i);
  return c;
}

CombinationIndex index_of(std::span<const int> indices, const Strides& strides) {
  if (indices.size() != strides.num_measures()) {
    throw IndexError("tuple has " + std::to_string(indices.size()) +
                     " components, expected " + std::to_string(strides.num_measures()));
  }
  CombinationIndex h = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= strides.sizes[i]) {
      throw IndexError("component " + std::to_string(i) + " = " +
                       std::to_string(indices[i]) + " out of range [0, " +
                       std::to_string(strides.sizes[i]) + ")");
    }
    h += static_cast<CombinationIndex>(indices[i]) * strides.n_o[i];
  }
  return h;
}

Point weighted_mean(std::span<const int> indices, const Instance& inst) {
  Point mean(inst.dim(), 0.0);
  for (std::size_t i = 0; i < inst.measures.size(); ++i) {
    const Point& x = inst.measures[i].points[static_cast<std::size_t>(indices[i])];
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += inst.lambdas[i] * x[k];
  }
  return mean;
}

Point weighted_mean(const Combination& c, const Instance& inst) {
  return weighted_mean(c.indices, inst);
}

double combination_cost(std::span<const int> indices, const Instance& inst) {
  const Point mean = weighted_mean(indices, inst);
  double cost = 0.0;
  for (std::size_t i = 0; i < inst.measures.size(); ++i) {
    const Point& x = inst.measures[i].points[static_cast<std::size_t>(indices[i])];
    double sq = 0.0;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double diff = mean[k] - x[k];
      sq += diff * diff;
    }
    cost += inst.lambdas[i] * sq;
  }
  return cost;
}

double combination_cost(const Combination& c, const Instance& inst) {
  return combination_cost(c.indices, inst);
}

double combination_cost_closed_form(std::span<const int> indices, const Instance& inst) {
  const Point mean = weighted_mean(indices, inst);
  double second_moment = 0.0;
  for (std::size_t i = 0; i < inst.measures.size(); ++i) {
    const Point& x = inst.measures[i].points[static_cast<std::size_t>(indices[i])];
    double sq = 0.0;
    for (double v : x) sq += v * v;
    second_moment += inst.lambdas[i] * sq;
  }
  double mean_sq = 0.0;
  for (double v : mean) mean_sq += v * v;
  return second_moment - mean_sq;
}

void SparseMass::add(CombinationIndex h, double mass) {
  auto [it, inserted] = entries_.try_emplace(h, mass);
  if (!inserted) it->second += mass;
  if (it->second <= kMassZeroTol) entries_.erase(it);
}

double SparseMass::at(CombinationIndex h) const {
  const auto it = entries_.find(h);
  return it == entries_.end() ? 0.0 : it->second;
}

double SparseMass::total() const {
  double sum = 0.0;
  for (const auto& [h, m] : entries_) sum += m;
  return sum;
}

void SparseMass::prune(double tol) {
  std::erase_if(entries_, [tol](const auto& e) { return e.second <= tol; });
}

std::vector<double> marginal_vector(const Instance& inst) {
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(inst.total_points()));
  for (const auto& m : inst.measures) d.insert(d.end(), m.masses.begin(), m.masses.end());
  return d;
}

std::vector<double> marginal_residual(const SparseMass& w, const Instance& inst,
                                      const Strides& strides) {
  std::vector<double> r(static_cast<std::size_t>(strides.num_rows()), 0.0);
  for (const auto& [h, mass] : w) {
    for (int row : column_support(h, strides)) r[static_cast<std::size_t>(row)] += mass;
  }
  const auto d = marginal_vector(inst);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= d[k];
  return r;
}

bool is_feasible(const SparseMass& w, const Instance& inst, const Strides& strides,
                 double tol) {
  for (const auto& [h, mass] : w) {
    if (mass < 0.0) return false;
  }
  for (double r : marginal_residual(w, inst, strides)) {
    if (std::abs(r) > tol) return false;
  }
  return true;
}

double transport_cost(const SparseMass& w, const Instance& inst, const Strides& strides) {
  double cost = 0.0;
  for (const auto& [h, mass] : w) cost += mass * combination_cost(tuple_of(h, strides), inst);
  return cost;
}

SparseMass remap(const SparseMass& w, const Strides& from, const Strides& to,
                 std::span<const int> perm) {
  SparseMass out;
  std::vector<int> mapped(perm.size());
  for (const auto& [h, mass] : w) {
    const Combination c = tuple_of(h, from);
    for (std::size_t k = 0; k < perm.size(); ++k) {
      mapped[k] = c.indices[static_cast<std::size_t>(perm[k])];
    }
    out.add(index_of(mapped, to), mass);
  }
  return out;
}

}  // namespace wbary
