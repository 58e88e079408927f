#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wbary/memory.hpp"

namespace wbary {

using Point = std::vector<double>;
using CombinationIndex = std::uint64_t;

// Masses at or below this are treated as zero everywhere.
inline constexpr double kMassZeroTol = 1e-12;
// Allowed deviation of a probability vector's sum from one.
inline constexpr double kProbabilitySumTol = 1e-12;
// Tolerance of the marginal feasibility predicate A w = d.
inline constexpr double kFeasibilityTol = 1e-9;

struct DiscreteMeasure {
  std::vector<Point> points;
  std::vector<double> masses;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

struct Instance {
  std::vector<DiscreteMeasure> measures;
  std::vector<double> lambdas;

  std::size_t num_measures() const { return measures.size(); }
  std::size_t dim() const { return measures.empty() ? 0 : measures.front().dim(); }
  std::vector<int> sizes() const;
  // Total number of support points, i.e. the number of rows of A.
  int total_points() const;
};

// Throws ContractError naming the offending measure when an invariant of
// DiscreteMeasure or Instance does not hold.
void validate(const Instance& inst);

// Reorders measures (and weights) so that position k holds measure perm[k].
Instance permute(const Instance& inst, std::span<const int> perm);

/// Consecutive-ones structure of the implicit constraint matrix A.
///
/// Row block i of A (the constraints of measure i) has runs of n_o[i]
/// consecutive ones; n_o[i] is the product of the sizes of all later
/// measures, and the last block is an identity pattern (n_o = 1).
struct Strides {
  std::vector<int> sizes;
  std::vector<std::uint64_t> n_o;
  std::uint64_t total = 0;
  // row_offsets[i] is the first row of measure i; row_offsets[n] = rows.
  std::vector<int> row_offsets;

  std::size_t num_measures() const { return sizes.size(); }
  int num_rows() const { return row_offsets.back(); }

  // Local point index of measure i in combination h.
  int component(CombinationIndex h, std::size_t i) const {
    return static_cast<int>((h / n_o[i]) % static_cast<std::uint64_t>(sizes[i]));
  }
};

// Throws CapacityError when the product of sizes does not fit in 64 bits and
// ContractError when a size is not positive.
Strides make_strides(std::span<const int> sizes);

struct Combination {
  std::vector<int> indices;
  CombinationIndex h = 0;
};

// Row indices (0-based, strictly increasing) of the n ones in column h of A.
std::vector<int> column_support(CombinationIndex h, const Strides& strides);

Combination tuple_of(CombinationIndex h, const Strides& strides);
CombinationIndex index_of(std::span<const int> indices, const Strides& strides);

Point weighted_mean(const Combination& c, const Instance& inst);
Point weighted_mean(std::span<const int> indices, const Instance& inst);

// c_h = sum_i lambda_i * |x^h - x_i^h|^2, evaluated directly.
double combination_cost(const Combination& c, const Instance& inst);
double combination_cost(std::span<const int> indices, const Instance& inst);
// Same quantity via sum_i lambda_i |x_i^h|^2 - |x^h|^2.
double combination_cost_closed_form(std::span<const int> indices,
                                    const Instance& inst);

// Sparse nonnegative vector over combination indices.
class SparseMass {
 public:
  using Map = tracked_map<CombinationIndex, double>;

  // Accumulates mass at h; entries that end up at or below kMassZeroTol are
  // dropped.
  void add(CombinationIndex h, double mass);
  double at(CombinationIndex h) const;
  double total() const;
  std::size_t nonzeros() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }
  void prune(double tol = kMassZeroTol);

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  Map entries_;
};

// The right-hand side d of A w = d: masses of all measures concatenated.
std::vector<double> marginal_vector(const Instance& inst);

// Per-row residual A w - d, computed without materializing A.
std::vector<double> marginal_residual(const SparseMass& w, const Instance& inst,
                                      const Strides& strides);

bool is_feasible(const SparseMass& w, const Instance& inst,
                 const Strides& strides, double tol = kFeasibilityTol);

// Sum over h of w(h) * c_h.
double transport_cost(const SparseMass& w, const Instance& inst,
                      const Strides& strides);

// Re-indexes w from the combination space of `from` into `to`, where
// to.sizes[k] == from.sizes[perm[k]].
SparseMass remap(const SparseMass& w, const Strides& from, const Strides& to,
                 std::span<const int> perm);

}  // namespace wbary
