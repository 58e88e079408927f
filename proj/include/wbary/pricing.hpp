#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "wbary/memory.hpp"
#include "wbary/model.hpp"
#include "wbary/transport.hpp"

namespace wbary {

enum class PairVariant { kAny, kLarge, kSmall };

// The two measures whose constraints go to the pricing problem, and the
// measure order that puts them in front.
struct Partition {
  std::array<int, 2> pair{0, 1};
  // perm[k] = original position of the measure at permuted position k.
  std::vector<int> perm;
  std::uint64_t n_u = 0;  // |P_a| * |P_b| unique pricing columns
  std::uint64_t n_d = 0;  // duplicates of each unique column
};

// any: first two measures; large/small: two largest/smallest supports,
// ties broken by input order. Requires at least three measures.
Partition choose_partition(const Instance& inst, PairVariant variant);

// Bytes held by a PricingState for the given partition.
std::uint64_t pricing_state_bytes(const Strides& strides, const Partition& partition);

// All vectors live in the permuted combination space, where the duplicates
// of unique column j occupy [j * n_d, (j + 1) * n_d).
struct PricingState {
  tracked_vector<double> cost;                // c
  tracked_vector<double> reduced;             // a = c - A_m^T y
  tracked_vector<double> best;                // b, length n_u
  tracked_vector<CombinationIndex> argmin;    // I, length n_u
  std::vector<double> y;                      // duals currently folded into `reduced`
  double sigma = 0.0;
};

// Fills c for the permuted instance and sets a = c, y = 0, then computes
// b and I. Throws CapacityError before allocating when the state would
// exceed `memory_cap` bytes.
PricingState init_reduced_costs(const Instance& permuted, const Partition& partition,
                                const Strides& strides, std::uint64_t memory_cap);

// Number of master rows: the rows of every measure outside the pair.
int master_row_count(const Strides& strides);

// Applies a := a - A_m^T (y_new - y_old) touching only the runs of
// combinations that contain a changed row, then records y_new.
void update_reduced_costs(PricingState& state, std::span<const double> y_old,
                          std::span<const double> y_new, const Strides& strides);

// a := c - A_m^T y from scratch.
void recompute_reduced_costs(PricingState& state, std::span<const double> y,
                             const Strides& strides);

// b(j) = min over the duplicates of unique column j, I(j) its lowest argmin.
void best_costs(PricingState& state, const Partition& partition);

struct PricingResult {
  double objective = 0.0;  // transport objective + sigma
  TransportPlan plan;
};

// Solves the compressed pricing problem as a transportation problem between
// the two pair measures of the permuted instance.
PricingResult solve_pricing(const PricingState& state, const Partition& partition,
                            const Instance& permuted, const TransportOptions& options = {});

// Maps every flow on unique column j to mass at combination I(j).
SparseMass expand_column(const TransportPlan& plan, const PricingState& state,
                         const Partition& partition, const Strides& strides);

}  // namespace wbary
