#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace wbary::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(Status s);

using Entry = std::pair<int, double>;

// Basic variables, one per row. Values >= 0 are structural columns; the
// artificial variable of row r is encoded as -(r + 1) so that a basis stays
// meaningful after columns are appended to the problem.
struct Basis {
  std::vector<std::int64_t> basic;

  static constexpr std::int64_t artificial(int row) { return -(static_cast<std::int64_t>(row) + 1); }
  static constexpr bool is_artificial(std::int64_t v) { return v < 0; }
  static constexpr int artificial_row(std::int64_t v) { return static_cast<int>(-v - 1); }
};

// Column-wise view of min c^T x s.t. A x = b, x >= 0. Columns may be
// generated on demand; nothing here requires A to be stored.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;

  virtual int num_rows() const = 0;
  virtual std::int64_t num_cols() const = 0;
  virtual double cost(std::int64_t j) const = 0;
  // Replaces `out` with the nonzeros of column j.
  virtual void column(std::int64_t j, std::vector<Entry>& out) const = 0;

  // out[j] = (include_cost ? c_j : 0) - pi^T A_j for every column j. The
  // default walks column(); implicit sources override it with something
  // faster.
  virtual void price(std::span<const double> pi, bool include_cost,
                     std::span<double> out) const;
};

struct DenseLP {
  std::vector<double> cost;
  std::vector<double> a;  // row-major, rows x cols
  std::vector<double> rhs;
  int rows = 0;
  int cols = 0;

  DenseLP() = default;
  DenseLP(int rows_, int cols_)
      : cost(static_cast<std::size_t>(cols_), 0.0),
        a(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0),
        rhs(static_cast<std::size_t>(rows_), 0.0),
        rows(rows_),
        cols(cols_) {}

  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Explicit compressed-column problem.
class SparseLP final : public ColumnSource {
 public:
  explicit SparseLP(int rows) : rows_(rows) { start_.push_back(0); }

  std::int64_t add_column(double cost, std::span<const Entry> entries);

  int num_rows() const override { return rows_; }
  std::int64_t num_cols() const override { return static_cast<std::int64_t>(cost_.size()); }
  double cost(std::int64_t j) const override { return cost_[static_cast<std::size_t>(j)]; }
  void column(std::int64_t j, std::vector<Entry>& out) const override;
  void price(std::span<const double> pi, bool include_cost,
             std::span<double> out) const override;

 private:
  int rows_;
  std::vector<double> cost_;
  std::vector<std::size_t> start_;
  std::vector<int> row_;
  std::vector<double> val_;
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_streak = 50;
  int refactor_period = 100;
  std::int64_t max_iterations = 10'000'000;
};

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<double> x;
  // Row duals y with c_j - y^T A_j >= 0 at optimality.
  std::vector<double> duals;
  double objective = 0.0;
  Basis basis;
  std::int64_t iterations = 0;
  bool warm_started = false;
};

// Two-phase primal simplex. A warm basis that factorizes and is primal
// feasible skips Phase I; otherwise the solve starts cold. Throws
// NumericalError when a basis cannot be refactorized.
Solution solve(const ColumnSource& lp, std::span<const double> rhs,
               const std::optional<Basis>& warm = std::nullopt,
               const Options& options = {});

Solution solve(const DenseLP& lp, const std::optional<Basis>& warm = std::nullopt,
               const Options& options = {});

}  // namespace wbary::lp
