#include "wbary/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wbary/errors.hpp"

namespace wbary::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
    case Status::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

void ColumnSource::price(std::span<const double> pi, bool include_cost,
                         std::span<double> out) const {
  std::vector<Entry> col;
  for (std::int64_t j = 0; j < num_cols(); ++j) {
    column(j, col);
    double d = include_cost ? cost(j) : 0.0;
    for (const auto& [r, v] : col) d -= pi[static_cast<std::size_t>(r)] * v;
    out[static_cast<std::size_t>(j)] = d;
  }
}

std::int64_t SparseLP::add_column(double cost, std::span<const Entry> entries) {
  for (const auto& [r, v] : entries) {
    if (r < 0 || r >= rows_) throw ContractError("SparseLP: row index out of range");
    if (v == 0.0) continue;
    row_.push_back(r);
    val_.push_back(v);
  }
  cost_.push_back(cost);
  start_.push_back(row_.size());
  return num_cols() - 1;
}

void SparseLP::column(std::int64_t j, std::vector<Entry>& out) const {
  out.clear();
  const auto jj = static_cast<std::size_t>(j);
  for (std::size_t p = start_[jj]; p < start_[jj + 1]; ++p) out.emplace_back(row_[p], val_[p]);
}

void SparseLP::price(std::span<const double> pi, bool include_cost,
                     std::span<double> out) const {
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    double d = include_cost ? cost_[j] : 0.0;
    for (std::size_t p = start_[j]; p < start_[j + 1]; ++p) {
      d -= pi[static_cast<std::size_t>(row_[p])] * val_[p];
    }
    out[j] = d;
  }
}

namespace {

class DenseColumns final : public ColumnSource {
 public:
  explicit DenseColumns(const DenseLP& lp) : lp_(lp) {}
  int num_rows() const override { return lp_.rows; }
  std::int64_t num_cols() const override { return lp_.cols; }
  double cost(std::int64_t j) const override { return lp_.cost[static_cast<std::size_t>(j)]; }
  void column(std::int64_t j, std::vector<Entry>& out) const override {
    out.clear();
    for (int r = 0; r < lp_.rows; ++r) {
      const double v = lp_.at(r, static_cast<int>(j));
      if (v != 0.0) out.emplace_back(r, v);
    }
  }

 private:
  const DenseLP& lp_;
};

constexpr double kDegenerateStep = 1e-12;
constexpr double kSingularPivot = 1e-11;
constexpr double kDriveOutPivot = 1e-7;

class PrimalSimplex {
 public:
  PrimalSimplex(const ColumnSource& lp, std::span<const double> rhs, const Options& opt)
      : lp_(lp), opt_(opt), m_(lp.num_rows()), k_(lp.num_cols()) {
    if (static_cast<int>(rhs.size()) != m_) throw ContractError("rhs length does not match rows");
    sign_.resize(static_cast<std::size_t>(m_));
    b_.resize(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) {
      const double v = rhs[static_cast<std::size_t>(r)];
      if (!std::isfinite(v)) throw ContractError("rhs is not finite");
      sign_[static_cast<std::size_t>(r)] = v < 0.0 ? -1.0 : 1.0;
      b_[static_cast<std::size_t>(r)] = std::abs(v);
    }
    const auto m = static_cast<std::size_t>(m_);
    binv_.assign(m * m, 0.0);
    xb_.assign(m, 0.0);
    alpha_.assign(m, 0.0);
    pi_.assign(m, 0.0);
    pi_orig_.assign(m, 0.0);
    dense_.assign(m, 0.0);
    basis_.assign(m, 0);
    in_basis_.assign(static_cast<std::size_t>(k_), 0);
    rc_.assign(static_cast<std::size_t>(k_), 0.0);
    b_scale_ = 1.0;
    for (double v : b_) b_scale_ += v;
  }

  Solution run(const std::optional<Basis>& warm) {
    Solution sol;
    bool warm_ok = warm.has_value() && try_warm(*warm);
    sol.warm_started = warm_ok;
    if (!warm_ok) {
      cold_basis();
      Status st = iterate(1);
      if (st == Status::kIterationLimit) return finish(st);
      double infeasibility = 0.0;
      for (int r = 0; r < m_; ++r) {
        if (Basis::is_artificial(basis_[static_cast<std::size_t>(r)])) {
          infeasibility += std::max(0.0, xb_[static_cast<std::size_t>(r)]);
        }
      }
      if (infeasibility > opt_.feasibility_tol * b_scale_) return finish(Status::kInfeasible);
      drive_out_artificials();
    }
    Status st = iterate(2);
    Solution out = finish(st);
    out.warm_started = warm_ok;
    return out;
  }

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(c);
  }

  // Column of variable v in sign-normalized row space.
  void load_column(std::int64_t v, std::vector<double>& dense) {
    std::fill(dense.begin(), dense.end(), 0.0);
    if (Basis::is_artificial(v)) {
      dense[static_cast<std::size_t>(Basis::artificial_row(v))] = 1.0;
      return;
    }
    lp_.column(v, colbuf_);
    for (const auto& [r, val] : colbuf_) {
      dense[static_cast<std::size_t>(r)] += sign_[static_cast<std::size_t>(r)] * val;
    }
  }

  std::int64_t bland_key(std::int64_t v) const {
    return Basis::is_artificial(v) ? k_ + Basis::artificial_row(v) : v;
  }

  double basic_cost(std::int64_t v, int phase) const {
    if (Basis::is_artificial(v)) return phase == 1 ? 1.0 : 0.0;
    return phase == 1 ? 0.0 : lp_.cost(v);
  }

  void cold_basis() {
    std::fill(in_basis_.begin(), in_basis_.end(), 0);
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int r = 0; r < m_; ++r) {
      basis_[static_cast<std::size_t>(r)] = Basis::artificial(r);
      binv_[idx(r, r)] = 1.0;
      xb_[static_cast<std::size_t>(r)] = b_[static_cast<std::size_t>(r)];
    }
    since_refactor_ = 0;
  }

  bool try_warm(const Basis& warm) {
    if (static_cast<int>(warm.basic.size()) != m_) return false;
    std::vector<char> seen_art(static_cast<std::size_t>(m_), 0);
    std::fill(in_basis_.begin(), in_basis_.end(), 0);
    for (int r = 0; r < m_; ++r) {
      const std::int64_t v = warm.basic[static_cast<std::size_t>(r)];
      if (Basis::is_artificial(v)) {
        const int row = Basis::artificial_row(v);
        if (row >= m_ || seen_art[static_cast<std::size_t>(row)]) return false;
        seen_art[static_cast<std::size_t>(row)] = 1;
      } else {
        if (v >= k_ || in_basis_[static_cast<std::size_t>(v)]) return false;
        in_basis_[static_cast<std::size_t>(v)] = 1;
      }
      basis_[static_cast<std::size_t>(r)] = v;
    }
    if (!refactor()) return false;
    for (int r = 0; r < m_; ++r) {
      const double x = xb_[static_cast<std::size_t>(r)];
      if (x < -opt_.feasibility_tol * b_scale_) return false;
      if (Basis::is_artificial(basis_[static_cast<std::size_t>(r)]) &&
          x > opt_.feasibility_tol * b_scale_) {
        return false;
      }
    }
    for (double& x : xb_) x = std::max(x, 0.0);
    for (int r = 0; r < m_; ++r) {
      if (Basis::is_artificial(basis_[static_cast<std::size_t>(r)])) xb_[static_cast<std::size_t>(r)] = 0.0;
    }
    return true;
  }

  // Rebuilds the basis inverse through an LU factorization with partial
  // pivoting and recomputes the basic primal values. Returns false when the
  // basis matrix is singular.
  bool refactor() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> lu(m * m, 0.0);  // row-major copy of B
    for (int c = 0; c < m_; ++c) {
      load_column(basis_[static_cast<std::size_t>(c)], dense_);
      for (int r = 0; r < m_; ++r) lu[idx(r, c)] = dense_[static_cast<std::size_t>(r)];
    }
    std::vector<int> piv(m);
    double scale = 0.0;
    for (double v : lu) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 && m_ > 0) return false;
    for (int c = 0; c < m_; ++c) {
      int best = c;
      for (int r = c + 1; r < m_; ++r) {
        if (std::abs(lu[idx(r, c)]) > std::abs(lu[idx(best, c)])) best = r;
      }
      if (std::abs(lu[idx(best, c)]) < kSingularPivot * scale) return false;
      piv[static_cast<std::size_t>(c)] = best;
      if (best != c) {
        for (int k = 0; k < m_; ++k) std::swap(lu[idx(c, k)], lu[idx(best, k)]);
      }
      const double d = lu[idx(c, c)];
      for (int r = c + 1; r < m_; ++r) {
        const double f = lu[idx(r, c)] / d;
        lu[idx(r, c)] = f;
        if (f == 0.0) continue;
        for (int k = c + 1; k < m_; ++k) lu[idx(r, k)] -= f * lu[idx(c, k)];
      }
    }
    // Solve B X = I column by column: P B = L U.
    std::vector<double> e(m);
    for (int col = 0; col < m_; ++col) {
      std::fill(e.begin(), e.end(), 0.0);
      e[static_cast<std::size_t>(col)] = 1.0;
      for (int c = 0; c < m_; ++c) std::swap(e[static_cast<std::size_t>(c)], e[static_cast<std::size_t>(piv[static_cast<std::size_t>(c)])]);
      for (int r = 0; r < m_; ++r) {
        double s = e[static_cast<std::size_t>(r)];
        for (int k = 0; k < r; ++k) s -= lu[idx(r, k)] * e[static_cast<std::size_t>(k)];
        e[static_cast<std::size_t>(r)] = s;
      }
      for (int r = m_ - 1; r >= 0; --r) {
        double s = e[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < m_; ++k) s -= lu[idx(r, k)] * e[static_cast<std::size_t>(k)];
        e[static_cast<std::size_t>(r)] = s / lu[idx(r, r)];
      }
      for (int r = 0; r < m_; ++r) binv_[idx(r, col)] = e[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < m_; ++r) {
      double s = 0.0;
      for (int c = 0; c < m_; ++c) s += binv_[idx(r, c)] * b_[static_cast<std::size_t>(c)];
      xb_[static_cast<std::size_t>(r)] = s;
    }
    since_refactor_ = 0;
    return true;
  }

  void refactor_or_throw(int phase) {
    if (!refactor()) throw NumericalError("simplex basis became singular");
    for (int r = 0; r < m_; ++r) {
      double& x = xb_[static_cast<std::size_t>(r)];
      if (x < 0.0 && x > -1e-7 * b_scale_) x = 0.0;
      if (phase == 2 && Basis::is_artificial(basis_[static_cast<std::size_t>(r)])) x = 0.0;
    }
  }

  void compute_pi(int phase) {
    std::fill(pi_.begin(), pi_.end(), 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = basic_cost(basis_[static_cast<std::size_t>(r)], phase);
      if (cb == 0.0) continue;
      for (int c = 0; c < m_; ++c) pi_[static_cast<std::size_t>(c)] += cb * binv_[idx(r, c)];
    }
    for (int r = 0; r < m_; ++r) {
      pi_orig_[static_cast<std::size_t>(r)] = sign_[static_cast<std::size_t>(r)] * pi_[static_cast<std::size_t>(r)];
    }
  }

  void compute_alpha(std::int64_t q) {
    load_column(q, dense_);
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    for (int c = 0; c < m_; ++c) {
      const double v = dense_[static_cast<std::size_t>(c)];
      if (v == 0.0) continue;
      for (int r = 0; r < m_; ++r) alpha_[static_cast<std::size_t>(r)] += binv_[idx(r, c)] * v;
    }
  }

  void pivot(int leave_row, std::int64_t q, double theta, int phase) {
    const auto lr = static_cast<std::size_t>(leave_row);
    for (int r = 0; r < m_; ++r) xb_[static_cast<std::size_t>(r)] -= theta * alpha_[static_cast<std::size_t>(r)];
    xb_[lr] = theta;
    const std::int64_t out = basis_[lr];
    if (!Basis::is_artificial(out)) in_basis_[static_cast<std::size_t>(out)] = 0;
    basis_[lr] = q;
    in_basis_[static_cast<std::size_t>(q)] = 1;

    const double p = alpha_[lr];
    for (int c = 0; c < m_; ++c) binv_[idx(leave_row, c)] /= p;
    for (int r = 0; r < m_; ++r) {
      if (r == leave_row) continue;
      const double f = alpha_[static_cast<std::size_t>(r)];
      if (f == 0.0) continue;
      for (int c = 0; c < m_; ++c) binv_[idx(r, c)] -= f * binv_[idx(leave_row, c)];
    }
    for (int r = 0; r < m_; ++r) {
      double& x = xb_[static_cast<std::size_t>(r)];
      if (x < 0.0) x = 0.0;
      if (phase == 2 && Basis::is_artificial(basis_[static_cast<std::size_t>(r)])) x = 0.0;
    }
    ++iterations_;
    if (++since_refactor_ >= opt_.refactor_period) refactor_or_throw(phase);
  }

  Status iterate(int phase) {
    bool bland = false;
    int streak = 0;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return Status::kIterationLimit;
      compute_pi(phase);
      lp_.price(pi_orig_, phase == 2, rc_);

      std::int64_t q = -1;
      double best = -opt_.optimality_tol;
      for (std::int64_t j = 0; j < k_; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        const double d = rc_[static_cast<std::size_t>(j)];
        if (bland) {
          if (d < -opt_.optimality_tol) {
            q = j;
            break;
          }
        } else if (d < best) {
          best = d;
          q = j;
        }
      }
      if (q < 0) return Status::kOptimal;

      compute_alpha(q);
      const int leave = bland ? ratio_test_bland(phase) : ratio_test_harris(phase);
      if (leave < 0) {
        if (phase == 1) throw NumericalError("phase one ratio test found no blocking row");
        return Status::kUnbounded;
      }
      const auto lr = static_cast<std::size_t>(leave);
      double theta = 0.0;
      if (!(phase == 2 && Basis::is_artificial(basis_[lr]))) {
        theta = std::max(xb_[lr], 0.0) / alpha_[lr];
      }
      if (theta <= kDegenerateStep) {
        if (++streak >= opt_.degenerate_streak) bland = true;
      } else {
        streak = 0;
        bland = false;
      }
      pivot(leave, q, theta, phase);
    }
  }

  bool fixed_at_zero(std::size_t r, int phase) const {
    return phase == 2 && Basis::is_artificial(basis_[r]);
  }

  int ratio_test_harris(int phase) {
    const double tol = opt_.feasibility_tol;
    double bound = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m_; ++r) {
      const auto rr = static_cast<std::size_t>(r);
      const double a = alpha_[rr];
      if (fixed_at_zero(rr, phase)) {
        if (std::abs(a) > opt_.pivot_tol) bound = std::min(bound, tol / std::abs(a));
      } else if (a > opt_.pivot_tol) {
        bound = std::min(bound, (std::max(xb_[rr], 0.0) + tol) / a);
      }
    }
    if (!std::isfinite(bound)) return -1;
    int leave = -1;
    double best_alpha = 0.0;
    for (int r = 0; r < m_; ++r) {
      const auto rr = static_cast<std::size_t>(r);
      const double a = alpha_[rr];
      double ratio;
      if (fixed_at_zero(rr, phase)) {
        if (std::abs(a) <= opt_.pivot_tol) continue;
        ratio = 0.0;
      } else {
        if (a <= opt_.pivot_tol) continue;
        ratio = std::max(xb_[rr], 0.0) / a;
      }
      if (ratio <= bound && std::abs(a) > best_alpha) {
        best_alpha = std::abs(a);
        leave = r;
      }
    }
    return leave;
  }

  int ratio_test_bland(int phase) {
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m_; ++r) {
      const auto rr = static_cast<std::size_t>(r);
      const double a = alpha_[rr];
      if (fixed_at_zero(rr, phase)) {
        if (std::abs(a) > opt_.pivot_tol) best_ratio = 0.0;
      } else if (a > opt_.pivot_tol) {
        best_ratio = std::min(best_ratio, std::max(xb_[rr], 0.0) / a);
      }
    }
    if (!std::isfinite(best_ratio)) return -1;
    int leave = -1;
    std::int64_t leave_key = std::numeric_limits<std::int64_t>::max();
    for (int r = 0; r < m_; ++r) {
      const auto rr = static_cast<std::size_t>(r);
      const double a = alpha_[rr];
      double ratio;
      if (fixed_at_zero(rr, phase)) {
        if (std::abs(a) <= opt_.pivot_tol) continue;
        ratio = 0.0;
      } else {
        if (a <= opt_.pivot_tol) continue;
        ratio = std::max(xb_[rr], 0.0) / a;
      }
      if (ratio <= best_ratio + kDegenerateStep) {
        const std::int64_t key = bland_key(basis_[rr]);
        if (key < leave_key) {
          leave_key = key;
          leave = r;
        }
      }
    }
    return leave;
  }

  // Pivots basic artificials at zero level out of the basis where some
  // structural column has a usable entry in their row. Rows where none
  // exists are redundant and keep their artificial, fixed at zero.
  void drive_out_artificials() {
    bool pivoted = false;
    for (int r = 0; r < m_; ++r) {
      const auto rr = static_cast<std::size_t>(r);
      if (!Basis::is_artificial(basis_[rr])) continue;
      for (int c = 0; c < m_; ++c) pi_orig_[static_cast<std::size_t>(c)] = sign_[static_cast<std::size_t>(c)] * binv_[idx(r, c)];
      lp_.price(pi_orig_, false, rc_);
      std::int64_t q = -1;
      double best = kDriveOutPivot;
      for (std::int64_t j = 0; j < k_; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        const double v = std::abs(rc_[static_cast<std::size_t>(j)]);
        if (v > best) {
          best = v;
          q = j;
        }
      }
      if (q < 0) continue;
      compute_alpha(q);
      pivot(r, q, 0.0, 1);
      pivoted = true;
    }
    if (pivoted) refactor_or_throw(2);
    for (int r = 0; r < m_; ++r) {
      if (Basis::is_artificial(basis_[static_cast<std::size_t>(r)])) xb_[static_cast<std::size_t>(r)] = 0.0;
    }
  }

  Solution finish(Status st) {
    Solution sol;
    sol.status = st;
    sol.iterations = iterations_;
    sol.basis.basic = basis_;
    sol.x.assign(static_cast<std::size_t>(k_), 0.0);
    for (int r = 0; r < m_; ++r) {
      const std::int64_t v = basis_[static_cast<std::size_t>(r)];
      if (!Basis::is_artificial(v)) sol.x[static_cast<std::size_t>(v)] = xb_[static_cast<std::size_t>(r)];
    }
    compute_pi(2);
    sol.duals.assign(pi_orig_.begin(), pi_orig_.end());
    double obj = 0.0;
    for (int r = 0; r < m_; ++r) {
      const std::int64_t v = basis_[static_cast<std::size_t>(r)];
      if (!Basis::is_artificial(v)) obj += lp_.cost(v) * xb_[static_cast<std::size_t>(r)];
    }
    sol.objective = obj;
    return sol;
  }

  const ColumnSource& lp_;
  Options opt_;
  int m_;
  std::int64_t k_;
  std::vector<double> sign_;
  std::vector<double> b_;
  double b_scale_ = 1.0;
  std::vector<std::int64_t> basis_;
  std::vector<char> in_basis_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::vector<double> alpha_;
  std::vector<double> pi_;
  std::vector<double> pi_orig_;
  std::vector<double> dense_;
  std::vector<double> rc_;
  std::vector<Entry> colbuf_;
  std::int64_t iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace

Solution solve(const ColumnSource& lp, std::span<const double> rhs,
               const std::optional<Basis>& warm, const Options& options) {
  PrimalSimplex simplex(lp, rhs, options);
  return simplex.run(warm);
}

Solution solve(const DenseLP& lp, const std::optional<Basis>& warm, const Options& options) {
  if (static_cast<int>(lp.cost.size()) != lp.cols ||
      lp.a.size() != static_cast<std::size_t>(lp.rows) * static_cast<std::size_t>(lp.cols) ||
      static_cast<int>(lp.rhs.size()) != lp.rows) {
    throw ContractError("DenseLP dimensions are inconsistent");
  }
  DenseColumns cols(lp);
  return solve(cols, lp.rhs, warm, options);
}

}  // namespace wbary::lp
