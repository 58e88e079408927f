#include "wbary/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wbary/errors.hpp"
#include "wbary/model.hpp"
#include "wbary/simplex.hpp"

namespace wbary {
namespace {

void check_problem(const TransportationProblem& tp, double balance_tol) {
  const int m = tp.rows();
  const int k = tp.cols();
  if (m == 0 || k == 0) throw ContractError("transportation problem has no rows or columns");
  if (tp.costs.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(k)) {
    throw ContractError("transportation cost matrix has the wrong size");
  }
  for (double s : tp.supplies) {
    if (!(s > 0.0)) throw ContractError("supplies must be positive");
  }
  for (double d : tp.demands) {
    if (!(d > 0.0)) throw ContractError("demands must be positive");
  }
  const double ss = std::accumulate(tp.supplies.begin(), tp.supplies.end(), 0.0);
  const double dd = std::accumulate(tp.demands.begin(), tp.demands.end(), 0.0);
  if (std::abs(ss - dd) > balance_tol) {
    throw ContractError("unbalanced transportation problem: supply " + std::to_string(ss) +
                        " vs demand " + std::to_string(dd));
  }
}

class TransportSimplex {
 public:
  TransportSimplex(const TransportationProblem& tp, int degenerate_streak)
      : tp_(tp), m_(tp.rows()), k_(tp.cols()), streak_limit_(degenerate_streak) {
    flow_.assign(cells(), 0.0);
    basic_.assign(cells(), 0);
    double cmax = 0.0;
    for (double c : tp.costs) cmax = std::max(cmax, std::abs(c));
    tol_ = 1e-12 * (1.0 + cmax);
  }

  TransportPlan run() {
    northwest_corner();
    long iterations = 0;
    const long max_iterations = 1000L + 50L * static_cast<long>(cells()) * (m_ + k_);
    bool bland = false;
    int streak = 0;
    while (true) {
      if (iterations > max_iterations) {
        throw NumericalError("transportation simplex exceeded its iteration limit");
      }
      potentials();
      const int enter = choose_entering(bland);
      if (enter < 0) break;
      const double step = pivot(enter);
      ++iterations;
      if (step <= kMassZeroTol * 1e-3) {
        if (++streak >= streak_limit_) bland = true;
      } else {
        streak = 0;
        bland = false;
      }
    }
    TransportPlan plan;
    plan.iterations = iterations;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < k_; ++j) {
        const double f = flow_[at(i, j)];
        if (basic_[at(i, j)] && f > kMassZeroTol) {
          plan.flows.push_back({i, j, f});
          plan.objective += f * tp_.cost(i, j);
        }
      }
    }
    return plan;
  }

 private:
  std::size_t cells() const { return static_cast<std::size_t>(m_) * static_cast<std::size_t>(k_); }
  std::size_t at(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(j);
  }

  // Staircase basis of exactly m + k - 1 cells; when a row and a column are
  // exhausted together the next cell enters with zero flow.
  void northwest_corner() {
    std::vector<double> supply = tp_.supplies;
    std::vector<double> demand = tp_.demands;
    int i = 0;
    int j = 0;
    while (true) {
      const double q = std::max(0.0, std::min(supply[static_cast<std::size_t>(i)],
                                              demand[static_cast<std::size_t>(j)]));
      basic_[at(i, j)] = 1;
      if (i == m_ - 1 && j == k_ - 1) {
        // Absorb the balance residue in the last cell.
        flow_[at(i, j)] = std::max(0.0, std::max(supply[static_cast<std::size_t>(i)],
                                                 demand[static_cast<std::size_t>(j)]));
        break;
      }
      flow_[at(i, j)] = q;
      supply[static_cast<std::size_t>(i)] -= q;
      demand[static_cast<std::size_t>(j)] -= q;
      if (i == m_ - 1) {
        ++j;
      } else if (j == k_ - 1) {
        ++i;
      } else if (supply[static_cast<std::size_t>(i)] <= demand[static_cast<std::size_t>(j)]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void build_tree() {
    adj_.assign(static_cast<std::size_t>(m_ + k_), {});
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < k_; ++j) {
        if (!basic_[at(i, j)]) continue;
        adj_[static_cast<std::size_t>(i)].push_back(m_ + j);
        adj_[static_cast<std::size_t>(m_ + j)].push_back(i);
      }
    }
  }

  // Dual potentials with u_0 = 0 and u_i + v_j = c_ij on basic cells.
  void potentials() {
    build_tree();
    const int nodes = m_ + k_;
    pot_.assign(static_cast<std::size_t>(nodes), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : adj_[static_cast<std::size_t>(a)]) {
        if (seen[static_cast<std::size_t>(b)]) continue;
        seen[static_cast<std::size_t>(b)] = 1;
        const int row = a < m_ ? a : b;
        const int col = (a < m_ ? b : a) - m_;
        pot_[static_cast<std::size_t>(b)] = tp_.cost(row, col) - pot_[static_cast<std::size_t>(a)];
        stack.push_back(b);
      }
    }
    for (int v = 0; v < nodes; ++v) {
      if (!seen[static_cast<std::size_t>(v)]) {
        throw NumericalError("transportation basis is not a spanning tree");
      }
    }
  }

  int choose_entering(bool bland) const {
    int enter = -1;
    double best = -tol_;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < k_; ++j) {
        if (basic_[at(i, j)]) continue;
        const double r = tp_.cost(i, j) - pot_[static_cast<std::size_t>(i)] -
                         pot_[static_cast<std::size_t>(m_ + j)];
        if (bland) {
          if (r < -tol_) return static_cast<int>(at(i, j));
        } else if (r < best) {
          best = r;
          enter = static_cast<int>(at(i, j));
        }
      }
    }
    return enter;
  }

  // Moves flow around the cycle closed by the entering cell; returns the
  // step length.
  double pivot(int enter) {
    const int ei = enter / k_;
    const int ej = enter % k_;
    // Tree path from row node ei to column node m_ + ej.
    const int nodes = m_ + k_;
    std::vector<int> parent(static_cast<std::size_t>(nodes), -1);
    std::vector<int> queue{ei};
    parent[static_cast<std::size_t>(ei)] = ei;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int a = queue[head];
      if (a == m_ + ej) break;
      for (int b : adj_[static_cast<std::size_t>(a)]) {
        if (parent[static_cast<std::size_t>(b)] >= 0) continue;
        parent[static_cast<std::size_t>(b)] = a;
        queue.push_back(b);
      }
    }
    if (parent[static_cast<std::size_t>(m_ + ej)] < 0) {
      throw NumericalError("transportation basis has no cycle for the entering cell");
    }
    std::vector<std::size_t> path;  // cells from the entering column back to ei
    for (int b = m_ + ej; b != ei; b = parent[static_cast<std::size_t>(b)]) {
      const int a = parent[static_cast<std::size_t>(b)];
      const int row = a < m_ ? a : b;
      const int col = (a < m_ ? b : a) - m_;
      path.push_back(at(row, col));
    }
    // Walking back from column ej, the first edge loses flow, then they
    // alternate.
    std::size_t leave = 0;
    double theta = 0.0;
    bool found = false;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const double f = flow_[path[p]];
      if (!found || f < theta || (f == theta && path[p] < leave)) {
        theta = f;
        leave = path[p];
        found = true;
      }
    }
    theta = std::max(theta, 0.0);
    for (std::size_t p = 0; p < path.size(); ++p) {
      if (p % 2 == 0) {
        flow_[path[p]] -= theta;
      } else {
        flow_[path[p]] += theta;
      }
    }
    flow_[static_cast<std::size_t>(enter)] = theta;
    basic_[static_cast<std::size_t>(enter)] = 1;
    basic_[leave] = 0;
    flow_[leave] = 0.0;
    return theta;
  }

  const TransportationProblem& tp_;
  int m_;
  int k_;
  int streak_limit_;
  double tol_ = 0.0;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> pot_;
};

TransportPlan solve_with_simplex(const TransportationProblem& tp) {
  const int m = tp.rows();
  const int k = tp.cols();
  lp::SparseLP lp(m + k);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      const lp::Entry entries[] = {{i, 1.0}, {m + j, 1.0}};
      lp.add_column(tp.cost(i, j), entries);
    }
  }
  std::vector<double> rhs(tp.supplies);
  rhs.insert(rhs.end(), tp.demands.begin(), tp.demands.end());
  const lp::Solution sol = lp::solve(lp, rhs);
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalError(std::string("transportation LP ended ") + lp::to_string(sol.status));
  }
  TransportPlan plan;
  plan.iterations = sol.iterations;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      const double f = sol.x[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
      if (f > kMassZeroTol) {
        plan.flows.push_back({i, j, f});
        plan.objective += f * tp.cost(i, j);
      }
    }
  }
  return plan;
}

}  // namespace

TransportPlan solve_transportation(const TransportationProblem& tp,
                                   const TransportOptions& options) {
  check_problem(tp, options.balance_tol);
  if (options.use_simplex) return solve_with_simplex(tp);
  TransportSimplex solver(tp, options.degenerate_streak);
  return solver.run();
}

}  // namespace wbary
