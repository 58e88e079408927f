#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wbary/simplex.hpp"

namespace wbary::oracle {

ExactLpResult exact_simplex(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                            const std::vector<std::int64_t>& c, int rows, int cols) {
  // Tableau columns: cols structurals, rows artificials, then the rhs.
  const int width = cols + rows + 1;
  std::vector<std::vector<Rational>> t(static_cast<std::size_t>(rows),
                                       std::vector<Rational>(static_cast<std::size_t>(width), 0));
  std::vector<int> basis(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    const int sign = b[static_cast<std::size_t>(r)] < 0 ? -1 : 1;
    for (int j = 0; j < cols; ++j) {
      t[r][j] = sign * a[static_cast<std::size_t>(r) * cols + j];
    }
    t[r][cols + r] = 1;
    t[r][width - 1] = sign * b[static_cast<std::size_t>(r)];
    basis[r] = cols + r;
  }
  auto pivot = [&](int pr, int pc) {
    const Rational p = t[pr][pc];
    for (auto& v : t[pr]) v /= p;
    for (int r = 0; r < rows; ++r) {
      if (r == pr || t[r][pc] == 0) continue;
      const Rational f = t[r][pc];
      for (int k = 0; k < width; ++k) t[r][k] -= f * t[pr][k];
    }
    basis[pr] = pc;
  };
  // Runs Bland's rule for the given cost over the allowed columns.
  auto run = [&](const std::vector<Rational>& cost, int allowed) -> bool {
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        Rational d = cost[j];
        for (int r = 0; r < rows; ++r) d -= cost[basis[r]] * t[r][j];
        if (d < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best = 0;
      for (int r = 0; r < rows; ++r) {
        if (t[r][enter] <= 0) continue;
        const Rational ratio = t[r][width - 1] / t[r][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  };

  std::vector<Rational> phase1(static_cast<std::size_t>(cols + rows), 0);
  for (int r = 0; r < rows; ++r) phase1[cols + r] = 1;
  run(phase1, cols + rows);
  Rational infeasibility = 0;
  for (int r = 0; r < rows; ++r) {
    if (basis[r] >= cols) infeasibility += t[r][width - 1];
  }
  if (infeasibility > 0) return {LpOutcome::kInfeasible, 0};
  // Pivot remaining artificials out; rows where that is impossible are
  // redundant and are zeroed.
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < cols) continue;
    int col = -1;
    for (int j = 0; j < cols; ++j) {
      if (t[r][j] != 0) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      pivot(r, col);
    } else {
      for (auto& v : t[r]) v = 0;
    }
  }
  std::vector<Rational> phase2(static_cast<std::size_t>(cols + rows), 0);
  for (int j = 0; j < cols; ++j) phase2[j] = c[static_cast<std::size_t>(j)];
  if (!run(phase2, cols)) return {LpOutcome::kUnbounded, 0};
  Rational obj = 0;
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < cols) obj += phase2[basis[r]] * t[r][width - 1];
  }
  return {LpOutcome::kOptimal, obj};
}

namespace {

// Solves the square-or-tall system [columns] x = b when the columns are
// independent and the system is consistent.
std::optional<std::vector<double>> unique_solution(std::vector<std::vector<double>> m,
                                                   std::vector<double> rhs) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t r = 0;
  std::vector<std::size_t> pivot_row(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t best = r;
    for (std::size_t k = r; k < rows; ++k) {
      if (std::abs(m[k][c]) > std::abs(m[best][c])) best = k;
    }
    if (best >= rows || std::abs(m[best][c]) < 1e-10) return std::nullopt;
    std::swap(m[best], m[r]);
    std::swap(rhs[best], rhs[r]);
    for (std::size_t k = 0; k < rows; ++k) {
      if (k == r) continue;
      const double f = m[k][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[k][j] -= f * m[r][j];
      rhs[k] -= f * rhs[r];
    }
    pivot_row[c] = r;
    ++r;
  }
  for (std::size_t k = r; k < rows; ++k) {
    if (std::abs(rhs[k]) > 1e-9) return std::nullopt;
  }
  std::vector<double> x(cols);
  for (std::size_t c = 0; c < cols; ++c) x[c] = rhs[pivot_row[c]] / m[pivot_row[c]][c];
  return x;
}

}  // namespace

std::optional<double> min_over_vertices(const std::vector<double>& a, const std::vector<double>& b,
                                        const std::vector<double>& c, int rows, int cols) {
  std::optional<double> best;
  std::vector<int> chosen;
  auto visit = [&]() {
    std::vector<std::vector<double>> m(static_cast<std::size_t>(rows), std::vector<double>(chosen.size()));
    for (int r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < chosen.size(); ++k) m[r][k] = a[static_cast<std::size_t>(r) * cols + chosen[k]];
    }
    const auto x = unique_solution(m, b);
    if (!x) return;
    if (std::any_of(x->begin(), x->end(), [](double v) { return v < -1e-12; })) return;
    double obj = 0.0;
    for (std::size_t k = 0; k < chosen.size(); ++k) obj += c[static_cast<std::size_t>(chosen[k])] * (*x)[k];
    if (!best || obj < *best) best = obj;
  };
  // Every subset of at most `rows` columns, in lexicographic order.
  auto recurse = [&](auto&& self, int next) -> void {
    if (!chosen.empty()) visit();
    if (static_cast<int>(chosen.size()) == rows) return;
    for (int j = next; j < cols; ++j) {
      chosen.push_back(j);
      self(self, j + 1);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0);
  // The empty support is a vertex only when b = 0.
  if (std::all_of(b.begin(), b.end(), [](double v) { return std::abs(v) < 1e-12; })) {
    if (!best || 0.0 < *best) best = 0.0;
  }
  return best;
}

double min_over_transport_vertices(const std::vector<double>& supplies,
                                   const std::vector<double>& demands,
                                   const std::vector<double>& costs) {
  const int m = static_cast<int>(supplies.size());
  const int k = static_cast<int>(demands.size());
  const int cells = m * k;
  const int tree = m + k - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(tree));
  // Iterate over all combinations of `tree` cells.
  std::vector<bool> sel(static_cast<std::size_t>(cells), false);
  std::fill(sel.begin(), sel.begin() + tree, true);
  std::sort(sel.begin(), sel.end(), std::greater<>());
  do {
    int p = 0;
    for (int c = 0; c < cells; ++c) {
      if (sel[static_cast<std::size_t>(c)]) pick[static_cast<std::size_t>(p++)] = c;
    }
    // Acyclic check (then it spans, having m + k - 1 edges).
    std::vector<int> parent(static_cast<std::size_t>(m + k));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      return v;
    };
    bool acyclic = true;
    for (int c : pick) {
      const int a = find(c / k);
      const int bnode = find(m + c % k);
      if (a == bnode) {
        acyclic = false;
        break;
      }
      parent[static_cast<std::size_t>(a)] = bnode;
    }
    if (!acyclic) continue;
    // Leaf peeling.
    std::vector<double> left(supplies);
    left.insert(left.end(), demands.begin(), demands.end());
    std::vector<bool> used(static_cast<std::size_t>(tree), false);
    std::vector<double> flow(static_cast<std::size_t>(tree), 0.0);
    for (int round = 0; round < tree; ++round) {
      std::vector<int> degree(static_cast<std::size_t>(m + k), 0);
      for (int e = 0; e < tree; ++e) {
        if (used[static_cast<std::size_t>(e)]) continue;
        ++degree[static_cast<std::size_t>(pick[e] / k)];
        ++degree[static_cast<std::size_t>(m + pick[e] % k)];
      }
      for (int e = 0; e < tree; ++e) {
        if (used[static_cast<std::size_t>(e)]) continue;
        const int rnode = pick[e] / k;
        const int cnode = m + pick[e] % k;
        int leaf = -1;
        int other = -1;
        if (degree[static_cast<std::size_t>(rnode)] == 1) {
          leaf = rnode;
          other = cnode;
        } else if (degree[static_cast<std::size_t>(cnode)] == 1) {
          leaf = cnode;
          other = rnode;
        }
        if (leaf < 0) continue;
        flow[static_cast<std::size_t>(e)] = left[static_cast<std::size_t>(leaf)];
        left[static_cast<std::size_t>(other)] -= flow[static_cast<std::size_t>(e)];
        left[static_cast<std::size_t>(leaf)] = 0.0;
        used[static_cast<std::size_t>(e)] = true;
        break;
      }
    }
    if (std::any_of(flow.begin(), flow.end(), [](double f) { return f < -1e-12; })) continue;
    double obj = 0.0;
    for (int e = 0; e < tree; ++e) obj += flow[static_cast<std::size_t>(e)] * costs[static_cast<std::size_t>(pick[e])];
    best = std::min(best, obj);
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return best;
}

int rank(std::vector<std::vector<double>> rows, double tol) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  int rk = 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t best = r;
    for (std::size_t k = r; k < rows.size(); ++k) {
      if (std::abs(rows[k][c]) > std::abs(rows[best][c])) best = k;
    }
    if (std::abs(rows[best][c]) < tol) continue;
    std::swap(rows[best], rows[r]);
    for (std::size_t k = r + 1; k < rows.size(); ++k) {
      const double f = rows[k][c] / rows[r][c];
      for (std::size_t j = c; j < cols; ++j) rows[k][j] -= f * rows[r][j];
    }
    ++r;
    ++rk;
  }
  return rk;
}

std::vector<std::vector<int>> explicit_matrix(const std::vector<int>& sizes) {
  const int rows = std::accumulate(sizes.begin(), sizes.end(), 0);
  std::size_t total = 1;
  for (int s : sizes) total *= static_cast<std::size_t>(s);
  std::vector<std::vector<int>> a(static_cast<std::size_t>(rows), std::vector<int>(total, 0));
  // Enumerate tuples in lexicographic order (last measure fastest).
  std::vector<int> tuple(sizes.size(), 0);
  for (std::size_t h = 0; h < total; ++h) {
    int offset = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      a[static_cast<std::size_t>(offset + tuple[i])][h] = 1;
      offset += sizes[i];
    }
    for (std::size_t i = sizes.size(); i-- > 0;) {
      if (++tuple[i] < sizes[i]) break;
      tuple[i] = 0;
    }
  }
  return a;
}

double definition_cost(const Instance& inst, const std::vector<int>& tuple) {
  const std::size_t dim = inst.measures[0].points[0].size();
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const auto& x = inst.measures[i].points[static_cast<std::size_t>(tuple[i])];
    for (std::size_t k = 0; k < dim; ++k) mean[k] += inst.lambdas[i] * x[k];
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const auto& x = inst.measures[i].points[static_cast<std::size_t>(tuple[i])];
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) sq += (mean[k] - x[k]) * (mean[k] - x[k]);
    cost += inst.lambdas[i] * sq;
  }
  return cost;
}

double explicit_optimum(const Instance& inst) {
  std::vector<int> sizes;
  for (const auto& m : inst.measures) sizes.push_back(static_cast<int>(m.masses.size()));
  const auto a = explicit_matrix(sizes);
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  lp::DenseLP lp(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int h = 0; h < cols; ++h) lp.at(r, h) = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(h)];
  }
  int r = 0;
  for (const auto& m : inst.measures) {
    for (double v : m.masses) lp.rhs[static_cast<std::size_t>(r++)] = v;
  }
  // Column h in lexicographic tuple order, last measure fastest.
  std::vector<int> tuple(sizes.size(), 0);
  for (int h = 0; h < cols; ++h) {
    lp.cost[static_cast<std::size_t>(h)] = definition_cost(inst, tuple);
    for (std::size_t i = sizes.size(); i-- > 0;) {
      if (++tuple[i] < sizes[i]) break;
      tuple[i] = 0;
    }
  }
  const auto sol = lp::solve(lp);
  if (sol.status != lp::Status::kOptimal) throw std::runtime_error("explicit oracle LP not optimal");
  return sol.objective;
}

Instance random_instance(std::mt19937_64& rng, const std::vector<int>& sizes, int dim,
                         bool random_masses, bool random_lambdas) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  for (int size : sizes) {
    DiscreteMeasure m;
    double sum = 0.0;
    for (int j = 0; j < size; ++j) {
      Point x(static_cast<std::size_t>(dim));
      for (double& v : x) v = unit(rng);
      m.points.push_back(x);
      m.masses.push_back(random_masses ? 0.2 + unit(rng) : 1.0);
      sum += m.masses.back();
    }
    for (double& v : m.masses) v /= sum;
    inst.measures.push_back(std::move(m));
  }
  double lsum = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    inst.lambdas.push_back(random_lambdas ? 0.2 + unit(rng) : 1.0);
    lsum += inst.lambdas.back();
  }
  for (double& l : inst.lambdas) l /= lsum;
  return inst;
}

}  // namespace wbary::oracle
