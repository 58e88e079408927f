#include "wbary/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wbary/errors.hpp"
#include "wbary/simplex.hpp"

namespace wbary {

SparseMass greedy_vertex(const Instance& inst) {
  const std::size_t n = inst.num_measures();
  const Strides strides = make_strides(inst.sizes());
  std::vector<int> pointer(n, 0);
  std::vector<double> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = inst.measures[i].masses[0];

  SparseMass w;
  double assigned = 0.0;
  while (assigned < 1.0 - kMassZeroTol) {
    const double step = *std::min_element(remaining.begin(), remaining.end());
    w.add(index_of(pointer, strides), step);
    assigned += step;
    bool exhausted = false;
    for (std::size_t i = 0; i < n; ++i) {
      remaining[i] -= step;
      if (remaining[i] > kMassZeroTol) continue;
      const auto& masses = inst.measures[i].masses;
      if (pointer[i] + 1 < static_cast<int>(masses.size())) {
        ++pointer[i];
        remaining[i] = masses[static_cast<std::size_t>(pointer[i])];
      } else {
        exhausted = true;
      }
    }
    if (exhausted) break;
  }
  return w;
}

namespace {

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

ApproxBarycenter two_approx(const Instance& inst) {
  const int n = static_cast<int>(inst.num_measures());
  std::vector<Point> candidates;
  for (const auto& m : inst.measures) candidates.insert(candidates.end(), m.points.begin(), m.points.end());
  const int S = static_cast<int>(candidates.size());
  const Strides strides = make_strides(inst.sizes());

  // Rows [0, (n-1)S): outflow of candidate s into measure i equals its
  // outflow into measure 0 (z_s eliminated). Remaining rows: marginals.
  const int marginal_base = (n - 1) * S;
  lp::SparseLP lp(marginal_base + strides.num_rows());
  std::vector<lp::Entry> entries;
  for (int i = 0; i < n; ++i) {
    const auto& measure = inst.measures[static_cast<std::size_t>(i)];
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < static_cast<int>(measure.size()); ++j) {
        entries.clear();
        if (i == 0) {
          for (int other = 1; other < n; ++other) entries.emplace_back((other - 1) * S + s, -1.0);
        } else {
          entries.emplace_back((i - 1) * S + s, 1.0);
        }
        entries.emplace_back(marginal_base + strides.row_offsets[static_cast<std::size_t>(i)] + j, 1.0);
        const double cost = inst.lambdas[static_cast<std::size_t>(i)] *
                            squared_distance(candidates[static_cast<std::size_t>(s)],
                                             measure.points[static_cast<std::size_t>(j)]);
        lp.add_column(cost, entries);
      }
    }
  }
  std::vector<double> rhs(static_cast<std::size_t>(marginal_base), 0.0);
  const auto d = marginal_vector(inst);
  rhs.insert(rhs.end(), d.begin(), d.end());

  const lp::Solution sol = lp::solve(lp, rhs);
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalError(std::string("two-approximation LP ended ") + lp::to_string(sol.status));
  }

  // Column layout: for measure i, block of S * |P_i| columns ordered (s, j).
  std::vector<std::size_t> col_base(static_cast<std::size_t>(n), 0);
  for (int i = 1; i < n; ++i) {
    col_base[static_cast<std::size_t>(i)] =
        col_base[static_cast<std::size_t>(i - 1)] +
        static_cast<std::size_t>(S) * inst.measures[static_cast<std::size_t>(i - 1)].size();
  }
  auto y = [&](int i, int s, int j) {
    const auto size = inst.measures[static_cast<std::size_t>(i)].size();
    return sol.x[col_base[static_cast<std::size_t>(i)] + static_cast<std::size_t>(s) * size +
                 static_cast<std::size_t>(j)];
  };

  ApproxBarycenter apx;
  apx.flows.assign(static_cast<std::size_t>(n), {});
  for (int s = 0; s < S; ++s) {
    double z = 0.0;
    for (int j = 0; j < static_cast<int>(inst.measures[0].size()); ++j) z += y(0, s, j);
    if (z <= kMassZeroTol) continue;
    apx.support.push_back(candidates[static_cast<std::size_t>(s)]);
    apx.mass.push_back(z);
    for (int i = 0; i < n; ++i) {
      auto& out = apx.flows[static_cast<std::size_t>(i)].emplace_back();
      for (int j = 0; j < static_cast<int>(inst.measures[static_cast<std::size_t>(i)].size()); ++j) {
        const double f = y(i, s, j);
        if (f > kMassZeroTol) out.emplace_back(j, f);
      }
    }
  }
  apx.cost = sol.objective;
  return apx;
}

SparseMass repair_to_vertex(const ApproxBarycenter& apx, const Instance& inst) {
  const std::size_t n = inst.num_measures();
  const Strides strides = make_strides(inst.sizes());
  if (apx.flows.size() != n) throw ContractError("approximate barycenter has wrong measure count");
  const std::size_t support = apx.support.size();
  if (apx.mass.size() != support) throw ContractError("approximate barycenter mass/support mismatch");

  // Flow conservation at every support point and at every target.
  std::vector<std::vector<double>> inflow(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (apx.flows[i].size() != support) {
      throw ContractError("measure " + std::to_string(i) + ": flows do not cover the support");
    }
    inflow[i].assign(inst.measures[i].size(), 0.0);
    for (std::size_t s = 0; s < support; ++s) {
      double out = 0.0;
      for (const auto& [j, f] : apx.flows[i][s]) {
        if (j < 0 || j >= static_cast<int>(inst.measures[i].size()) || f < 0.0) {
          throw ContractError("measure " + std::to_string(i) + ": invalid flow target or mass");
        }
        out += f;
        inflow[i][static_cast<std::size_t>(j)] += f;
      }
      if (std::abs(out - apx.mass[s]) > kFeasibilityTol) {
        throw ContractError("measure " + std::to_string(i) + ": outflow of support point " +
                            std::to_string(s) + " does not match its mass");
      }
    }
    for (std::size_t j = 0; j < inst.measures[i].size(); ++j) {
      if (std::abs(inflow[i][j] - inst.measures[i].masses[j]) > kFeasibilityTol) {
        throw ContractError("measure " + std::to_string(i) + ": inflow at point " +
                            std::to_string(j) + " does not match its mass");
      }
    }
  }

  SparseMass w;
  std::vector<std::vector<double>> left(n);
  std::vector<int> pick(n);
  for (std::size_t s = 0; s < support; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      left[i].assign(inst.measures[i].size(), 0.0);
      for (const auto& [j, f] : apx.flows[i][s]) left[i][static_cast<std::size_t>(j)] += f;
    }
    double z = apx.mass[s];
    while (z > kMassZeroTol) {
      double step = z;
      bool complete = true;
      for (std::size_t i = 0; i < n; ++i) {
        // Lowest point index with flow left from this support point.
        int chosen = -1;
        for (std::size_t j = 0; j < left[i].size(); ++j) {
          if (left[i][j] > kMassZeroTol) {
            chosen = static_cast<int>(j);
            break;
          }
        }
        if (chosen < 0) {
          complete = false;
          break;
        }
        pick[i] = chosen;
        step = std::min(step, left[i][static_cast<std::size_t>(chosen)]);
      }
      if (!complete) break;
      w.add(index_of(pick, strides), step);
      z -= step;
      for (std::size_t i = 0; i < n; ++i) left[i][static_cast<std::size_t>(pick[i])] -= step;
    }
  }
  return w;
}

}  // namespace wbary
