#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "wbary/simplex.hpp"

using namespace wbary;

namespace {

struct IntLp {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> a, b, c;
};

// Feasible by construction: b = A x0 for a random nonnegative integer x0.
IntLp random_int_lp(std::mt19937_64& rng) {
  IntLp p;
  p.rows = 1 + static_cast<int>(rng() % 10);
  p.cols = p.rows + static_cast<int>(rng() % (31 - p.rows));
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> cost(-3, 9);
  std::uniform_int_distribution<int> x0(0, 3);
  p.a.resize(static_cast<std::size_t>(p.rows * p.cols));
  for (auto& v : p.a) v = (rng() % 3 == 0) ? 0 : coef(rng);
  // Occasionally duplicate a row to exercise redundant constraints.
  if (p.rows > 1 && rng() % 4 == 0) {
    std::copy_n(p.a.begin(), p.cols, p.a.begin() + p.cols);
  }
  std::vector<std::int64_t> x(static_cast<std::size_t>(p.cols));
  for (auto& v : x) v = x0(rng);
  p.b.assign(static_cast<std::size_t>(p.rows), 0);
  for (int r = 0; r < p.rows; ++r) {
    for (int j = 0; j < p.cols; ++j) p.b[r] += p.a[static_cast<std::size_t>(r * p.cols + j)] * x[j];
  }
  p.c.resize(static_cast<std::size_t>(p.cols));
  for (auto& v : p.c) v = cost(rng);
  return p;
}

lp::DenseLP to_dense(const IntLp& p) {
  lp::DenseLP d(p.rows, p.cols);
  for (std::size_t k = 0; k < p.a.size(); ++k) d.a[k] = static_cast<double>(p.a[k]);
  for (int r = 0; r < p.rows; ++r) d.rhs[r] = static_cast<double>(p.b[r]);
  for (int j = 0; j < p.cols; ++j) d.cost[j] = static_cast<double>(p.c[j]);
  return d;
}

void check_optimality_certificate(const lp::DenseLP& d, const lp::Solution& s) {
  double dual_obj = 0.0;
  for (int r = 0; r < d.rows; ++r) {
    double lhs = 0.0;
    for (int j = 0; j < d.cols; ++j) lhs += d.at(r, j) * s.x[j];
    CHECK(std::abs(lhs - d.rhs[r]) <= 1e-9 * (1.0 + std::abs(d.rhs[r])));
    dual_obj += d.rhs[r] * s.duals[r];
  }
  for (int j = 0; j < d.cols; ++j) {
    CHECK(s.x[j] >= -1e-9);
    double rc = d.cost[j];
    for (int r = 0; r < d.rows; ++r) rc -= d.at(r, j) * s.duals[r];
    CHECK(rc >= -1e-9 * (1.0 + std::abs(d.cost[j])));
  }
  CHECK(std::abs(s.objective - dual_obj) <= 1e-8 * (1.0 + std::abs(s.objective)));
}

}  // namespace

TEST_CASE("trivial lp") {
  lp::DenseLP d(1, 2);
  d.cost = {1.0, 1.0};
  d.a = {1.0, 1.0};
  d.rhs = {1.0};
  const auto s = lp::solve(d);
  REQUIRE(s.status == lp::Status::kOptimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.x[0] + s.x[1] == doctest::Approx(1.0));
}

TEST_CASE("unbounded lp") {
  lp::DenseLP d(1, 2);
  d.cost = {-1.0, 0.0};
  d.a = {1.0, -1.0};
  d.rhs = {0.0};
  CHECK(lp::solve(d).status == lp::Status::kUnbounded);
}

TEST_CASE("infeasible lp") {
  lp::DenseLP d(2, 2);
  d.a = {1.0, 1.0, 1.0, 1.0};
  d.rhs = {1.0, 2.0};
  CHECK(lp::solve(d).status == lp::Status::kInfeasible);
}

TEST_CASE("negative right-hand side is handled with original-sign duals") {
  lp::DenseLP d(1, 2);
  d.cost = {2.0, 3.0};
  d.a = {-1.0, -1.0};
  d.rhs = {-1.0};
  const auto s = lp::solve(d);
  REQUIRE(s.status == lp::Status::kOptimal);
  CHECK(s.objective == doctest::Approx(2.0));
  check_optimality_certificate(d, s);
}

TEST_CASE("3x3 assignment equals the best permutation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    lp::DenseLP d(6, 9);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        d.cost[i * 3 + j] = unit(rng);
        d.at(i, i * 3 + j) = 1.0;
        d.at(3 + j, i * 3 + j) = 1.0;
      }
    }
    std::fill(d.rhs.begin(), d.rhs.end(), 1.0);
    std::array<int, 3> perm{0, 1, 2};
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, d.cost[perm[0]] + d.cost[3 + perm[1]] + d.cost[6 + perm[2]]);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto s = lp::solve(d);
    REQUIRE(s.status == lp::Status::kOptimal);
    CHECK(std::abs(s.objective - best) <= 1e-8);
    check_optimality_certificate(d, s);
  }
}

TEST_CASE("random lps agree with the exact rational simplex") {
  std::mt19937_64 rng(2024);
  int optimal = 0;
  for (int t = 0; t < 500; ++t) {
    const IntLp p = random_int_lp(rng);
    const auto exact = oracle::exact_simplex(p.a, p.b, p.c, p.rows, p.cols);
    const auto d = to_dense(p);
    const auto s = lp::solve(d);
    CAPTURE(t);
    if (exact.outcome == oracle::LpOutcome::kUnbounded) {
      CHECK(s.status == lp::Status::kUnbounded);
      continue;
    }
    REQUIRE(exact.outcome == oracle::LpOutcome::kOptimal);
    REQUIRE(s.status == lp::Status::kOptimal);
    const double ref = exact.objective.convert_to<double>();
    CHECK(std::abs(s.objective - ref) <= 1e-8 * (1.0 + std::abs(ref)));
    check_optimality_certificate(d, s);
    ++optimal;
  }
  CHECK(optimal > 100);
}

TEST_CASE("random lps agree with vertex enumeration") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = rows + static_cast<int>(rng() % 7);
    lp::DenseLP d(rows, cols);
    for (double& v : d.a) v = unit(rng);  // positive: bounded feasible region
    std::vector<double> x(static_cast<std::size_t>(cols));
    for (double& v : x) v = unit(rng);
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < cols; ++j) d.rhs[r] += d.at(r, j) * x[j];
    }
    for (double& v : d.cost) v = unit(rng) * 4 - 2;
    const auto ref = oracle::min_over_vertices(d.a, d.rhs, d.cost, rows, cols);
    REQUIRE(ref.has_value());
    const auto s = lp::solve(d);
    REQUIRE(s.status == lp::Status::kOptimal);
    CHECK(std::abs(s.objective - *ref) <= 1e-8 * (1.0 + std::abs(*ref)));
  }
}

TEST_CASE("warm start from an optimal basis takes no pivots") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const auto d = to_dense(random_int_lp(rng));
    const auto cold = lp::solve(d);
    if (cold.status != lp::Status::kOptimal) continue;
    const auto warm = lp::solve(d, cold.basis);
    REQUIRE(warm.status == lp::Status::kOptimal);
    CHECK(warm.warm_started);
    CHECK(warm.iterations == 0);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("a singular warm basis falls back to a cold start") {
  lp::DenseLP d(2, 3);
  d.a = {1, 1, 0, 0, 1, 1};
  d.rhs = {1, 1};
  d.cost = {1, 0, 1};
  lp::Basis bad;
  bad.basic = {0, 0};
  const auto s = lp::solve(d, bad);
  REQUIRE(s.status == lp::Status::kOptimal);
  CHECK_FALSE(s.warm_started);
  CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("sparse column source matches the dense form") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto d = to_dense(random_int_lp(rng));
    lp::SparseLP sp(d.rows);
    for (int j = 0; j < d.cols; ++j) {
      std::vector<lp::Entry> col;
      for (int r = 0; r < d.rows; ++r) {
        if (d.at(r, j) != 0.0) col.emplace_back(r, d.at(r, j));
      }
      sp.add_column(d.cost[j], col);
    }
    const auto a = lp::solve(d);
    const auto b = lp::solve(sp, d.rhs);
    REQUIRE(a.status == b.status);
    if (a.status == lp::Status::kOptimal) CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-10));
  }
}

TEST_CASE("highly degenerate lp terminates") {
  // Assignment polytopes are massively degenerate.
  const int n = 8;
  lp::DenseLP d(2 * n, n * n);
  std::mt19937_64 rng(1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d.at(i, i * n + j) = 1.0;
      d.at(n + j, i * n + j) = 1.0;
      d.cost[i * n + j] = static_cast<double>(rng() % 3);
    }
  }
  std::fill(d.rhs.begin(), d.rhs.end(), 1.0);
  const auto s = lp::solve(d);
  REQUIRE(s.status == lp::Status::kOptimal);
  check_optimality_certificate(d, s);
}
