#include <gtest/gtest.h>

#include <cmath>

#include "bellsim/random.hpp"
#include "bellsim/simplex.hpp"

using namespace bellsim;

namespace {

ImplicitColumnLp dense_lp(const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
  ImplicitColumnLp lp;
  lp.rows = a.size();
  lp.cols = a.empty() ? 0 : a[0].size();
  lp.rhs = b;
  lp.column = [a](std::uint64_t col, std::vector<std::pair<std::size_t, double>>& entries) {
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (a[r][col] != 0.0) entries.emplace_back(r, a[r][col]);
    }
  };
  return lp;
}

double max_residual(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const SimplexResult& r) {
  std::vector<double> ax(a.size(), 0.0);
  for (auto [col, v] : r.solution) {
    EXPECT_GE(v, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) ax[i] += a[i][col] * v;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
  return worst;
}

}  // namespace

TEST(DenseSimplex, FeasibleSystem) {
  const std::vector<std::vector<double>> a = {{1, 1, 0}, {0, 1, 1}};
  const std::vector<double> b = {1, 2};
  const auto r = DenseSimplex().solve(dense_lp(a, b));
  EXPECT_TRUE(r.feasible);
  EXPECT_LT(max_residual(a, b, r), 1e-12);
}

TEST(DenseSimplex, InfeasibleSystem) {
  // w0 + w1 = 1 and w0 + w1 = 2 cannot both hold.
  const std::vector<std::vector<double>> a = {{1, 1}, {1, 1}};
  const auto r = DenseSimplex().solve(dense_lp(a, {1, 2}));
  EXPECT_FALSE(r.feasible);
  EXPECT_NEAR(r.phase1_objective, 1.0, 1e-12);
}

TEST(DenseSimplex, NegativeRhsRejected) {
  EXPECT_THROW(DenseSimplex().solve(dense_lp({{1.0}}, {-1.0})), std::invalid_argument);
}

TEST(DenseSimplex, RandomConvexCombinations) {
  // b is a known convex combination of random nonnegative columns, so the
  // system is feasible; a shifted copy of b that exceeds every column's reach
  // is not.
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 6, n = 30;
    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    for (auto& row : a) {
      for (auto& v : row) v = uniform_below(rng, 3) == 0 ? 0.0 : uniform01(rng);
    }
    std::vector<double> b(m, 0.0);
    for (std::size_t c = 0; c < 4; ++c) {
      const std::size_t col = uniform_below(rng, n);
      for (std::size_t i = 0; i < m; ++i) b[i] += 0.25 * a[i][col];
    }
    SimplexOptions opts;
    opts.refactor_every = 3;
    const auto r = DenseSimplex(opts).solve(dense_lp(a, b));
    ASSERT_TRUE(r.feasible);
    EXPECT_LT(max_residual(a, b, r), 1e-10);
  }
}

TEST(DenseSimplex, DegenerateSystemTerminates) {
  // Many identical columns and a zero right-hand side entry.
  std::vector<std::vector<double>> a = {{1, 1, 1, 1, 0}, {0, 0, 0, 0, 1}, {1, 1, 1, 1, 1}};
  const std::vector<double> b = {1, 0, 1};
  const auto r = DenseSimplex().solve(dense_lp(a, b));
  EXPECT_TRUE(r.feasible);
  EXPECT_LT(max_residual(a, b, r), 1e-12);
}
