#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/errors.hpp"

namespace bellsim {

/// Feasibility problem  A w = b, w >= 0, b >= 0, with columns produced on
/// demand. The callback writes the nonzero (row, value) pairs of one column.
struct ImplicitColumnLp {
  std::size_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> rhs;
  std::function<void(std::uint64_t col, std::vector<std::pair<std::size_t, double>>& entries)> column;
};

struct SimplexOptions {
  double pricing_tol = 1e-11;
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t refactor_every = 64;
  std::uint64_t max_pivots = 5'000'000;
};

struct SimplexResult {
  bool feasible = false;
  double phase1_objective = 0.0;                            // sum of artificial variables
  std::vector<std::pair<std::uint64_t, double>> solution;  // nonzero structural columns
  std::uint64_t pivots = 0;
};

/// Abstract backend so a different solver can be plugged in behind the LHV code.
class FeasibilityBackend {
 public:
  virtual ~FeasibilityBackend() = default;
  virtual SimplexResult solve(const ImplicitColumnLp& lp) const = 0;
};

/// Phase-one revised simplex with a dense basis inverse and Bland's rule.
/// Artificial variables start basic; once they leave they are never priced
/// again. The inverse is rebuilt from scratch every `refactor_every` pivots.
class DenseSimplex final : public FeasibilityBackend {
 public:
  explicit DenseSimplex(SimplexOptions opts = {}) : opts_(opts) {}

  SimplexResult solve(const ImplicitColumnLp& lp) const override {
    const std::size_t m = lp.rows;
    if (lp.rhs.size() != m) throw std::invalid_argument("rhs size differs from row count");
    for (double v : lp.rhs) {
      if (v < 0.0) throw std::invalid_argument("phase one expects a nonnegative right-hand side");
    }
    const std::uint64_t n = lp.cols;
    const std::uint64_t artificial_base = n;

    std::vector<std::uint64_t> basic(m);
    for (std::size_t r = 0; r < m; ++r) basic[r] = artificial_base + r;
    std::vector<char> is_basic(n, 0);
    std::vector<double> binv(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) binv[r * m + r] = 1.0;
    std::vector<double> xb = lp.rhs;

    std::vector<double> pi(m);
    std::vector<double> u(m);
    std::vector<std::pair<std::size_t, double>> entries;
    SimplexResult result;

    auto refactor = [&] {
      // B has column r equal to the column of basic[r].
      std::vector<double> b(m * m, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        if (basic[r] >= artificial_base) {
          b[(basic[r] - artificial_base) * m + r] = 1.0;
        } else {
          entries.clear();
          lp.column(basic[r], entries);
          for (auto [row, val] : entries) b[row * m + r] = val;
        }
      }
      invert(b, binv, m);
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += binv[i * m + j] * lp.rhs[j];
        xb[i] = std::abs(s) < 1e-14 ? 0.0 : s;
      }
    };

    while (true) {
      std::fill(pi.begin(), pi.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        if (basic[i] < artificial_base) continue;
        const double* row = &binv[i * m];
        for (std::size_t j = 0; j < m; ++j) pi[j] += row[j];
      }
      // Bland: the lowest-index column with a negative reduced cost enters.
      std::uint64_t entering = n;
      for (std::uint64_t col = 0; col < n; ++col) {
        if (is_basic[col]) continue;
        entries.clear();
        lp.column(col, entries);
        double reduced = 0.0;
        for (auto [row, val] : entries) reduced -= pi[row] * val;
        if (reduced < -opts_.pricing_tol) {
          entering = col;
          break;
        }
      }
      if (entering == n) break;

      entries.clear();
      lp.column(entering, entries);
      std::fill(u.begin(), u.end(), 0.0);
      for (auto [row, val] : entries) {
        for (std::size_t i = 0; i < m; ++i) u[i] += binv[i * m + row] * val;
      }
      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (u[i] <= opts_.pivot_tol) continue;
        const double ratio = std::max(xb[i], 0.0) / u[i];
        if (ratio < best_ratio - 1e-15 || (std::abs(ratio - best_ratio) <= 1e-15 && leave < m && basic[i] < basic[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == m) throw SolverError("phase-one simplex reported an unbounded direction", objective(basic, xb, artificial_base));

      const double piv = u[leave];
      double* lrow = &binv[leave * m];
      for (std::size_t j = 0; j < m; ++j) lrow[j] /= piv;
      xb[leave] /= piv;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave || u[i] == 0.0) continue;
        const double f = u[i];
        double* row = &binv[i * m];
        for (std::size_t j = 0; j < m; ++j) row[j] -= f * lrow[j];
        xb[i] -= f * xb[leave];
      }
      if (basic[leave] < artificial_base) is_basic[basic[leave]] = 0;
      basic[leave] = entering;
      is_basic[entering] = 1;

      if (++result.pivots % opts_.refactor_every == 0) refactor();
      if (result.pivots > opts_.max_pivots) {
        throw SolverError("phase-one simplex hit its pivot limit", objective(basic, xb, artificial_base));
      }
    }
    refactor();
    result.phase1_objective = objective(basic, xb, artificial_base);
    result.feasible = result.phase1_objective <= opts_.feasibility_tol;
    for (std::size_t i = 0; i < m; ++i) {
      if (basic[i] < artificial_base && xb[i] > 0.0) result.solution.emplace_back(basic[i], xb[i]);
    }
    std::sort(result.solution.begin(), result.solution.end());
    return result;
  }

 private:
  static double objective(const std::vector<std::uint64_t>& basic, const std::vector<double>& xb,
                          std::uint64_t artificial_base) {
    double s = 0.0;
    for (std::size_t i = 0; i < basic.size(); ++i) {
      if (basic[i] >= artificial_base) s += std::max(xb[i], 0.0);
    }
    return s;
  }

  // Gauss-Jordan with partial pivoting.
  static void invert(std::vector<double> a, std::vector<double>& inv, std::size_t m) {
    std::fill(inv.begin(), inv.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < m; ++r) {
        if (std::abs(a[r * m + c]) > std::abs(a[p * m + c])) p = r;
      }
      if (std::abs(a[p * m + c]) < 1e-13) throw SolverError("basis matrix is singular", 0.0);
      if (p != c) {
        for (std::size_t j = 0; j < m; ++j) {
          std::swap(a[p * m + j], a[c * m + j]);
          std::swap(inv[p * m + j], inv[c * m + j]);
        }
      }
      const double d = a[c * m + c];
      for (std::size_t j = 0; j < m; ++j) {
        a[c * m + j] /= d;
        inv[c * m + j] /= d;
      }
      for (std::size_t r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = a[r * m + c];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) {
          a[r * m + j] -= f * a[c * m + j];
          inv[r * m + j] -= f * inv[c * m + j];
        }
      }
    }
  }

  SimplexOptions opts_;
};

}  // namespace bellsim
