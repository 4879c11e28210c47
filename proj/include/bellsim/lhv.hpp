#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/avoidance.hpp"
#include "bellsim/bell.hpp"
#include "bellsim/random.hpp"
#include "bellsim/scenario.hpp"
#include "bellsim/simplex.hpp"

namespace bellsim {

/// Deterministic local strategy: f maps Alice's label index to an outcome, g
/// does the same for Bob. Label lists are kept by the caller.
struct DeterministicStrategyPair {
  std::vector<Outcome> f;
  std::vector<Outcome> g;
};

struct WeightedStrategy {
  double weight = 0.0;
  DeterministicStrategyPair pair;
};

/// Finite mixture of deterministic strategy pairs.
struct LhvModel {
  std::vector<WeightedStrategy> strategies;

  void validate(std::size_t d, double tol = kNormalizationTol) const {
    double total = 0.0;
    for (const auto& s : strategies) {
      if (s.weight < 0.0) throw ValidationError("negative strategy weight");
      for (Outcome o : s.pair.f) {
        if (o > d) throw ValidationError("strategy outcome exceeds d");
      }
      for (Outcome o : s.pair.g) {
        if (o > d) throw ValidationError("strategy outcome exceeds d");
      }
      total += s.weight;
    }
    if (std::abs(total - 1.0) > tol) throw ValidationError("strategy weights do not sum to 1");
  }
};

// ---------------------------------------------------------------------------
// Bell value of local models

/// alpha(x, y) for every pair drawn from two label lists.
class AlphaMatrix {
 public:
  AlphaMatrix(std::span<const BitString> alice, std::span<const BitString> bob)
      : rows_(alice.size()), cols_(bob.size()), a_(rows_ * cols_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) a_[i * cols_ + j] = static_cast<std::int8_t>(alpha(alice[i], bob[j]));
    }
  }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

 private:
  std::size_t rows_, cols_;
  std::vector<std::int8_t> a_;
};

/// sum_k sum_{x in X_k} sum_{y in Y_k} alpha(x, y) for one deterministic pair.
inline long long lv_bell_value(const DeterministicStrategyPair& pair, const AlphaMatrix& alpha_m) {
  if (pair.f.size() != alpha_m.rows() || pair.g.size() != alpha_m.cols()) {
    throw std::invalid_argument("strategy tables do not match the label lists");
  }
  long long total = 0;
  for (std::size_t i = 0; i < alpha_m.rows(); ++i) {
    const Outcome k = pair.f[i];
    if (k == 0) continue;
    for (std::size_t j = 0; j < alpha_m.cols(); ++j) {
      if (pair.g[j] == k) total += alpha_m(i, j);
    }
  }
  return total;
}

inline long long lv_bell_value(const DeterministicStrategyPair& pair, std::span<const BitString> labels) {
  return lv_bell_value(pair, AlphaMatrix(labels, labels));
}

/// Bell value of a mixture: the weighted sum of its deterministic values.
inline double lv_bell_value(const LhvModel& model, const AlphaMatrix& alpha_m) {
  double total = 0.0;
  for (const auto& s : model.strategies) total += s.weight * static_cast<double>(lv_bell_value(s.pair, alpha_m));
  return total;
}

/// Uniformly random outcome tables over {0..d}.
inline DeterministicStrategyPair random_strategy_pair(std::size_t labels_a, std::size_t labels_b, std::size_t d, Rng& rng) {
  DeterministicStrategyPair p;
  p.f.resize(labels_a);
  p.g.resize(labels_b);
  for (auto& o : p.f) o = static_cast<Outcome>(uniform_below(rng, d + 1));
  for (auto& o : p.g) o = static_cast<Outcome>(uniform_below(rng, d + 1));
  return p;
}

struct BestResponseResult {
  DeterministicStrategyPair pair;
  long long value = 0;
  std::vector<long long> history;  // value after every half-step, starting with the initial pair
};

namespace detail {

// Best response of one side against the other side's table; ties go to the
// smallest outcome, and 0 is chosen only when every score is non-positive.
inline void best_response(std::vector<Outcome>& mine, const std::vector<Outcome>& theirs, std::size_t d,
                          const AlphaMatrix& alpha_m, bool mine_is_alice) {
  std::vector<long long> score(d + 1);
  for (std::size_t i = 0; i < mine.size(); ++i) {
    std::fill(score.begin(), score.end(), 0);
    for (std::size_t j = 0; j < theirs.size(); ++j) {
      if (theirs[j] != 0) score[theirs[j]] += mine_is_alice ? alpha_m(i, j) : alpha_m(j, i);
    }
    Outcome best = 0;
    long long best_score = 0;
    for (Outcome k = 1; k <= d; ++k) {
      if (score[k] > best_score) {
        best_score = score[k];
        best = k;
      }
    }
    mine[i] = best;
  }
}

}  // namespace detail

/// Alternating best-response ascent on the Bell value from a seeded random
/// start (or `start` when given). Stops after `iterations` rounds or at a
/// fixed point.
inline BestResponseResult best_response_maximize(std::span<const BitString> labels, std::size_t d, std::uint64_t seed,
                                                 std::size_t iterations,
                                                 std::optional<DeterministicStrategyPair> start = std::nullopt) {
  const AlphaMatrix alpha_m(labels, labels);
  BestResponseResult r;
  if (start) {
    r.pair = *start;
  } else {
    Rng rng(seed);
    r.pair = random_strategy_pair(labels.size(), labels.size(), d, rng);
  }
  r.value = lv_bell_value(r.pair, alpha_m);
  r.history.push_back(r.value);
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto before = r.pair;
    detail::best_response(r.pair.f, r.pair.g, d, alpha_m, true);
    r.history.push_back(lv_bell_value(r.pair, alpha_m));
    detail::best_response(r.pair.g, r.pair.f, d, alpha_m, false);
    r.value = lv_bell_value(r.pair, alpha_m);
    r.history.push_back(r.value);
    if (r.pair.f == before.f && r.pair.g == before.g) break;
  }
  return r;
}

struct BetaLemmaResult {
  long long beta = 0;
  bool lemma_holds = false;
  bool x_in_max_subset = false;
  std::size_t max_subset_size = 0;
};

/// beta(x) = sum_{y in Y} alpha(x, y) over the distinct members of Y, checked
/// against a maximum avoidance subset Z' of Y plus x: beta <= 1 always, and
/// beta <= 0 whenever x is not in Z'.
inline BetaLemmaResult beta_lemma_check(const BitString& x, const std::vector<BitString>& ys) {
  if (x.size() % 2 != 0) throw std::invalid_argument("beta lemma needs even d");
  std::vector<BitString> unique = ys;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  BetaLemmaResult r;
  for (const auto& y : unique) r.beta += alpha(x, y);
  std::vector<BitString> candidates = unique;
  candidates.push_back(x);
  const AvoidanceSet z = max_avoidance_subset(candidates, x.size());
  r.max_subset_size = z.size();
  r.x_in_max_subset = std::find(z.members.begin(), z.members.end(), x) != z.members.end();
  r.lemma_holds = r.beta <= 1 && (r.x_in_max_subset || r.beta <= 0);
  return r;
}

// ---------------------------------------------------------------------------
// Models reproducing the efficiency-eta statistics

/// Outcome distribution of a model for label indices (ix, iy).
inline JointTable model_table(const LhvModel& model, std::size_t ix, std::size_t iy, std::size_t d) {
  JointTable t(d);
  for (const auto& s : model.strategies) t.at(s.pair.f.at(ix), s.pair.g.at(iy)) += s.weight;
  return t;
}

/// max over (x, y, a, b) of |P_model - P_target| for the given label lists.
inline double verify_model_reproduces(const LhvModel& model, const Scenario& s, Efficiency em,
                                      std::span<const Setting> labels_a, std::span<const Setting> labels_b) {
  const std::size_t d = s.d();
  double worst = 0.0;
  for (std::size_t ix = 0; ix < labels_a.size(); ++ix) {
    for (std::size_t iy = 0; iy < labels_b.size(); ++iy) {
      const JointTable target = outcome_table(s, labels_a[ix], labels_b[iy], em);
      const JointTable got = model_table(model, ix, iy, d);
      for (Outcome a = 0; a <= d; ++a) {
        for (Outcome b = 0; b <= d; ++b) worst = std::max(worst, std::abs(got.at(a, b) - target.at(a, b)));
      }
    }
  }
  return worst;
}

struct PopescuModel {
  LhvModel model;
  double eta = 0.0;
};

/// Hidden variable (x, i, y, j) with weight P(i, j | x, y) / M^2 at perfect
/// efficiency. Alice answers i if her label is x and 0 otherwise; Bob
/// likewise. Reproduces the efficiency-1/M statistics exactly.
inline PopescuModel popescu_model(std::span<const Setting> labels_a, std::span<const Setting> labels_b, const Scenario& s) {
  const std::size_t m = labels_a.size();
  if (m == 0) throw std::invalid_argument("popescu model needs at least one label");
  if (labels_b.size() != m) throw std::invalid_argument("popescu model needs |M_A| = |M_B|");
  const std::size_t d = s.d();
  const double scale = 1.0 / static_cast<double>(m * m);
  PopescuModel out;
  out.eta = 1.0 / static_cast<double>(m);
  for (std::size_t ix = 0; ix < m; ++ix) {
    for (std::size_t iy = 0; iy < m; ++iy) {
      const JointTable perfect = outcome_table(s, labels_a[ix], labels_b[iy], Efficiency(1.0));
      for (Outcome i = 1; i <= d; ++i) {
        for (Outcome j = 1; j <= d; ++j) {
          const double p = perfect.at(i, j);
          if (p <= 0.0) continue;
          DeterministicStrategyPair pair{std::vector<Outcome>(m, 0), std::vector<Outcome>(m, 0)};
          pair.f[ix] = i;
          pair.g[iy] = j;
          out.model.strategies.push_back({p * scale, std::move(pair)});
        }
      }
    }
  }
  return out;
}

/// Each party independently replaces its strategy by "never click" with
/// probability 1 - keep. Scales the efficiency of a model by `keep`.
inline LhvModel blur_model(const LhvModel& model, double keep) {
  if (!(keep >= 0.0 && keep <= 1.0)) throw std::invalid_argument("keep probability must lie in [0, 1]");
  if (keep == 1.0) return model;
  LhvModel out;
  for (const auto& s : model.strategies) {
    const std::vector<Outcome> silent_f(s.pair.f.size(), 0);
    const std::vector<Outcome> silent_g(s.pair.g.size(), 0);
    const double w = s.weight;
    if (keep > 0.0) {
      out.strategies.push_back({w * keep * keep, s.pair});
      out.strategies.push_back({w * keep * (1 - keep), {s.pair.f, silent_g}});
      out.strategies.push_back({w * (1 - keep) * keep, {silent_f, s.pair.g}});
    }
    out.strategies.push_back({w * (1 - keep) * (1 - keep), {silent_f, silent_g}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// LP feasibility over all deterministic strategy pairs

struct FeasibilityOptions {
  std::uint64_t strategy_cap = 1'000'000;
  double residual_tol = 1e-9;
  SimplexOptions simplex;
};

struct FeasibilityResult {
  bool feasible = false;
  double eta = 0.0;
  double residual = 0.0;  // max constraint violation of the certificate (feasible case)
  double phase1_objective = 0.0;
  std::uint64_t strategy_count = 0;
  std::uint64_t pivots = 0;
  std::optional<LhvModel> certificate;
};

namespace detail {

inline std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (v > cap / base + 1) return std::numeric_limits<std::uint64_t>::max();
    v *= base;
  }
  return v;
}

// Outcome table of strategy index `code`: label 0 is the most significant digit.
inline void decode_strategy(std::uint64_t code, std::size_t labels, std::size_t base, std::vector<Outcome>& out) {
  out.resize(labels);
  for (std::size_t i = labels; i-- > 0;) {
    out[i] = static_cast<Outcome>(code % base);
    code /= base;
  }
}

}  // namespace detail

/// Number of deterministic strategy pairs (d+1)^{|M_A|} (d+1)^{|M_B|}, saturating.
inline std::uint64_t strategy_pair_count(std::size_t d, std::size_t labels_a, std::size_t labels_b,
                                         std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 2) {
  const std::uint64_t na = detail::checked_power(d + 1, labels_a, cap);
  const std::uint64_t nb = detail::checked_power(d + 1, labels_b, cap);
  if (na == std::numeric_limits<std::uint64_t>::max() || nb == std::numeric_limits<std::uint64_t>::max() ||
      (nb != 0 && na > cap / nb + 1)) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return na * nb;
}

/// Is there a local model over all deterministic strategy pairs that matches
/// every efficiency-eta probability? Columns are strategy pairs enumerated
/// lexicographically (Alice's table first); rows are (x, y, a, b).
inline FeasibilityResult local_feasibility_lp(const Scenario& s, std::span<const Setting> labels_a,
                                              std::span<const Setting> labels_b, Efficiency em,
                                              const FeasibilityOptions& opts = {},
                                              const FeasibilityBackend* backend = nullptr) {
  if (labels_a.empty() || labels_b.empty()) throw std::invalid_argument("LP needs at least one label per side");
  const std::size_t d = s.d();
  const std::size_t base = d + 1;
  const std::size_t ma = labels_a.size();
  const std::size_t mb = labels_b.size();
  const std::uint64_t count = strategy_pair_count(d, ma, mb, opts.strategy_cap);
  if (count > opts.strategy_cap) {
    throw CapExceeded("strategy-pair count exceeds the cap of " + std::to_string(opts.strategy_cap));
  }
  const std::uint64_t nb = detail::checked_power(base, mb, opts.strategy_cap);
  auto row_of = [&](std::size_t ix, std::size_t iy, Outcome a, Outcome b) {
    return ((ix * mb + iy) * base + a) * base + b;
  };

  ImplicitColumnLp lp;
  lp.rows = ma * mb * base * base;
  lp.cols = count;
  lp.rhs.resize(lp.rows);
  std::vector<JointTable> targets;
  for (std::size_t ix = 0; ix < ma; ++ix) {
    for (std::size_t iy = 0; iy < mb; ++iy) {
      targets.push_back(outcome_table(s, labels_a[ix], labels_b[iy], em));
      for (Outcome a = 0; a <= d; ++a) {
        for (Outcome b = 0; b <= d; ++b) lp.rhs[row_of(ix, iy, a, b)] = std::max(0.0, targets.back().at(a, b));
      }
    }
  }
  std::vector<Outcome> f, g;
  lp.column = [&](std::uint64_t col, std::vector<std::pair<std::size_t, double>>& entries) {
    detail::decode_strategy(col / nb, ma, base, f);
    detail::decode_strategy(col % nb, mb, base, g);
    for (std::size_t ix = 0; ix < ma; ++ix) {
      for (std::size_t iy = 0; iy < mb; ++iy) entries.emplace_back(row_of(ix, iy, f[ix], g[iy]), 1.0);
    }
  };

  const DenseSimplex fallback(opts.simplex);
  const SimplexResult sol = (backend != nullptr ? *backend : static_cast<const FeasibilityBackend&>(fallback)).solve(lp);

  FeasibilityResult r;
  r.eta = em.value();
  r.strategy_count = count;
  r.phase1_objective = sol.phase1_objective;
  r.pivots = sol.pivots;
  r.feasible = sol.feasible;
  if (!sol.feasible) return r;

  LhvModel cert;
  for (auto [col, w] : sol.solution) {
    DeterministicStrategyPair pair;
    detail::decode_strategy(col / nb, ma, base, pair.f);
    detail::decode_strategy(col % nb, mb, base, pair.g);
    cert.strategies.push_back({w, std::move(pair)});
  }
  r.residual = verify_model_reproduces(cert, s, em, labels_a, labels_b);
  if (r.residual > opts.residual_tol) {
    throw SolverError("LP certificate fails re-verification", r.residual);
  }
  r.certificate = std::move(cert);
  return r;
}

struct EtaStarResult {
  double eta_star = 1.0;
  double lower = 0.0;  // largest efficiency found feasible
  double upper = 1.0;  // smallest efficiency found infeasible
  bool no_violation = false;  // feasible already at eta = 1
  std::size_t lp_calls = 0;
};

/// Critical efficiency by bisection on LP feasibility. Relies on feasibility
/// being downward closed in eta (see blur_model).
inline EtaStarResult eta_star_bisection(const Scenario& s, std::span<const Setting> labels_a,
                                        std::span<const Setting> labels_b, double tol,
                                        const FeasibilityOptions& opts = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  EtaStarResult r;
  ++r.lp_calls;
  if (local_feasibility_lp(s, labels_a, labels_b, Efficiency(1.0), opts).feasible) {
    r.eta_star = 1.0;
    r.lower = 1.0;
    r.no_violation = true;
    return r;
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ++r.lp_calls;
    if (local_feasibility_lp(s, labels_a, labels_b, Efficiency(mid), opts).feasible) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.lower = lo;
  r.upper = hi;
  r.eta_star = 0.5 * (lo + hi);
  return r;
}

}  // namespace bellsim
