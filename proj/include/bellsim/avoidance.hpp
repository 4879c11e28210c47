#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellsim/bitstring.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/independent_set.hpp"
#include "bellsim/random.hpp"

namespace bellsim {

/// Subset of {0,1}^d with no two members at Hamming distance d/2.
struct AvoidanceSet {
  std::size_t d = 0;
  std::vector<BitString> members;
  bool certified = false;  // true only for an exact maximum

  std::size_t size() const noexcept { return members.size(); }
};

/// Checks every invariant of an avoidance set in O(|members|^2).
inline bool verify_avoidance(const AvoidanceSet& set) {
  if (set.d == 0 || set.d % 2 != 0) return false;
  for (const auto& m : set.members) {
    if (m.size() != set.d) return false;
  }
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    for (std::size_t j = i + 1; j < set.members.size(); ++j) {
      const std::size_t dist = hamming(set.members[i], set.members[j]);
      if (dist == 0 || dist == set.d / 2) return false;
    }
  }
  return true;
}

namespace detail {

inline void require_even(std::size_t d) {
  if (d == 0 || d % 2 != 0) throw std::invalid_argument("d must be even and positive");
}

/// All d-bit masks of weight d/2 (Gosper's hack), d <= 62.
inline std::vector<std::uint64_t> half_weight_masks(std::size_t d) {
  std::vector<std::uint64_t> masks;
  const std::size_t k = d / 2;
  std::uint64_t v = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << d;
  while (v < limit) {
    masks.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
  return masks;
}

inline AvoidanceSet from_ids(std::size_t d, const std::vector<std::uint64_t>& ids, bool certified) {
  AvoidanceSet out{d, {}, certified};
  for (auto v : ids) out.members.push_back(BitString::from_uint(d, v));
  return out;
}

}  // namespace detail

/// Conflict graph on {0,1}^d joining strings at distance d/2.
inline ConflictGraph hamming_conflict_graph(std::size_t d) {
  detail::require_even(d);
  if (d > 16) throw std::invalid_argument("conflict graph limited to d <= 16");
  const std::size_t n = std::size_t{1} << d;
  ConflictGraph g(n);
  const auto masks = detail::half_weight_masks(d);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto m : masks) {
      const std::size_t u = v ^ m;
      if (u > v) g.add_edge(v, u);
    }
  }
  return g;
}

/// Randomized greedy maximal avoidance set; the best of `restarts` runs.
/// Each run visits {0,1}^d in a seeded random order and blocks the
/// distance-d/2 sphere of every accepted string.
inline AvoidanceSet z_greedy(std::size_t d, std::uint64_t seed, std::size_t restarts = 1) {
  detail::require_even(d);
  if (d > 20) throw std::invalid_argument("greedy search limited to d <= 20");
  if (restarts == 0) restarts = 1;
  const std::size_t n = std::size_t{1} << d;
  const auto masks = detail::half_weight_masks(d);
  std::vector<std::uint64_t> best;
  std::vector<std::uint64_t> order(n);
  std::vector<char> blocked(n);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_below(rng, i + 1)]);
    std::fill(blocked.begin(), blocked.end(), 0);
    std::vector<std::uint64_t> chosen;
    for (auto v : order) {
      if (blocked[v]) continue;
      chosen.push_back(v);
      blocked[v] = 1;
      for (auto m : masks) blocked[v ^ m] = 1;
    }
    if (chosen.size() > best.size()) best = std::move(chosen);
  }
  std::sort(best.begin(), best.end());
  return detail::from_ids(d, best, false);
}

struct ExactSearchOptions {
  std::uint64_t budget = 50'000'000;  // branch-and-bound node expansions
  std::size_t d_cap = 12;
  bool symmetry_break = false;  // force 0^d into the set (valid by XOR translation)
  std::uint64_t incumbent_seed = 0;
  std::size_t incumbent_restarts = 8;
};

/// Largest avoidance set in {0,1}^d by branch and bound. Never falls back to a
/// heuristic: an exhausted budget raises BudgetExhausted with the incumbent.
inline AvoidanceSet max_z_exact(std::size_t d, const ExactSearchOptions& opts = {}) {
  detail::require_even(d);
  if (d > opts.d_cap) throw CapExceeded("exact search is capped at d <= " + std::to_string(opts.d_cap));
  if (d > 16) throw CapExceeded("exact search supports d <= 16");
  const ConflictGraph g = hamming_conflict_graph(d);
  IndependentSetOptions mis;
  mis.node_budget = opts.budget;
  const AvoidanceSet seed_set = z_greedy(d, opts.incumbent_seed, opts.incumbent_restarts);
  // XOR translation preserves distances, so the incumbent can be shifted to
  // contain 0^d when that vertex is forced.
  const std::uint64_t shift = opts.symmetry_break ? seed_set.members.front().to_uint() : 0;
  for (const auto& m : seed_set.members) mis.incumbent.push_back(m.to_uint() ^ shift);
  if (opts.symmetry_break) mis.forced.push_back(0);
  const auto result = MaxIndependentSet(g, mis).solve();
  std::vector<std::uint64_t> ids(result.members.begin(), result.members.end());
  return detail::from_ids(d, ids, true);
}

/// Largest avoidance subset of an explicit candidate list (duplicates ignored).
inline AvoidanceSet max_avoidance_subset(const std::vector<BitString>& candidates, std::size_t d,
                                         std::uint64_t budget = 50'000'000) {
  detail::require_even(d);
  std::vector<BitString> unique(candidates.begin(), candidates.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  ConflictGraph g(unique.size());
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (unique[i].size() != d) throw std::invalid_argument("candidate length differs from d");
    for (std::size_t j = i + 1; j < unique.size(); ++j) {
      if (hamming(unique[i], unique[j]) == d / 2) g.add_edge(i, j);
    }
  }
  IndependentSetOptions mis;
  mis.node_budget = budget;
  const auto result = MaxIndependentSet(g, mis).solve();
  AvoidanceSet out{d, {}, true};
  for (auto i : result.members) out.members.push_back(unique[i]);
  return out;
}

/// Maximum avoidance size by scanning all 2^(2^d) subsets; d <= 4 only.
inline std::size_t max_z_by_enumeration(std::size_t d) {
  detail::require_even(d);
  if (d > 4) throw std::invalid_argument("subset enumeration limited to d <= 4");
  const std::size_t n = std::size_t{1} << d;
  std::vector<std::uint32_t> conflicts(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (static_cast<std::size_t>(std::popcount(u ^ v)) == d / 2) conflicts[u] |= 1U << v;
    }
  }
  std::size_t best = 0;
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << n); ++subset) {
    const auto sz = static_cast<std::size_t>(std::popcount(subset));
    if (sz <= best) continue;
    bool ok = true;
    for (std::size_t u = 0; u < n && ok; ++u) {
      if (((subset >> u) & 1U) && (conflicts[u] & subset) != 0) ok = false;
    }
    if (ok) best = sz;
  }
  return best;
}

// Frankl-Rodl constant consumed by the threshold algebra: |Z| < 2^{0.993 d}.
inline constexpr double kFranklRodlExponent = 0.993;
inline constexpr double kAsymptoticRate = 0.0035;

/// sqrt(d) 2^{-0.0035 d}.
inline double eta_asymptotic_bound(std::size_t d) {
  return std::exp2(0.5 * std::log2(static_cast<double>(d)) - kAsymptoticRate * static_cast<double>(d));
}

/// sqrt(d |Z| / 2^d) from log2 |Z|, evaluated in the log domain.
inline double eta_bound_from_log2_z(std::size_t d, double log2_z) {
  return std::exp2(0.5 * (std::log2(static_cast<double>(d)) + log2_z - static_cast<double>(d)));
}

enum class ZSource { exact, greedy, fr_bound };

inline const char* to_string(ZSource s) {
  switch (s) {
    case ZSource::exact: return "exact";
    case ZSource::greedy: return "greedy";
    case ZSource::fr_bound: return "fr_bound";
  }
  return "?";
}

inline ZSource parse_z_source(const std::string& s) {
  if (s == "exact") return ZSource::exact;
  if (s == "greedy") return ZSource::greedy;
  if (s == "fr_bound" || s == "fr") return ZSource::fr_bound;
  throw std::invalid_argument("unknown z source: " + s);
}

struct ThresholdReport {
  std::size_t d = 0;
  ZSource source = ZSource::fr_bound;
  std::optional<std::size_t> z_size;  // absent for the Frankl-Rodl bound
  double log2_z = 0.0;
  double eta_exact_bound = 0.0;  // may exceed 1; see closes_loophole
  double eta_asymptotic_bound = 0.0;
  double fr_bound_log2 = 0.0;
  bool closes_loophole = false;  // eta_exact_bound < 1
  bool lower_bound_only = false;  // greedy |Z| only bounds the maximum from below
};

struct ThresholdOptions {
  ExactSearchOptions exact;
  std::uint64_t seed = 0;
  std::size_t restarts = 16;
};

inline ThresholdReport threshold_report(std::size_t d, ZSource source, const ThresholdOptions& opts = {}) {
  detail::require_even(d);
  if (d < 4) throw std::invalid_argument("threshold report needs d >= 4");
  ThresholdReport r;
  r.d = d;
  r.source = source;
  r.fr_bound_log2 = kFranklRodlExponent * static_cast<double>(d);
  r.eta_asymptotic_bound = eta_asymptotic_bound(d);
  switch (source) {
    case ZSource::exact:
      r.z_size = max_z_exact(d, opts.exact).size();
      r.log2_z = std::log2(static_cast<double>(*r.z_size));
      break;
    case ZSource::greedy:
      r.z_size = z_greedy(d, opts.seed, opts.restarts).size();
      r.log2_z = std::log2(static_cast<double>(*r.z_size));
      r.lower_bound_only = true;
      break;
    case ZSource::fr_bound:
      r.log2_z = r.fr_bound_log2;
      break;
  }
  r.eta_exact_bound = eta_bound_from_log2_z(d, r.log2_z);
  r.closes_loophole = r.eta_exact_bound < 1.0;
  return r;
}

/// Smallest even d with sqrt(d) 2^{-0.0035 d} < 1.
inline std::size_t first_asymptotic_crossing() {
  for (std::size_t d = 2;; d += 2) {
    if (eta_asymptotic_bound(d) < 1.0) return d;
  }
}

struct CurveRow {
  std::size_t d = 0;
  double eta_asymptotic_bound = 0.0;
  std::optional<double> eta_source_bound;
  bool closes_loophole = false;
};

struct ThresholdCurve {
  std::vector<CurveRow> rows;
  std::size_t first_crossing = 0;
};

/// Asymptotic-bound curve over [d_min, d_max]; the exact or greedy column is filled
/// where that source is computable (exact: d <= cap, greedy: d <= 20).
inline ThresholdCurve threshold_curve(std::size_t d_min, std::size_t d_max, std::size_t step, ZSource source,
                                      const ThresholdOptions& opts = {}) {
  if (step == 0 || step % 2 != 0 || d_min % 2 != 0 || d_min == 0) {
    throw std::invalid_argument("curve needs even d_min > 0 and an even step");
  }
  ThresholdCurve curve;
  curve.first_crossing = first_asymptotic_crossing();
  for (std::size_t d = d_min; d <= d_max; d += step) {
    CurveRow row{d, eta_asymptotic_bound(d), std::nullopt, false};
    row.closes_loophole = row.eta_asymptotic_bound < 1.0;
    if (source == ZSource::exact && d >= 4 && d <= std::min<std::size_t>(opts.exact.d_cap, 8)) {
      row.eta_source_bound = threshold_report(d, source, opts).eta_exact_bound;
    } else if (source == ZSource::greedy && d >= 4 && d <= 20) {
      row.eta_source_bound = threshold_report(d, source, opts).eta_exact_bound;
    }
    curve.rows.push_back(row);
  }
  return curve;
}

}  // namespace bellsim
