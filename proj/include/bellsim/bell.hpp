#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bellsim/bitstring.hpp"
#include "bellsim/random.hpp"
#include "bellsim/scenario.hpp"

namespace bellsim {

/// +1 if x == y, -1 if the strings are d/2 apart, 0 otherwise.
inline int alpha(const BitString& x, const BitString& y) {
  const std::size_t dist = hamming(x, y);
  if (dist == 0) return 1;
  if (x.size() % 2 == 0 && dist == x.size() / 2) return -1;
  return 0;
}

/// log2 C(n, k) through lgamma.
inline double log2_binomial(std::size_t n, std::size_t k) {
  const double ln = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0);
  return ln / std::log(2.0);
}

/// C(d, d/2): exact integer arithmetic up to d = 60, log domain beyond.
inline double central_binomial(std::size_t d) {
  if (d <= 60) {
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= d / 2; ++i) c = c * (d / 2 + i) / i;
    return static_cast<double>(c);
  }
  return std::exp2(log2_binomial(d, d / 2));
}

/// Value of the Bell expression. `raw` is only reported for d <= 64.
struct BellValue {
  std::size_t d = 0;
  double eta = 0.0;
  double w = 0.0;
  double normalized = 0.0;
  std::optional<double> raw;
};

inline BellValue make_bell_value(std::size_t d, double eta, double w, double normalized) {
  BellValue v{d, eta, w, normalized, std::nullopt};
  if (d <= 64) v.raw = std::ldexp(normalized, static_cast<int>(d));
  return v;
}

inline void require_power_of_two_dimension(std::size_t d) {
  if (d < 4 || !std::has_single_bit(d)) throw std::invalid_argument("d must be a power of two >= 4");
}

/// Bit string of length d with the first d/2 bits set.
inline BitString half_weight_string(std::size_t d) {
  BitString z(d);
  for (std::size_t k = 0; k < d / 2; ++k) z.set(k, true);
  return z;
}

/// Quantum value eta^2 2^d. The closed form is cross-checked against the
/// translation-reduced sum 2^d [S(0) - C(d,d/2) S(z_half)], S(z) = P(a=b!=0 | x, x^z).
inline BellValue bell_value_quantum(std::size_t d, Efficiency em) {
  require_power_of_two_dimension(d);
  const Scenario s = build_bct_scenario(std::countr_zero(d));
  const double eta = em.value();
  const BitString origin(d);
  auto same_click = [&](const BitString& z) {
    // Every a = b term shares c = 0, so S(z) = d * P(1,1).
    return static_cast<double>(d) * joint_prob(s, origin, z, 1, 1, em);
  };
  const double s0 = same_click(origin);
  const double s_half = same_click(half_weight_string(d));
  if (s_half != 0.0) throw std::logic_error("implicit family violates the distance-d/2 property");
  const double reduced = s0 - central_binomial(d) * s_half;
  const double closed = eta * eta;
  if (std::abs(reduced - closed) > 1e-12) throw std::logic_error("closed form and reduced sum disagree");
  return make_bell_value(d, eta, 0.0, closed);
}

using TableProvider = std::function<JointTable(const BitString&, const BitString&)>;

enum class SumMode {
  automatic,  // full for d <= 4, reduced otherwise
  full,       // double sum over all 4^d setting pairs
  reduced,    // providers symmetric under XOR translation and bit permutation
};

/// Bell value of an arbitrary table provider. The reduced mode evaluates two
/// representative pairs and re-checks them at a second representative each,
/// rejecting providers that are not symmetric.
inline BellValue bell_value_from_table(const TableProvider& provider, std::size_t d, SumMode mode = SumMode::automatic,
                                       double eta = 0.0, double w = 0.0) {
  if (d == 0 || d % 2 != 0) throw std::invalid_argument("d must be even and positive");
  if (mode == SumMode::automatic) mode = d <= 4 ? SumMode::full : SumMode::reduced;
  auto same_click = [&](const BitString& x, const BitString& y) {
    const JointTable t = provider(x, y);
    if (t.d() != d) throw ValidationError("provider returned a table of the wrong dimension");
    t.validate();
    return t.same_click();
  };
  if (mode == SumMode::full) {
    if (d > 4) throw std::invalid_argument("full double sum is limited to d <= 4");
    const auto labels = all_bitstrings(d);
    double sum = 0.0;
    for (const auto& x : labels) {
      for (const auto& y : labels) {
        const int a = alpha(x, y);
        if (a != 0) sum += a * same_click(x, y);
      }
    }
    return make_bell_value(d, eta, w, std::ldexp(sum, -static_cast<int>(d)));
  }
  if (d > 64) throw std::invalid_argument("reduced sum is limited to d <= 64");
  const BitString origin(d);
  const BitString z_half = half_weight_string(d);
  BitString other(d);
  BitString z_other(d);
  for (std::size_t k = 0; k < d; k += 2) other.set(k, true);
  for (std::size_t k = 0; k < d / 2; ++k) z_other.set(2 * k + (k % 2), true);
  const double s0 = same_click(origin, origin);
  const double s_half = same_click(origin, z_half);
  if (std::abs(same_click(other, other) - s0) > kNormalizationTol ||
      std::abs(same_click(other, other ^ z_other) - s_half) > kNormalizationTol) {
    throw ValidationError("provider is not symmetric; use the full sum");
  }
  return make_bell_value(d, eta, w, s0 - central_binomial(d) * s_half);
}

/// Bell value for the white-noise state (1-w)|psi><psi| + w 1/d^2:
/// I = eta^2 2^d [(1-w) + w/d - C(d,d/2) w/d].
inline BellValue bell_value_noisy(std::size_t d, Efficiency em, double w) {
  require_power_of_two_dimension(d);
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("noise weight must lie in [0, 1]");
  const double eta = em.value();
  const double dd = static_cast<double>(d);
  double penalty = 0.0;
  if (w > 0.0) penalty = d <= 60 ? central_binomial(d) * w / dd : std::exp2(log2_binomial(d, d / 2) + std::log2(w / dd));
  return make_bell_value(d, eta, w, eta * eta * ((1.0 - w) + w / dd - penalty));
}

struct SampleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t shards = 0;
};

inline constexpr std::uint64_t kSamplesPerShard = 1U << 16;

namespace detail {

struct StratumTally {
  std::uint64_t n_same = 0, hits_same = 0;
  std::uint64_t n_half = 0, hits_half = 0;
};

// Bounded integer from a 32-bit draw (Lemire); exact by rejection.
inline std::uint32_t bounded32(Rng& rng, std::uint32_t n) {
  std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(rng() >> 32)) * n;
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(rng() >> 32)) * n;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

}  // namespace detail

/// Stratified estimate of the normalized Bell value I/2^d for the implicit
/// family. Even sample indices draw x = y, odd ones draw y = x with a uniform
/// d/2-subset flipped; the strata carry exact weights 1 and C(d,d/2) in the
/// normalized domain. Each pair is simulated under the efficiency model: two
/// independent click draws, then a = b with probability (d - 2|x^y|)^2 / d^2.
/// Shards are fixed by the sample count, so `workers` never changes the result.
inline SampleEstimate estimate_bell_sampled(const Scenario& s, Efficiency em, std::uint64_t samples,
                                            std::uint64_t seed, std::size_t workers = 1) {
  if (!s.is_bct()) throw std::invalid_argument("sampling requires the implicit family");
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  const std::size_t d = s.d();
  const double eta = em.value();
  const std::uint64_t shards = (samples + kSamplesPerShard - 1) / kSamplesPerShard;
  std::vector<detail::StratumTally> tallies(shards);

  run_shards(shards, workers, [&](std::size_t shard) {
    Rng rng(derive_seed(seed, shard));
    std::vector<std::uint32_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0U);
    BitString x(d);
    BitString y(d);
    detail::StratumTally tally;
    const std::uint64_t begin = shard * kSamplesPerShard;
    const std::uint64_t end = std::min(samples, begin + kSamplesPerShard);
    const std::size_t nwords = (d + 63) / 64;
    for (std::uint64_t i = begin; i < end; ++i) {
      for (std::size_t wdx = 0; wdx < nwords; ++wdx) x.set_word(wdx, rng());
      y = x;
      const bool same_stratum = i % 2 == 0;
      if (!same_stratum) {
        // Partial Fisher-Yates; the permutation need not be reset between draws.
        for (std::size_t k = 0; k < d / 2; ++k) {
          const std::size_t j = k + detail::bounded32(rng, static_cast<std::uint32_t>(d - k));
          std::swap(perm[k], perm[j]);
          y.flip(perm[k]);
        }
      }
      const bool alice_click = bernoulli(rng, eta);
      const bool bob_click = bernoulli(rng, eta);
      bool hit = false;
      if (alice_click && bob_click) {
        const double bias = static_cast<double>(d) - 2.0 * static_cast<double>(hamming(x, y));
        hit = bernoulli(rng, bias * bias / (static_cast<double>(d) * static_cast<double>(d)));
      }
      if (same_stratum) {
        ++tally.n_same;
        tally.hits_same += hit ? 1 : 0;
      } else {
        ++tally.n_half;
        tally.hits_half += hit ? 1 : 0;
      }
    }
    tallies[shard] = tally;
  });

  detail::StratumTally total;
  for (const auto& t : tallies) {
    total.n_same += t.n_same;
    total.hits_same += t.hits_same;
    total.n_half += t.n_half;
    total.hits_half += t.hits_half;
  }
  auto mean_var = [](std::uint64_t n, std::uint64_t hits) {
    const double m = static_cast<double>(hits) / static_cast<double>(n);
    const double var = n > 1 ? m * (1.0 - m) * static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;
    return std::pair{m, var};
  };
  SampleEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.shards = shards;
  const auto [mean_same, var_same] = mean_var(total.n_same, total.hits_same);
  est.mean = mean_same;
  double var = var_same / static_cast<double>(total.n_same);
  if (total.n_half == 0) {
    est.std_error = std::numeric_limits<double>::infinity();
    return est;
  }
  if (total.hits_half > 0) {
    const auto [mean_half, var_half] = mean_var(total.n_half, total.hits_half);
    const double weight = central_binomial(d);
    est.mean -= weight * mean_half;
    var += weight * weight * var_half / static_cast<double>(total.n_half);
  }
  est.std_error = std::sqrt(var);
  return est;
}

}  // namespace bellsim
