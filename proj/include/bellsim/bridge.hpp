#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "bellsim/lhv.hpp"
#include "bellsim/random.hpp"
#include "bellsim/scenario.hpp"

namespace bellsim {

inline constexpr const char* kHeuristicBridgeLabel = "heuristic bridge";
inline constexpr std::uint64_t kDefaultIterationCap = 1'000'000;
inline constexpr std::uint64_t kTrialsPerShard = 65536;

enum class Side { alice, bob };

struct Transcript {
  std::vector<std::pair<Side, bool>> bits;

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t count(Side side) const {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [&](const auto& b) { return b.first == side; }));
  }
};

// ---------------------------------------------------------------------------
// Inefficient-detector local model as a sampler of hidden variables

/// Finite LHV model with clicks at a nominal efficiency. Hidden variables are
/// drawn i.i.d. by inverse-CDF lookup over the strategy weights.
class LvModelWithEta {
 public:
  LvModelWithEta(LhvModel model, double eta) : model_(std::move(model)), eta_(eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("rejection sampling needs 0 < eta <= 1");
    if (model_.strategies.empty()) throw std::invalid_argument("model has no strategies");
    double acc = 0.0;
    for (const auto& s : model_.strategies) {
      acc += s.weight;
      cdf_.push_back(acc);
    }
    for (auto& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }

  double eta() const noexcept { return eta_; }
  const LhvModel& model() const noexcept { return model_; }
  std::size_t alice_labels() const { return model_.strategies.front().pair.f.size(); }
  std::size_t bob_labels() const { return model_.strategies.front().pair.g.size(); }

  const DeterministicStrategyPair& draw(Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return model_.strategies[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1))].pair;
  }

 private:
  LhvModel model_;
  double eta_;
  std::vector<double> cdf_;
};

/// Local model reproducing efficiency eta on M = floor(1/eta) labels per side:
/// the one-setting-per-hidden-variable model at 1/M, blurred down to eta.
inline LvModelWithEta efficiency_model(const Scenario& s, std::span<const Setting> labels_a,
                                       std::span<const Setting> labels_b, double eta) {
  const double m = static_cast<double>(labels_a.size());
  if (!(eta > 0.0) || eta * m > 1.0 + 1e-12) {
    throw std::invalid_argument("a local model of this kind needs 0 < eta <= 1/M");
  }
  auto base = popescu_model(labels_a, labels_b, s);
  return LvModelWithEta(blur_model(base.model, std::min(1.0, eta * m)), eta);
}

struct RejectionOutcome {
  Outcome a = 0;
  Outcome b = 0;
  std::uint64_t iterations = 0;
  Transcript transcript;
};

namespace detail {

template <bool Record>
RejectionOutcome run_rejection(const LvModelWithEta& model, std::size_t ix, std::size_t iy, Rng& rng,
                               std::uint64_t cap) {
  RejectionOutcome out;
  while (true) {
    if (out.iterations == cap) {
      throw CapExceeded("rejection protocol exceeded " + std::to_string(cap) + " iterations");
    }
    ++out.iterations;
    const auto& pair = model.draw(rng);
    const Outcome a = pair.f.at(ix);
    const Outcome b = pair.g.at(iy);
    if constexpr (Record) {
      out.transcript.bits.emplace_back(Side::alice, a != 0);
      out.transcript.bits.emplace_back(Side::bob, b != 0);
    }
    if (a != 0 && b != 0) {
      out.a = a;
      out.b = b;
      return out;
    }
  }
}

}  // namespace detail

/// Run hidden variables until both sides click; each round costs one click
/// announcement per side.
inline RejectionOutcome simulate_rejection_protocol(const LvModelWithEta& model, std::size_t ix, std::size_t iy,
                                                    std::uint64_t seed, std::uint64_t cap = kDefaultIterationCap) {
  Rng rng(seed);
  return detail::run_rejection<true>(model, ix, iy, rng, cap);
}

struct TranscriptStats {
  double eta = 0.0;
  std::uint64_t trials = 0;
  double mean_bits = 0.0;
  double mean_iterations = 0.0;
  double var_iterations = 0.0;
  // histogram[pair][(a-1)*d + (b-1)]
  std::vector<std::vector<std::uint64_t>> histogram;
  std::vector<std::pair<std::size_t, std::size_t>> label_pairs;
};

/// Trial t uses label pair t mod |pairs|. Trials are grouped into fixed shards
/// with derived seeds, so the result does not depend on `workers`.
inline TranscriptStats average_communication_stats(const LvModelWithEta& model, std::size_t d,
                                                   std::vector<std::pair<std::size_t, std::size_t>> label_pairs,
                                                   std::uint64_t trials, std::uint64_t seed, std::size_t workers = 1,
                                                   std::uint64_t cap = kDefaultIterationCap) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (label_pairs.empty()) throw std::invalid_argument("no label pairs");
  const std::uint64_t shards = (trials + kTrialsPerShard - 1) / kTrialsPerShard;
  struct Tally {
    std::uint64_t iterations = 0;
    double iter_sq = 0.0;
    std::vector<std::vector<std::uint64_t>> hist;
  };
  std::vector<Tally> tallies(shards);
  run_shards(shards, workers, [&](std::size_t shard) {
    Rng rng(derive_seed(seed, shard));
    Tally t;
    t.hist.assign(label_pairs.size(), std::vector<std::uint64_t>(d * d, 0));
    const std::uint64_t begin = shard * kTrialsPerShard;
    const std::uint64_t end = std::min(trials, begin + kTrialsPerShard);
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::size_t p = i % label_pairs.size();
      const auto r = detail::run_rejection<false>(model, label_pairs[p].first, label_pairs[p].second, rng, cap);
      t.iterations += r.iterations;
      t.iter_sq += static_cast<double>(r.iterations) * static_cast<double>(r.iterations);
      ++t.hist[p][(r.a - 1) * d + (r.b - 1)];
    }
    tallies[shard] = std::move(t);
  });

  TranscriptStats st;
  st.eta = model.eta();
  st.trials = trials;
  st.label_pairs = std::move(label_pairs);
  st.histogram.assign(st.label_pairs.size(), std::vector<std::uint64_t>(d * d, 0));
  std::uint64_t iterations = 0;
  double iter_sq = 0.0;
  for (const auto& t : tallies) {
    iterations += t.iterations;
    iter_sq += t.iter_sq;
    for (std::size_t p = 0; p < t.hist.size(); ++p) {
      for (std::size_t c = 0; c < t.hist[p].size(); ++c) st.histogram[p][c] += t.hist[p][c];
    }
  }
  const double n = static_cast<double>(trials);
  st.mean_iterations = static_cast<double>(iterations) / n;
  st.mean_bits = 2.0 * st.mean_iterations;
  st.var_iterations = trials > 1 ? (iter_sq - n * st.mean_iterations * st.mean_iterations) / (n - 1.0) : 0.0;
  return st;
}

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of the outcome histogram against the target outcome
/// distribution conditioned on both parties clicking.
inline ChiSquare chi_square_against(const TranscriptStats& st, const Scenario& s, std::span<const Setting> labels_a,
                                    std::span<const Setting> labels_b) {
  const std::size_t d = s.d();
  ChiSquare out;
  bool impossible = false;
  for (std::size_t p = 0; p < st.label_pairs.size(); ++p) {
    const auto [ix, iy] = st.label_pairs[p];
    const JointTable t = outcome_table(s, labels_a[ix], labels_b[iy], Efficiency(1.0));
    double clicked = 0.0;
    std::uint64_t n = 0;
    for (Outcome a = 1; a <= d; ++a) {
      for (Outcome b = 1; b <= d; ++b) {
        clicked += t.at(a, b);
        n += st.histogram[p][(a - 1) * d + (b - 1)];
      }
    }
    std::size_t cells = 0;
    for (Outcome a = 1; a <= d; ++a) {
      for (Outcome b = 1; b <= d; ++b) {
        const double expected = static_cast<double>(n) * t.at(a, b) / clicked;
        const auto observed = static_cast<double>(st.histogram[p][(a - 1) * d + (b - 1)]);
        if (t.at(a, b) / clicked < 1e-14) {
          if (observed > 0) impossible = true;
          continue;
        }
        ++cells;
        out.statistic += (observed - expected) * (observed - expected) / expected;
      }
    }
    if (cells > 0) out.dof += cells - 1;
  }
  if (impossible) {
    out.statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
  } else if (out.dof > 0) {
    out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(out.dof)), out.statistic));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Communication protocols and the guessing-tape construction

using Lambda = std::vector<std::uint32_t>;

/// Deterministic two-party protocol given inputs and shared lambda. The turn
/// order is a function of the transcript so far (common knowledge); `speaker`
/// returns nullopt when the conversation is over.
struct Protocol {
  std::size_t labels_a = 0;
  std::size_t labels_b = 0;
  std::size_t d = 0;
  std::size_t bits_a = 0;  // declared per-side bit counts
  std::size_t bits_b = 0;
  std::function<std::optional<Side>(const Transcript&)> speaker;
  std::function<bool(Side, std::size_t input, const Lambda&, const Transcript&)> bit;
  std::function<Outcome(Side, std::size_t input, const Lambda&, const Transcript&)> output;
  std::function<Lambda(Rng&)> sample_lambda;
  // Weighted lambdas that are sufficient for the given inputs: entries the
  // protocol never reads on these inputs may be fixed arbitrarily.
  std::function<std::vector<std::pair<double, Lambda>>(std::size_t ix, std::size_t iy)> lambda_support;
};

/// Honest run of the protocol.
inline std::pair<Transcript, std::pair<Outcome, Outcome>> run_protocol(const Protocol& p, std::size_t ix, std::size_t iy,
                                                                        const Lambda& lambda) {
  Transcript t;
  const std::size_t limit = p.bits_a + p.bits_b + 1;
  while (auto who = p.speaker(t)) {
    if (t.size() == limit) throw std::invalid_argument("protocol talks longer than its declared length");
    const bool v = p.bit(*who, *who == Side::alice ? ix : iy, lambda, t);
    t.bits.emplace_back(*who, v);
  }
  return {t, {p.output(Side::alice, ix, lambda, t), p.output(Side::bob, iy, lambda, t)}};
}

/// Appends zero bits to the shorter side so both send max(bits_a, bits_b).
inline Protocol equalize_lengths(Protocol p) {
  const std::size_t target = std::max(p.bits_a, p.bits_b);
  const std::size_t base_len = p.bits_a + p.bits_b;
  const std::size_t pad_a = target - p.bits_a;
  const std::size_t pad_b = target - p.bits_b;
  auto inner_speaker = p.speaker;
  auto inner_bit = p.bit;
  p.speaker = [=](const Transcript& t) -> std::optional<Side> {
    if (t.size() < base_len) return inner_speaker(t);
    const std::size_t extra = t.size() - base_len;
    if (extra < pad_a) return Side::alice;
    if (extra < pad_a + pad_b) return Side::bob;
    return std::nullopt;
  };
  p.bit = [=](Side who, std::size_t input, const Lambda& lambda, const Transcript& t) {
    return t.size() < base_len ? inner_bit(who, input, lambda, t) : false;
  };
  p.bits_a = p.bits_b = target;
  return p;
}

/// Alice sends her label index, Bob answers with Alice's outcome. Lambda holds
/// a pre-drawn perfect-detector outcome pair for every label pair, encoded as
/// (a-1)*d + (b-1).
inline Protocol fixture_protocol(const Scenario& s, std::vector<Setting> labels_a, std::vector<Setting> labels_b) {
  if (labels_a.empty() || labels_b.empty()) throw std::invalid_argument("fixture protocol needs labels on both sides");
  const std::size_t d = s.d();
  const std::size_t ma = labels_a.size();
  const std::size_t mb = labels_b.size();
  std::vector<std::vector<double>> cdfs;
  std::vector<std::vector<double>> probs;
  for (std::size_t ix = 0; ix < ma; ++ix) {
    for (std::size_t iy = 0; iy < mb; ++iy) {
      const JointTable t = outcome_table(s, labels_a[ix], labels_b[iy], Efficiency(1.0));
      std::vector<double> p(d * d), c(d * d);
      double acc = 0.0;
      for (Outcome a = 1; a <= d; ++a) {
        for (Outcome b = 1; b <= d; ++b) {
          p[(a - 1) * d + (b - 1)] = t.at(a, b);
          acc += t.at(a, b);
          c[(a - 1) * d + (b - 1)] = acc;
        }
      }
      for (auto& v : c) v /= acc;
      c.back() = 1.0;
      probs.push_back(std::move(p));
      cdfs.push_back(std::move(c));
    }
  }

  Protocol p;
  p.labels_a = ma;
  p.labels_b = mb;
  p.d = d;
  p.bits_a = static_cast<std::size_t>(std::bit_width(ma - 1));
  p.bits_b = static_cast<std::size_t>(std::bit_width(d - 1));
  const std::size_t ca = p.bits_a, cb = p.bits_b;
  auto read = [](const Transcript& t, std::size_t from, std::size_t count) {
    std::size_t v = 0;
    for (std::size_t i = 0; i < count; ++i) v = (v << 1) | (t.bits[from + i].second ? 1U : 0U);
    return v;
  };
  p.speaker = [=](const Transcript& t) -> std::optional<Side> {
    if (t.size() < ca) return Side::alice;
    if (t.size() < ca + cb) return Side::bob;
    return std::nullopt;
  };
  p.bit = [=](Side who, std::size_t input, const Lambda& lambda, const Transcript& t) {
    if (who == Side::alice) return ((input >> (ca - 1 - t.size())) & 1U) != 0;
    // A guessed index can point past the label list; Bob then answers zeros.
    const std::size_t ix = read(t, 0, ca);
    if (ix >= ma) return false;
    const std::size_t a_index = lambda[ix * mb + input] / d;
    const std::size_t pos = t.size() - ca;
    return ((a_index >> (cb - 1 - pos)) & 1U) != 0;
  };
  p.output = [=](Side who, std::size_t input, const Lambda& lambda, const Transcript& t) -> Outcome {
    if (who == Side::bob) {
      const std::size_t ix = std::min(read(t, 0, ca), ma - 1);
      return static_cast<Outcome>(lambda[ix * mb + input] % d + 1);
    }
    return static_cast<Outcome>(read(t, ca, cb) % d + 1);
  };
  p.sample_lambda = [=](Rng& rng) {
    Lambda l(ma * mb);
    for (std::size_t k = 0; k < l.size(); ++k) {
      const double u = uniform01(rng);
      l[k] = static_cast<std::uint32_t>(std::upper_bound(cdfs[k].begin(), cdfs[k].end(), u) - cdfs[k].begin());
      l[k] = std::min<std::uint32_t>(l[k], static_cast<std::uint32_t>(d * d - 1));
    }
    return l;
  };
  p.lambda_support = [=](std::size_t ix, std::size_t iy) {
    std::vector<std::pair<double, Lambda>> out;
    const auto& pr = probs[ix * mb + iy];
    for (std::size_t c = 0; c < pr.size(); ++c) {
      if (pr[c] <= 0.0) continue;
      Lambda l(ma * mb, 0);
      l[ix * mb + iy] = static_cast<std::uint32_t>(c);
      out.emplace_back(pr[c], std::move(l));
    }
    return out;
  };
  return p;
}

struct GuessOutcome {
  bool alice_click = false;
  bool bob_click = false;
  Outcome a = 0;
  Outcome b = 0;
};

/// Local model built from a fixed-length protocol: the hidden variable is
/// (lambda, mu) with mu a string of C = bits_a + bits_b uniform bits. Each
/// side plays the conversation reading the other side's bits from mu and
/// clicks only if its own bits agree with mu.
class GuessingModel {
 public:
  explicit GuessingModel(Protocol p) : p_(std::move(p)) {
    // Every honest run on the support must use exactly the declared bits.
    for (std::size_t ix = 0; ix < p_.labels_a; ++ix) {
      for (std::size_t iy = 0; iy < p_.labels_b; ++iy) {
        for (const auto& [w, lambda] : p_.lambda_support(ix, iy)) {
          const auto [t, outs] = run_protocol(p_, ix, iy, lambda);
          if (t.count(Side::alice) != p_.bits_a || t.count(Side::bob) != p_.bits_b) {
            throw std::invalid_argument("protocol is not fixed-length; pad it first");
          }
        }
      }
    }
  }

  const Protocol& protocol() const noexcept { return p_; }
  std::size_t length() const noexcept { return p_.bits_a + p_.bits_b; }
  double eta_alice() const { return std::exp2(-static_cast<double>(p_.bits_a)); }
  double eta_bob() const { return std::exp2(-static_cast<double>(p_.bits_b)); }

  /// Outcome of one side given lambda and the tape prefix mu (bit i = bit i of
  /// the conversation).
  std::pair<bool, Outcome> play(Side side, std::size_t input, const Lambda& lambda, std::uint64_t mu) const {
    Transcript t;
    const std::size_t c = length();
    while (auto who = p_.speaker(t)) {
      if (t.size() == c) throw std::invalid_argument("protocol is not fixed-length; pad it first");
      const bool guess = ((mu >> t.size()) & 1U) != 0;
      if (*who == side && p_.bit(side, input, lambda, t) != guess) return {false, 0};
      t.bits.emplace_back(*who, guess);
    }
    if (t.size() != c) throw std::invalid_argument("protocol is not fixed-length; pad it first");
    return {true, p_.output(side, input, lambda, t)};
  }

  GuessOutcome sample(std::size_t ix, std::size_t iy, Rng& rng) const {
    const Lambda lambda = p_.sample_lambda(rng);
    const std::uint64_t mu = length() == 0 ? 0 : rng() & (~std::uint64_t{0} >> (64 - length()));
    GuessOutcome g;
    std::tie(g.alice_click, g.a) = play(Side::alice, ix, lambda, mu);
    std::tie(g.bob_click, g.b) = play(Side::bob, iy, lambda, mu);
    return g;
  }

  /// Exact outcome table for inputs (ix, iy) by enumerating the lambda
  /// support and every mu prefix.
  JointTable exact_table(std::size_t ix, std::size_t iy) const {
    if (length() > 20) throw CapExceeded("tape enumeration is limited to 20 bits");
    JointTable t(p_.d);
    const double tape_weight = std::exp2(-static_cast<double>(length()));
    for (const auto& [w, lambda] : p_.lambda_support(ix, iy)) {
      for (std::uint64_t mu = 0; mu < (std::uint64_t{1} << length()); ++mu) {
        const auto [ca, a] = play(Side::alice, ix, lambda, mu);
        const auto [cb, b] = play(Side::bob, iy, lambda, mu);
        t.at(ca ? a : 0, cb ? b : 0) += w * tape_weight;
      }
    }
    return t;
  }

  /// Honest protocol output distribution for inputs (ix, iy).
  JointTable protocol_table(std::size_t ix, std::size_t iy) const {
    JointTable t(p_.d);
    for (const auto& [w, lambda] : p_.lambda_support(ix, iy)) {
      const auto [tr, outs] = run_protocol(p_, ix, iy, lambda);
      t.at(outs.first, outs.second) += w;
    }
    return t;
  }

 private:
  Protocol p_;
};

inline GuessingModel lv_from_fixed_length_protocol(Protocol p) { return GuessingModel(std::move(p)); }

struct GuessReport {
  std::string label = kHeuristicBridgeLabel;
  std::size_t bits_a = 0;
  std::size_t bits_b = 0;
  double eta_alice = 1.0;
  double eta_bob = 1.0;
  double joint_click_expected = 1.0;       // 2^-C
  double joint_click_max_deviation = 0.0;  // over inputs, exact
  double conditional_deviation = 0.0;      // exact, vs the honest protocol
  std::optional<double> marginal_deviation;  // vs the efficiency-eta table; only when eta_alice = eta_bob
  std::uint64_t trials = 0;
  double click_correlation = 0.0;  // sampled
  double click_correlation_sigma = 0.0;
};

/// Exact checks by enumeration plus a sampled check of click independence.
/// `target` supplies the label settings used for the marginal comparison.
inline GuessReport guess_report(const GuessingModel& gm, const Scenario& target, std::span<const Setting> labels_a,
                                std::span<const Setting> labels_b, std::uint64_t trials, std::uint64_t seed,
                                std::size_t workers = 1) {
  const Protocol& p = gm.protocol();
  GuessReport r;
  r.bits_a = p.bits_a;
  r.bits_b = p.bits_b;
  r.eta_alice = gm.eta_alice();
  r.eta_bob = gm.eta_bob();
  r.joint_click_expected = std::exp2(-static_cast<double>(gm.length()));
  const bool symmetric = p.bits_a == p.bits_b;
  double marginal = 0.0;
  for (std::size_t ix = 0; ix < p.labels_a; ++ix) {
    for (std::size_t iy = 0; iy < p.labels_b; ++iy) {
      const JointTable got = gm.exact_table(ix, iy);
      const JointTable honest = gm.protocol_table(ix, iy);
      double joint = 0.0;
      for (Outcome a = 1; a <= p.d; ++a) {
        for (Outcome b = 1; b <= p.d; ++b) joint += got.at(a, b);
      }
      r.joint_click_max_deviation = std::max(r.joint_click_max_deviation, std::abs(joint - r.joint_click_expected));
      for (Outcome a = 1; a <= p.d; ++a) {
        for (Outcome b = 1; b <= p.d; ++b) {
          r.conditional_deviation = std::max(r.conditional_deviation, std::abs(got.at(a, b) / joint - honest.at(a, b)));
        }
      }
      if (symmetric) {
        const JointTable eq = outcome_table(target, labels_a[ix], labels_b[iy], Efficiency(r.eta_alice));
        for (Outcome a = 0; a <= p.d; ++a) {
          for (Outcome b = 0; b <= p.d; ++b) marginal = std::max(marginal, std::abs(got.at(a, b) - eq.at(a, b)));
        }
      }
    }
  }
  if (symmetric) r.marginal_deviation = marginal;

  if (trials > 0) {
    const std::uint64_t shards = (trials + kTrialsPerShard - 1) / kTrialsPerShard;
    struct Tally {
      std::uint64_t a = 0, b = 0, ab = 0;
    };
    std::vector<Tally> tallies(shards);
    run_shards(shards, workers, [&](std::size_t shard) {
      Rng rng(derive_seed(seed, shard));
      Tally t;
      const std::uint64_t begin = shard * kTrialsPerShard;
      const std::uint64_t end = std::min(trials, begin + kTrialsPerShard);
      const std::size_t pairs = p.labels_a * p.labels_b;
      for (std::uint64_t i = begin; i < end; ++i) {
        const std::size_t k = i % pairs;
        const auto g = gm.sample(k / p.labels_b, k % p.labels_b, rng);
        t.a += g.alice_click ? 1 : 0;
        t.b += g.bob_click ? 1 : 0;
        t.ab += (g.alice_click && g.bob_click) ? 1 : 0;
      }
      tallies[shard] = t;
    });
    Tally total;
    for (const auto& t : tallies) {
      total.a += t.a;
      total.b += t.b;
      total.ab += t.ab;
    }
    const double n = static_cast<double>(trials);
    const double pa = static_cast<double>(total.a) / n;
    const double pb = static_cast<double>(total.b) / n;
    const double pab = static_cast<double>(total.ab) / n;
    const double denom = std::sqrt(pa * (1 - pa) * pb * (1 - pb));
    r.trials = trials;
    r.click_correlation = denom > 0.0 ? (pab - pa * pb) / denom : 0.0;
    r.click_correlation_sigma = 1.0 / std::sqrt(n);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form bounds

/// Average bits of the rejection protocol at efficiency eta.
inline double c_from_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  return 2.0 / (eta * eta);
}

/// Efficiency reachable from a protocol using C bits on average.
inline double eta_from_c(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("communication must be positive");
  return std::sqrt(2.0 / c);
}

/// (6 + 3 log2 d) d + 2 bits.
inline double mbcc_bits(std::size_t d) {
  if (d == 0) throw std::invalid_argument("d must be positive");
  const double dd = static_cast<double>(d);
  return (6.0 + 3.0 * std::log2(dd)) * dd + 2.0;
}

/// Sending the label outright.
inline double trivial_bits(std::size_t m) {
  if (m == 0) throw std::invalid_argument("label count must be positive");
  return std::log2(static_cast<double>(m));
}

/// log2 of the efficiency suggested by guessing an mbcc_bits conversation.
inline double mu_eta_log2(std::size_t d) { return -mbcc_bits(d); }

}  // namespace bellsim
