#include <gtest/gtest.h>

#include <cmath>

#include "bellsim/lhv.hpp"
#include "oracles.hpp"

using namespace bellsim;

namespace {

std::vector<BitString> full_domain(std::size_t d) { return all_bitstrings(d); }

std::vector<Setting> bct_labels(std::size_t d, std::initializer_list<std::uint64_t> values) {
  std::vector<Setting> out;
  for (auto v : values) out.emplace_back(BitString::from_uint(d, v));
  return out;
}

std::vector<Setting> index_labels(std::size_t m) {
  std::vector<Setting> out;
  for (std::size_t i = 0; i < m; ++i) out.emplace_back(i);
  return out;
}

// Plain double loop over both label lists.
long long brute_lv_value(const DeterministicStrategyPair& p, const std::vector<BitString>& labels) {
  long long total = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (p.f[i] != 0 && p.f[i] == p.g[j]) {
        const auto dist = hamming(labels[i], labels[j]);
        total += dist == 0 ? 1 : (2 * dist == labels[i].size() ? -1 : 0);
      }
    }
  }
  return total;
}

// CHSH combination with outcomes 1 -> +1, 2 -> -1, conditioned on nothing.
double chsh_value(const Scenario& s, double eta) {
  double total = 0.0;
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      const auto t = outcome_table(s, x, y, Efficiency(eta));
      const double corr = t.at(1, 1) + t.at(2, 2) - t.at(1, 2) - t.at(2, 1);
      total += (x == 1 && y == 1) ? -corr : corr;
    }
  }
  return total;
}

Scenario four_basis_qubit_scenario() {
  const double pi = std::numbers::pi;
  return make_explicit_scenario(
      2, {rotated_qubit_basis(0.0), rotated_qubit_basis(pi / 8), rotated_qubit_basis(pi / 4), rotated_qubit_basis(3 * pi / 8)},
      {rotated_qubit_basis(pi / 16), rotated_qubit_basis(3 * pi / 16), rotated_qubit_basis(5 * pi / 16),
       rotated_qubit_basis(7 * pi / 16)});
}

}  // namespace

TEST(LvBellValue, ConstantStrategies) {
  const auto labels = full_domain(4);
  DeterministicStrategyPair silent{std::vector<Outcome>(16, 0), std::vector<Outcome>(16, 0)};
  EXPECT_EQ(lv_bell_value(silent, labels), 0);
  DeterministicStrategyPair ones{std::vector<Outcome>(16, 1), std::vector<Outcome>(16, 1)};
  EXPECT_EQ(lv_bell_value(ones, labels), -80);
  EXPECT_EQ(brute_lv_value(ones, labels), -80);
}

TEST(LvBellValue, AvoidanceSetStrategyScoresItsSize) {
  const auto labels = full_domain(4);
  const auto z = max_z_exact(4);
  DeterministicStrategyPair p{std::vector<Outcome>(16, 0), std::vector<Outcome>(16, 0)};
  for (const auto& m : z.members) {
    p.f[m.to_uint()] = 1;
    p.g[m.to_uint()] = 1;
  }
  EXPECT_EQ(lv_bell_value(p, labels), static_cast<long long>(z.size()));
}

TEST(LvBellValue, AgreesWithBruteForceAndMixtures) {
  const auto labels = full_domain(4);
  const AlphaMatrix am(labels, labels);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    LhvModel model;
    double expected = 0.0;
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
      auto p = random_strategy_pair(16, 16, 4, rng);
      ASSERT_EQ(lv_bell_value(p, am), brute_lv_value(p, labels));
      const double w = uniform01(rng) + 0.1;
      total += w;
      model.strategies.push_back({w, p});
    }
    for (auto& s : model.strategies) {
      s.weight /= total;
      expected += s.weight * static_cast<double>(brute_lv_value(s.pair, labels));
    }
    EXPECT_NEAR(lv_bell_value(model, am), expected, 1e-10);
  }
}

TEST(LvBellValue, RandomAndOptimizedPairsRespectTheAvoidanceBound) {
  const auto labels = full_domain(4);
  const AlphaMatrix am(labels, labels);
  const long long bound = 4 * static_cast<long long>(max_z_exact(4).size());
  Rng rng(2024);
  for (int trial = 0; trial < 100000; ++trial) {
    ASSERT_LE(lv_bell_value(random_strategy_pair(16, 16, 4, rng), am), bound);
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = best_response_maximize(labels, 4, seed, 50);
    ASSERT_LE(r.value, bound);
    for (std::size_t i = 1; i < r.history.size(); ++i) ASSERT_GE(r.history[i], r.history[i - 1]);
  }
}

TEST(BestResponse, StartsFromGivenPair) {
  const auto labels = full_domain(4);
  DeterministicStrategyPair ones{std::vector<Outcome>(16, 1), std::vector<Outcome>(16, 1)};
  const auto r = best_response_maximize(labels, 4, 0, 10, ones);
  EXPECT_EQ(r.history.front(), -80);
  EXPECT_GE(r.history[1], -80);
  EXPECT_EQ(best_response_maximize(labels, 4, 5, 10).pair.f, best_response_maximize(labels, 4, 5, 10).pair.f);
}

TEST(BetaLemma, Examples) {
  const auto x = BitString::from_string("0110");
  EXPECT_EQ(beta_lemma_check(x, {x}).beta, 1);
  EXPECT_TRUE(beta_lemma_check(x, {x}).lemma_holds);
  std::vector<BitString> partners;
  for (const auto& y : full_domain(4)) {
    if (hamming(x, y) == 2) partners.push_back(y);
  }
  const auto r = beta_lemma_check(x, partners);
  EXPECT_EQ(r.beta, -6);
  EXPECT_TRUE(r.lemma_holds);
  EXPECT_THROW(beta_lemma_check(BitString(3), {}), std::invalid_argument);
}

TEST(BetaLemma, RandomInstances) {
  const auto domain = full_domain(4);
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = domain[uniform_below(rng, 16)];
    std::vector<BitString> ys;
    for (const auto& y : domain) {
      if (bernoulli(rng, 0.4)) ys.push_back(y);
    }
    const auto r = beta_lemma_check(x, ys);
    ASSERT_TRUE(r.lemma_holds) << trial;
    ASSERT_LE(r.beta, 1);
  }
}

TEST(BetaLemma, ExhaustiveSmallY) {
  // Every subset of a 12-string pool: x, its six half-distance partners and
  // five other strings.
  const auto x = BitString::from_string("0000");
  std::vector<BitString> pool = {x};
  for (const auto& y : full_domain(4)) {
    if (hamming(x, y) == 2) pool.push_back(y);
  }
  for (const char* w : {"1000", "0100", "1110", "1111", "1101"}) pool.push_back(BitString::from_string(w));
  ASSERT_EQ(pool.size(), 12u);
  for (std::uint32_t mask = 0; mask < (1U << 12); ++mask) {
    std::vector<BitString> ys;
    for (std::size_t i = 0; i < 12; ++i) {
      if ((mask >> i) & 1U) ys.push_back(pool[i]);
    }
    ASSERT_TRUE(beta_lemma_check(x, ys).lemma_holds) << mask;
  }
}

TEST(Popescu, ReproducesEfficiencyOneOverM) {
  const auto s = build_bct_scenario(2);
  const auto labels = bct_labels(4, {0, 3, 5, 14});
  const auto p = popescu_model(labels, labels, s);
  EXPECT_DOUBLE_EQ(p.eta, 0.25);
  EXPECT_NO_THROW(p.model.validate(4));
  EXPECT_LE(verify_model_reproduces(p.model, s, Efficiency(0.25), labels, labels), 1e-12);
  for (std::size_t ix = 0; ix < 4; ++ix) {
    for (std::size_t iy = 0; iy < 4; ++iy) EXPECT_NEAR(model_table(p.model, ix, iy, 4).at(0, 0), 0.5625, 1e-15);
  }
  EXPECT_GE(verify_model_reproduces(p.model, s, Efficiency(1.0), labels, labels), 0.5625 - 1e-12);
}

TEST(Popescu, SingleLabelAndErrors) {
  const auto s = build_bct_scenario(2);
  const auto one = bct_labels(4, {6});
  const auto p = popescu_model(one, one, s);
  EXPECT_DOUBLE_EQ(p.eta, 1.0);
  EXPECT_LE(verify_model_reproduces(p.model, s, Efficiency(1.0), one, one), 1e-12);
  EXPECT_THROW(popescu_model({}, {}, s), std::invalid_argument);
  EXPECT_THROW(popescu_model(one, bct_labels(4, {1, 2}), s), std::invalid_argument);
  const auto chsh = make_chsh_scenario();
  const auto idx = index_labels(2);
  EXPECT_LE(verify_model_reproduces(popescu_model(idx, idx, chsh).model, chsh, Efficiency(0.5), idx, idx), 1e-12);
}

TEST(VerifyModel, SilentModelMatchesZeroEfficiency) {
  const auto s = build_bct_scenario(2);
  const auto labels = bct_labels(4, {1, 2});
  LhvModel silent{{{1.0, {std::vector<Outcome>(2, 0), std::vector<Outcome>(2, 0)}}}};
  EXPECT_EQ(verify_model_reproduces(silent, s, Efficiency(0.0), labels, labels), 0.0);
}

TEST(BlurModel, ScalesEfficiency) {
  const auto s = make_chsh_scenario();
  const auto idx = index_labels(2);
  const auto p = popescu_model(idx, idx, s);
  const auto blurred = blur_model(p.model, 0.6);
  EXPECT_NO_THROW(blurred.validate(2));
  EXPECT_LE(verify_model_reproduces(blurred, s, Efficiency(0.3), idx, idx), 1e-12);
}

TEST(ChshScenario, ViolatesTheLocalBound) {
  const auto s = make_chsh_scenario();
  EXPECT_NEAR(chsh_value(s, 1.0), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(FeasibilityLp, SingleLabelIsAlwaysLocal) {
  const auto s = build_bct_scenario(2);
  const auto one = bct_labels(4, {9});
  const auto r = local_feasibility_lp(s, one, one, Efficiency(1.0));
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.strategy_count, 25u);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_LE(r.residual, 1e-9);
  EXPECT_NO_THROW(r.certificate->validate(4, 1e-9));
}

TEST(FeasibilityLp, FeasibleAtOneOverM) {
  const auto chsh = make_chsh_scenario();
  const auto two = index_labels(2);
  EXPECT_TRUE(local_feasibility_lp(chsh, two, two, Efficiency(0.5)).feasible);
  const auto bct = build_bct_scenario(2);
  const auto pair = bct_labels(4, {0, 3});
  EXPECT_TRUE(local_feasibility_lp(bct, pair, pair, Efficiency(0.5)).feasible);
  const auto four = index_labels(4);
  const auto r = local_feasibility_lp(four_basis_qubit_scenario(), four, four, Efficiency(0.25));
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.strategy_count, 6561u);
  EXPECT_LE(r.residual, 1e-9);
}

TEST(FeasibilityLp, ChshAtPerfectEfficiencyIsInfeasible) {
  const auto s = make_chsh_scenario();
  ASSERT_GT(chsh_value(s, 1.0), 2.0);
  const auto two = index_labels(2);
  const auto r = local_feasibility_lp(s, two, two, Efficiency(1.0));
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.certificate.has_value());
  EXPECT_GT(r.phase1_objective, 1e-6);
}

TEST(FeasibilityLp, CapExceeded) {
  const auto s = build_bct_scenario(2);
  const auto labels = bct_labels(4, {0, 1, 2, 3, 4});
  EXPECT_THROW(local_feasibility_lp(s, labels, labels, Efficiency(0.2)), CapExceeded);
  FeasibilityOptions small;
  small.strategy_cap = 10;
  const auto one = bct_labels(4, {9});
  EXPECT_THROW(local_feasibility_lp(s, one, one, Efficiency(1.0), small), CapExceeded);
}

TEST(FeasibilityLp, DownwardClosedOnAGrid) {
  const auto chsh = make_chsh_scenario();
  const auto two = index_labels(2);
  const auto bct = build_bct_scenario(2);
  const auto pair = bct_labels(4, {0, 3});
  for (int which = 0; which < 2; ++which) {
    bool seen_infeasible = false;
    for (int i = 1; i <= 10; ++i) {
      const double eta = i / 10.0;
      const bool feasible = which == 0 ? local_feasibility_lp(chsh, two, two, Efficiency(eta)).feasible
                                       : local_feasibility_lp(bct, pair, pair, Efficiency(eta)).feasible;
      if (!feasible) seen_infeasible = true;
      ASSERT_FALSE(seen_infeasible && feasible) << which << " " << eta;
    }
  }
}

TEST(EtaStar, ChshBracket) {
  const auto s = make_chsh_scenario();
  const auto two = index_labels(2);
  const auto r = eta_star_bisection(s, two, two, 1e-3);
  EXPECT_FALSE(r.no_violation);
  EXPECT_LT(r.eta_star, 1.0);
  EXPECT_GE(r.eta_star, 0.5);
  EXPECT_LE(r.upper - r.lower, 1e-3);
  // Regression baseline for these settings (bracket width 1e-3).
  EXPECT_NEAR(r.eta_star, 0.8284, 2e-3);
}

TEST(EtaStar, NoViolationFlag) {
  const auto s = build_bct_scenario(2);
  const auto one = bct_labels(4, {9});
  const auto r = eta_star_bisection(s, one, one, 1e-3);
  EXPECT_TRUE(r.no_violation);
  EXPECT_EQ(r.eta_star, 1.0);
  EXPECT_THROW(eta_star_bisection(s, one, one, 0.0), std::invalid_argument);
}
