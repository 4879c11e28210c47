#include <gtest/gtest.h>

#include <cmath>

#include "bellsim/bell.hpp"
#include "oracles.hpp"

using namespace bellsim;

namespace {

BitString bits(std::size_t d, std::uint64_t v) { return BitString::from_uint(d, v); }

TableProvider quantum_provider(const Scenario& s, double eta) {
  return [s, eta](const BitString& x, const BitString& y) { return outcome_table(s, x, y, Efficiency(eta)); };
}

// Full double sum over all (x, y) at d = 4, every probability taken from a
// dense density matrix of (1-w)|psi><psi| + w 1/16.
double brute_force_noisy_value(double eta, double w) {
  const std::size_t d = 4;
  const auto rho = oracle::noisy_state(d, w);
  double total = 0.0;
  for (std::size_t x = 0; x < 16; ++x) {
    for (std::size_t y = 0; y < 16; ++y) {
      const auto dist = oracle::popcount(x ^ y);
      const int a = dist == 0 ? 1 : (dist == 2 ? -1 : 0);
      if (a == 0) continue;
      double same = 0.0;
      for (std::size_t k = 1; k <= d; ++k) {
        same += eta * eta * oracle::expectation(rho, oracle::kron(oracle::bct_vector(d, x, k), oracle::bct_vector(d, y, k)));
      }
      total += a * same;
    }
  }
  return total;
}

}  // namespace

TEST(Alpha, ExamplesAndSymmetry) {
  const auto x = BitString::from_string("0110");
  EXPECT_EQ(alpha(x, x), 1);
  EXPECT_EQ(alpha(x, BitString::from_string("1010")), -1);
  EXPECT_EQ(alpha(x, BitString::from_string("0111")), 0);
  EXPECT_THROW(alpha(x, BitString(5)), std::invalid_argument);
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) ASSERT_EQ(alpha(bits(4, a), bits(4, b)), alpha(bits(4, b), bits(4, a)));
  }
}

TEST(CentralBinomial, ExactAndLogDomain) {
  EXPECT_EQ(central_binomial(4), 6.0);
  EXPECT_EQ(central_binomial(16), 12870.0);
  EXPECT_EQ(central_binomial(60), 118264581564861424.0);
  EXPECT_NEAR(central_binomial(62) / 465428353255261088.0, 1.0, 1e-12);
}

TEST(BellQuantum, ClosedFormValues) {
  auto v = bell_value_quantum(4, Efficiency(1.0));
  EXPECT_DOUBLE_EQ(v.normalized, 1.0);
  EXPECT_DOUBLE_EQ(*v.raw, 16.0);
  v = bell_value_quantum(4, Efficiency(0.5));
  EXPECT_DOUBLE_EQ(*v.raw, 4.0);
  v = bell_value_quantum(4096, Efficiency(0.0));
  EXPECT_EQ(v.normalized, 0.0);
  EXPECT_FALSE(v.raw.has_value());
  EXPECT_THROW(bell_value_quantum(6, Efficiency(1.0)), std::invalid_argument);
  EXPECT_THROW(bell_value_quantum(2, Efficiency(1.0)), std::invalid_argument);
}

TEST(BellFromTable, QuantumProviderMatchesClosedForm) {
  const auto s = build_bct_scenario(2);
  for (double eta : {0.0, 0.25, 0.5, 1.0}) {
    const auto v = bell_value_from_table(quantum_provider(s, eta), 4);
    EXPECT_NEAR(*v.raw, eta * eta * 16.0, 1e-10);
  }
  for (int n : {3, 4, 5}) {
    const auto sn = build_bct_scenario(n);
    const auto v = bell_value_from_table(quantum_provider(sn, 0.7), sn.d(), SumMode::reduced);
    EXPECT_NEAR(v.normalized, 0.49, 1e-12);
  }
}

TEST(BellFromTable, NoClickAndUniformNoiseProviders) {
  const std::size_t d = 4;
  TableProvider silent = [](const BitString&, const BitString&) {
    JointTable t(4);
    t.at(0, 0) = 1.0;
    return t;
  };
  EXPECT_EQ(*bell_value_from_table(silent, d).raw, 0.0);
  TableProvider uniform = [](const BitString&, const BitString&) {
    JointTable t(4);
    for (Outcome a = 1; a <= 4; ++a) {
      for (Outcome b = 1; b <= 4; ++b) t.at(a, b) = 1.0 / 16.0;
    }
    return t;
  };
  EXPECT_NEAR(*bell_value_from_table(uniform, d).raw, -20.0, 1e-12);
}

TEST(BellFromTable, LinearInTheProvider) {
  const auto s = build_bct_scenario(2);
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const double eta1 = uniform01(rng), eta2 = uniform01(rng), w = uniform01(rng), lam = uniform01(rng);
    TableProvider p1 = quantum_provider(s, eta1);
    TableProvider p2 = [&](const BitString& x, const BitString& y) {
      return noisy_outcome_table(s, x, y, Efficiency(eta2), w);
    };
    TableProvider mix = [&](const BitString& x, const BitString& y) {
      const auto t1 = p1(x, y);
      const auto t2 = p2(x, y);
      JointTable t(4);
      for (Outcome a = 0; a <= 4; ++a) {
        for (Outcome b = 0; b <= 4; ++b) t.at(a, b) = lam * t1.at(a, b) + (1 - lam) * t2.at(a, b);
      }
      return t;
    };
    const double expected = lam * *bell_value_from_table(p1, 4).raw + (1 - lam) * *bell_value_from_table(p2, 4).raw;
    EXPECT_NEAR(*bell_value_from_table(mix, 4).raw, expected, 1e-10);
  }
}

TEST(BellFromTable, RejectsBadProviders) {
  TableProvider broken = [](const BitString&, const BitString&) {
    JointTable t(4);
    t.at(0, 0) = 0.9;
    return t;
  };
  EXPECT_THROW(bell_value_from_table(broken, 4), ValidationError);
  // Depends on x itself, so the reduced sum must refuse it.
  TableProvider asymmetric = [](const BitString& x, const BitString&) {
    JointTable t(8);
    if (x.get(0)) {
      t.at(1, 1) = 1.0;
    } else {
      t.at(0, 0) = 1.0;
    }
    return t;
  };
  EXPECT_THROW(bell_value_from_table(asymmetric, 8, SumMode::reduced), ValidationError);
  EXPECT_THROW(bell_value_from_table(broken, 8, SumMode::full), std::invalid_argument);
}

TEST(BellNoisy, MatchesDenseMixedStateOracle) {
  for (double w : {0.0, 0.25, 0.5, 1.0}) {
    for (double eta : {1.0, 0.6}) {
      const double oracle_value = brute_force_noisy_value(eta, w);
      EXPECT_NEAR(*bell_value_noisy(4, Efficiency(eta), w).raw, oracle_value, 1e-10) << w << " " << eta;
    }
  }
  EXPECT_NEAR(*bell_value_noisy(4, Efficiency(1.0), 0.0).raw, 16.0, 1e-12);
  EXPECT_NEAR(*bell_value_noisy(4, Efficiency(1.0), 1.0).raw, -20.0, 1e-12);
  EXPECT_NEAR(*bell_value_noisy(4, Efficiency(1.0), 0.5).raw, -2.0, 1e-12);
  EXPECT_THROW(bell_value_noisy(4, Efficiency(1.0), 1.2), std::invalid_argument);
}

TEST(BellNoisy, TableProviderAgreesAtLargerD) {
  const auto s = build_bct_scenario(3);
  const double eta = 0.9, w = 0.05;
  TableProvider p = [&](const BitString& x, const BitString& y) { return noisy_outcome_table(s, x, y, Efficiency(eta), w); };
  EXPECT_NEAR(bell_value_from_table(p, 8).normalized, bell_value_noisy(8, Efficiency(eta), w).normalized, 1e-12);
}

TEST(BellNoisy, StrictlyDecreasingInW) {
  for (std::size_t d : {4u, 8u, 64u, 256u}) {
    double previous = bell_value_noisy(d, Efficiency(0.8), 0.0).normalized;
    for (int i = 1; i <= 20; ++i) {
      const double current = bell_value_noisy(d, Efficiency(0.8), i / 20.0).normalized;
      ASSERT_LT(current, previous) << d << " " << i;
      previous = current;
    }
  }
}

TEST(BellSampled, ReproducesClosedForm) {
  const auto s = build_bct_scenario(4);
  const auto est = estimate_bell_sampled(s, Efficiency(1.0), 100000, 42);
  EXPECT_LE(std::abs(est.mean - 1.0), 3 * est.std_error + 1e-15);
  const auto est2 = estimate_bell_sampled(s, Efficiency(0.7), 100000, 42);
  EXPECT_GT(est2.std_error, 0.0);
  EXPECT_LE(std::abs(est2.mean - 0.49), 3 * est2.std_error);
}

TEST(BellSampled, ZeroEfficiencyIsExactlyZero) {
  const auto est = estimate_bell_sampled(build_bct_scenario(3), Efficiency(0.0), 5000, 1);
  EXPECT_EQ(est.mean, 0.0);
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(BellSampled, ErrorsAndDeterminism) {
  const auto s = build_bct_scenario(3);
  EXPECT_THROW(estimate_bell_sampled(s, Efficiency(1.0), 0, 1), std::invalid_argument);
  EXPECT_THROW(estimate_bell_sampled(make_explicit_scenario(1, {{{Complex(1.0)}}}, {{{Complex(1.0)}}}), Efficiency(1.0), 10, 1),
               std::invalid_argument);
  const auto a = estimate_bell_sampled(s, Efficiency(0.6), 200000, 9, 1);
  const auto b = estimate_bell_sampled(s, Efficiency(0.6), 200000, 9, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto c = estimate_bell_sampled(s, Efficiency(0.6), 200000, 10, 1);
  EXPECT_NE(a.mean, c.mean);
}

TEST(BellSampled, StandardErrorShrinksLikeInverseSqrt) {
  const auto s = build_bct_scenario(3);
  const auto small = estimate_bell_sampled(s, Efficiency(0.6), 100000, 5);
  const auto large = estimate_bell_sampled(s, Efficiency(0.6), 200000, 6);
  EXPECT_NEAR(large.std_error / small.std_error, 1.0 / std::sqrt(2.0), 0.03);
}

TEST(BellSampled, HalfDistanceStratumCarriesTheBinomialWeight) {
  // Noise-free implicit family never agrees on the d/2 stratum, so the estimate
  // is the same-label mean alone; the reported stderr uses that stratum only.
  const auto s = build_bct_scenario(2);
  const auto est = estimate_bell_sampled(s, Efficiency(0.5), 40000, 3);
  EXPECT_LE(std::abs(est.mean - 0.25), 3 * est.std_error);
  EXPECT_NEAR(est.std_error, std::sqrt(0.25 * 0.75 / 20000.0), 2e-4);
}
