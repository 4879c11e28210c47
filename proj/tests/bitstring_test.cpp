#include <gtest/gtest.h>

#include "bellsim/bitstring.hpp"
#include "bellsim/random.hpp"
#include "bellsim/walsh_hadamard.hpp"

using bellsim::BitString;

TEST(BitString, TextRoundTripAndBitOrder) {
  const auto s = BitString::from_string("0011");
  EXPECT_EQ(s.size(), 4u);
  EXPECT_FALSE(s.get(0));
  EXPECT_TRUE(s.get(2));
  EXPECT_EQ(s.to_uint(), 0b1100u);
  EXPECT_EQ(s.to_string(), "0011");
  EXPECT_THROW(BitString::from_string("01x1"), std::invalid_argument);
  EXPECT_THROW(BitString(0), std::invalid_argument);
}

TEST(BitString, HammingExamples) {
  EXPECT_EQ(bellsim::hamming(BitString::from_string("0000"), BitString::from_string("0000")), 0u);
  EXPECT_EQ(bellsim::hamming(BitString::from_string("0011"), BitString::from_string("0101")), 2u);
  const auto x = BitString::from_string("01101001");
  EXPECT_EQ(bellsim::hamming(x, x.complement()), 8u);
  EXPECT_THROW(bellsim::hamming(BitString(4), BitString(8)), std::invalid_argument);
}

TEST(BitString, XorAndHammingPropertiesOnLongStrings) {
  bellsim::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + bellsim::uniform_below(rng, 300);
    BitString x(d), y(d);
    for (std::size_t k = 0; k < d; ++k) {
      x.set(k, rng() & 1U);
      y.set(k, rng() & 1U);
    }
    const BitString z = x ^ y;
    EXPECT_EQ(z.size(), d);
    EXPECT_EQ(bellsim::hamming(x, y), z.popcount());
    EXPECT_EQ(bellsim::hamming(x, y), bellsim::hamming(y, x));
    EXPECT_EQ(bellsim::hamming(x, x), 0u);
    EXPECT_EQ(x.complement().complement(), x);
    EXPECT_EQ(x.complement().popcount(), d - x.popcount());
  }
}

TEST(WalshHadamard, MatchesDirectSum) {
  std::vector<double> v{1, -2, 3, 0.5, -1, 4, 2, -3};
  std::vector<double> expected(v.size());
  for (std::size_t c = 0; c < v.size(); ++c) {
    for (std::size_t k = 0; k < v.size(); ++k) expected[c] += (bellsim::parity(c & k) ? -1.0 : 1.0) * v[k];
  }
  bellsim::fwht(std::span<double>(v));
  for (std::size_t c = 0; c < v.size(); ++c) EXPECT_DOUBLE_EQ(v[c], expected[c]);
  std::vector<double> bad(3);
  EXPECT_THROW(bellsim::fwht(std::span<double>(bad)), std::invalid_argument);
}

TEST(RunShards, ResultIndependentOfWorkerCount) {
  auto compute = [](std::size_t workers) {
    std::vector<std::uint64_t> out(37);
    bellsim::run_shards(out.size(), workers, [&](std::size_t s) {
      bellsim::Rng rng(bellsim::derive_seed(5, s));
      out[s] = rng();
    });
    return out;
  };
  EXPECT_EQ(compute(1), compute(4));
}
