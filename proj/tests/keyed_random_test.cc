#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "linbandit/keyed_random.h"

namespace linbandit {
namespace {

// First SplitMix64 output from state 0.
TEST(Mix64, MatchesSplitMixReference) {
  EXPECT_EQ(Mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(HashKey, FoldsWordsInOrder) {
  const std::uint64_t h = HashKey(5, {1, 2});
  EXPECT_EQ(h, Mix64(Mix64(Mix64(5) ^ 1) ^ 2));
  EXPECT_NE(HashKey(5, {1, 2}), HashKey(5, {2, 1}));
  EXPECT_EQ(HashKey(9, {}), Mix64(9));
}

TEST(UnitInterval, Endpoints) {
  EXPECT_EQ(UnitInterval(0), 0.0);
  EXPECT_LT(UnitInterval(~0ULL), 1.0);
  EXPECT_EQ(UnitInterval(~0ULL), 1.0 - 0x1.0p-53);
}

TEST(StandardNormalAt, PureAndFinite) {
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double z = StandardNormalAt(k);
    EXPECT_TRUE(std::isfinite(z));
    EXPECT_EQ(z, StandardNormalAt(k));
  }
}

TEST(StandardNormalAt, MomentsAndTail) {
  const int n = 200000;
  double sum = 0.0, sq = 0.0, four = 0.0;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    const double z = StandardNormalAt(HashKey(11, {static_cast<std::uint64_t>(i)}));
    sum += z;
    sq += z * z;
    four += z * z * z * z;
    above += z >= 1.0;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
  EXPECT_NEAR(four / n, 3.0, 0.06);
  EXPECT_NEAR(static_cast<double>(above) / n, 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 0.003);
}

TEST(DeriveSeed, SeparatesPurposesAndReplications) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 50; ++r) {
    for (auto p : {StreamPurpose::kNoise, StreamPurpose::kPerturbation, StreamPurpose::kSampler,
                   StreamPurpose::kEnvironment, StreamPurpose::kThompson}) {
      seen.insert(DeriveSeed(3, r, p));
    }
  }
  EXPECT_EQ(seen.size(), 250u);
  EXPECT_EQ(DeriveSeed(3, 4, StreamPurpose::kNoise),
            HashKey(3, {4, static_cast<std::uint64_t>(StreamPurpose::kNoise)}));
}

TEST(RandomStream, CounterAdvancesOncePerDraw) {
  RandomStream s(42);
  s.NextBits();
  s.NextUniform();
  s.NextNormal();
  s.NextIndex(7);
  EXPECT_EQ(s.counter(), 4u);
  EXPECT_EQ(s.seed(), 42u);
}

TEST(RandomStream, ReplaysFromKeys) {
  RandomStream s(42);
  std::vector<double> draws;
  for (int i = 0; i < 5; ++i) draws.push_back(s.NextNormal());
  for (std::uint64_t i = 0; i < 5; ++i) {
    EXPECT_EQ(draws[i], StandardNormalAt(HashKey(42, {i})));
  }
}

TEST(RandomStream, NextIndexIsUniform) {
  RandomStream s(1);
  std::vector<int> counts(8, 0);
  const int n = 80000;
  for (int i = 0; i < n; ++i) {
    const auto k = s.NextIndex(8);
    ASSERT_LT(k, 8u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.125, 0.01);
  RandomStream one(2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(one.NextIndex(1), 0u);
}

TEST(RandomStream, UniformMoments) {
  RandomStream s(8);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.NextUniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

}  // namespace
}  // namespace linbandit
