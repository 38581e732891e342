#include <gtest/gtest.h>

#include <set>

#include "lidar_anchor/rng.hpp"

using lidar_anchor::CounterRng;

TEST(CounterRng, DrawIsFunctionOfKeyAndCounter) {
  CounterRng a(7);
  for (int i = 0; i < 5; ++i) a.next();
  const std::uint64_t sixth = a.next();
  EXPECT_EQ(sixth, CounterRng::mix(7 + 6 * CounterRng::kGolden));
  EXPECT_EQ(a.counter(), 6u);
}

TEST(CounterRng, SplitMixReferenceValue) {
  // First output of the canonical SplitMix64 seeded with 0.
  EXPECT_EQ(CounterRng(0).next(), 0xE220A8397B1DCDAFULL);
}

TEST(CounterRng, DerivedStreamsDiffer) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(CounterRng::derive(42, i));
  EXPECT_EQ(keys.size(), 1000u);
  EXPECT_NE(CounterRng::derive(1, 0), CounterRng::derive(2, 0));
}

TEST(CounterRng, BelowStaysInRangeAndCoversIt) {
  CounterRng r(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
}

TEST(CounterRng, UniformAndNormalMoments) {
  CounterRng r(11);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
  }
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}
