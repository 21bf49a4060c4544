#include "ticc/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

namespace ticc {
namespace {

TEST(SplitMix64, KnownFirstOutput) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, EngineIsStandardMersenneTwister) {
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, DerivedStreamsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(7, s));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, UniformMomentsAndRange) {
  Rng rng(1);
  double sum = 0.0, sq = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / N, 0.5, 0.005);
  EXPECT_NEAR(sq / N - (sum / N) * (sum / N), 1.0 / 12.0, 0.002);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  EXPECT_NEAR(m1 / N, 0.0, 0.01);
  EXPECT_NEAR(m2 / N, 1.0, 0.015);
  EXPECT_NEAR(m4 / N, 3.0, 0.1);
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[rng.uniform_index(7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(rng.uniform_index(1), 0u);
  EXPECT_EQ(rng.uniform_index(0), 0u);
}

TEST(Rng, ShuffleIsPermutationAndDeterministic) {
  std::vector<int> a(20), b(20);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Rng r1(9), r2(9);
  r1.shuffle(a);
  r2.shuffle(b);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

}  // namespace
}  // namespace ticc
