#include <gtest/gtest.h>

#include <array>
#include <map>
#include <numeric>

#include "docpack/rng.hpp"

namespace docpack {
namespace {

TEST(Rng, StreamsAreReproducible) {
  Rng a = derive_stream(7, 3, "q1", "pack");
  Rng b = derive_stream(7, 3, "q1", "pack");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, StreamsSeparateByEveryInput) {
  const auto base = derive_seed(7, 3, "q1", "pack");
  EXPECT_NE(base, derive_seed(8, 3, "q1", "pack"));
  EXPECT_NE(base, derive_seed(7, 4, "q1", "pack"));
  EXPECT_NE(base, derive_seed(7, 3, "q2", "pack"));
  EXPECT_NE(base, derive_seed(7, 3, "q1", "order"));
  // Length prefixes keep ("ab","c") and ("a","bc") apart.
  EXPECT_NE(derive_seed(0, 0, "ab", "c"), derive_seed(0, 0, "a", "bc"));
}

TEST(Rng, UniformBelowStaysInRange) {
  Rng r(1);
  EXPECT_EQ(r.uniform_below(1), 0u);
  for (std::uint64_t bound : {2ull, 3ull, 10ull, 1000ull, (1ull << 63) + 5}) {
    for (int i = 0; i < 200; ++i) EXPECT_LT(r.uniform_below(bound), bound);
  }
}

TEST(Rng, ShuffleIsRoughlyUniform) {
  // All 6 orders of 3 items, 60000 draws: each expected 10000.
  Rng r(42);
  std::map<std::array<int, 3>, int> seen;
  for (int i = 0; i < 60000; ++i) {
    std::array<int, 3> v{0, 1, 2};
    r.shuffle(std::span<int>(v));
    ++seen[v];
  }
  ASSERT_EQ(seen.size(), 6u);
  for (const auto& [perm, n] : seen) EXPECT_NEAR(n, 10000, 500);
}

}  // namespace
}  // namespace docpack
