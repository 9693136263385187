#include <gtest/gtest.h>

#include <random>

#include "docpack/maskgen.hpp"
#include "test_support.hpp"

namespace docpack {
namespace {

// Independent restatement of the permission rule.
bool oracle(const std::vector<std::int32_t>& seg, bool cross, std::size_t i, std::size_t j) {
  if (j > i) return false;
  if (seg[i] < 0 || seg[j] < 0) return false;
  return cross || seg[i] == seg[j];
}

std::vector<std::int32_t> random_segments(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::int32_t> seg;
  std::int32_t s = 0;
  std::bernoulli_distribution next(0.2);
  const std::size_t content = std::uniform_int_distribution<std::size_t>(0, n)(gen);
  for (std::size_t i = 0; i < content; ++i) {
    if (i > 0 && next(gen)) ++s;
    seg.push_back(s);
  }
  seg.resize(n, kPadSegment);
  return seg;
}

TEST(Mask, DenseMatchesOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 40)(gen);
    const auto seg = random_segments(gen, n);
    for (bool cross : {true, false}) {
      const auto m = dense_mask(MaskSpec{seg, cross});
      ASSERT_EQ(m.size(), n);
      std::size_t expected = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          ASSERT_EQ(m(i, j), oracle(seg, cross, i, j)) << i << "," << j;
          expected += oracle(seg, cross, i, j);
        }
      }
      EXPECT_EQ(m.count(), expected);
      EXPECT_EQ(allowed_pairs(seg, cross), expected);
    }
  }
}

TEST(Mask, FromPackedSequence) {
  PackedSequence seq;
  seq.tokens = {5, 6, 1, 7, 0};
  seq.segment_ids = {0, 0, 0, 1, kPadSegment};
  const auto spec = MaskSpec::from(seq, false);
  EXPECT_FALSE(spec.cross_doc);
  EXPECT_TRUE(may_attend(spec, 2, 0));   // SEP sees its own document
  EXPECT_FALSE(may_attend(spec, 3, 2));  // but not across the boundary
  EXPECT_TRUE(may_attend(MaskSpec::from(seq, true), 3, 2));
  EXPECT_FALSE(may_attend(spec, 4, 4));  // PAD attends nowhere
  EXPECT_THROW(may_attend(spec, 5, 0), std::out_of_range);
  EXPECT_EQ(loss_mask(seq), (std::vector<bool>{true, true, true, true, false}));
}

TEST(Mask, AllowedPairsClosedForm) {
  const std::vector<std::int32_t> seg{0, 0, 0, 1, 1, 2, -1, -1};
  EXPECT_EQ(allowed_pairs(seg, true), 6u * 7 / 2);
  EXPECT_EQ(allowed_pairs(seg, false), 6u + 3 + 1);
}

TEST(Mask, BitsetRoundTripAndLayout) {
  const std::vector<std::int32_t> seg{0, 0, 1};
  const auto m = dense_mask(MaskSpec{seg, true});
  const auto bytes = pack_dense_mask(m);
  // Lower-triangular 3x3: bits 0, 3, 4, 6, 7, 8.
  ASSERT_EQ(bytes.size(), 2u);
  EXPECT_EQ(bytes[0], 0b11011001);
  EXPECT_EQ(bytes[1], 0b00000001);
  EXPECT_EQ(unpack_dense_mask(bytes, 3), m);

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 33)(gen);
    const auto r = dense_mask(MaskSpec{random_segments(gen, n), trial % 2 == 0});
    EXPECT_EQ(unpack_dense_mask(pack_dense_mask(r), n), r);
  }
}

TEST(Mask, CapIsEnforced) {
  std::vector<std::int32_t> seg(20, 0);
  EXPECT_THROW(dense_mask(MaskSpec{seg, true}, 16), std::length_error);
  EXPECT_NO_THROW(dense_mask(MaskSpec{seg, true}, 20));
}

}  // namespace
}  // namespace docpack
