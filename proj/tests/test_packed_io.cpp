#include <gtest/gtest.h>

#include <sstream>

#include "docpack/error.hpp"
#include "docpack/packed_io.hpp"
#include "test_support.hpp"

namespace docpack {
namespace {

EpochPlan sample_plan() {
  const VocabConfig vocab{1, 0, 24};
  const Corpus c = testing::random_corpus(4, {}, vocab);
  return plan_epoch(c, PackingStrategy::multi({2, 4}), EpochMode::kRepackEveryEpoch, 1, 4, 3, vocab);
}

TEST(PackedJsonl, CanonicalRecord) {
  PackedSequence seq;
  seq.tokens = {7, 1, 8, 0};
  seq.segment_ids = {0, 0, 1, -1};
  seq.doc_ids = {"a", "b"};
  seq.sep_positions = {1};
  std::ostringstream out;
  write_sequences_jsonl(out, {seq});
  EXPECT_EQ(out.str(),
            "{\"tokens\":[7,1,8,0],\"segment_ids\":[0,0,1,-1],\"doc_ids\":[\"a\",\"b\"],"
            "\"truncated\":false,\"sep_positions\":[1]}\n");
}

TEST(PackedJsonl, RoundTrip) {
  const auto plan = sample_plan();
  std::stringstream buf;
  write_sequences_jsonl(buf, plan.sequences);
  EXPECT_EQ(read_sequences_jsonl(buf), plan.sequences);
}

TEST(PackedJsonl, SchemaErrorsNameTheRecord) {
  auto msg = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_sequences_jsonl(in);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string ok =
      "{\"tokens\":[5],\"segment_ids\":[0],\"doc_ids\":[\"a\"],\"truncated\":false,\"sep_positions\":[]}\n";
  EXPECT_EQ(msg(ok), "");
  EXPECT_NE(msg(ok + "{\"tokens\":[5,6],\"segment_ids\":[0],\"doc_ids\":[],\"truncated\":false,"
                     "\"sep_positions\":[]}\n").find("packed record 1"),
            std::string::npos);
  EXPECT_NE(msg("{\"tokens\":[5]}\n").find("packed record 0"), std::string::npos);
  EXPECT_NE(msg("{\"tokens\":[5],\"segment_ids\":[-2],\"doc_ids\":[],\"truncated\":false,"
                "\"sep_positions\":[]}\n").find("below -1"),
            std::string::npos);
  EXPECT_NE(msg("not json\n"), "");
}

TEST(Manifest, RoundTrip) {
  const auto plan = sample_plan();
  testing::TempDir dir("manifest");
  const Manifest m = manifest_of(plan);
  EXPECT_EQ(m.strategy, "pack-2-4");
  EXPECT_EQ(m.mode, "repack");
  const std::string text = manifest_json(m);
  EXPECT_TRUE(text.starts_with("{\"strategy\":\"pack-2-4\",\"mode\":\"repack\",\"seed\":4,\"epoch\":1,"));
  EXPECT_TRUE(text.ends_with("\n"));
  testing::write_file(dir / "m.json", text);
  const Manifest back = read_manifest(dir / "m.json");
  EXPECT_EQ(back.batches, plan.batches);
  EXPECT_EQ(back.batch_size, 3u);
  testing::write_file(dir / "bad.json", "{\"strategy\":1}");
  EXPECT_THROW(read_manifest(dir / "bad.json"), DataError);
}

TEST(Compact, RoundTripAndByteLayout) {
  testing::TempDir dir("compact");
  PackedSequence seq;
  seq.tokens = {0x01020304, 1, 0};
  seq.segment_ids = {0, 0, -1};
  seq.doc_ids = {"a"};
  seq.sep_positions = {1};
  write_compact(dir / "x.bin", dir / "x.idx.json", {seq, seq});
  const std::string bytes = testing::read_file(dir / "x.bin");
  ASSERT_EQ(bytes.size(), 2u * 3 * 8);
  EXPECT_EQ(bytes.substr(0, 4), std::string("\x04\x03\x02\x01", 4));
  EXPECT_EQ(bytes.substr(20, 4), std::string("\xff\xff\xff\xff", 4));  // PAD segment
  EXPECT_EQ(read_compact(dir / "x.bin", dir / "x.idx.json"), (std::vector<PackedSequence>{seq, seq}));

  const auto plan = sample_plan();
  write_compact(dir / "p.bin", dir / "p.idx.json", plan.sequences);
  EXPECT_EQ(read_compact(dir / "p.bin", dir / "p.idx.json"), plan.sequences);
}

TEST(Compact, RejectsBadIndex) {
  testing::TempDir dir("compact");
  testing::write_file(dir / "x.bin", std::string(8, '\0'));
  testing::write_file(dir / "a.idx.json", "{\"format\":\"other\"}");
  EXPECT_THROW(read_compact(dir / "x.bin", dir / "a.idx.json"), DataError);
  testing::write_file(dir / "b.idx.json",
                      "{\"format\":\"docpack-compact-v1\",\"sequences\":[{\"offset\":0,\"length\":4,"
                      "\"doc_ids\":[],\"truncated\":false,\"sep_positions\":[]}]}");
  EXPECT_THROW(read_compact(dir / "x.bin", dir / "b.idx.json"), DataError);
  testing::write_file(dir / "c.idx.json", "{\"format\":\"docpack-compact-v1\",\"sequences\":[{}]}");
  EXPECT_THROW(read_compact(dir / "x.bin", dir / "c.idx.json"), DataError);
}

TEST(EpochStem, ZeroPadded) {
  EXPECT_EQ(epoch_stem(0), "epoch_000");
  EXPECT_EQ(epoch_stem(42), "epoch_042");
  EXPECT_EQ(epoch_stem(1234), "epoch_1234");
}

}  // namespace
}  // namespace docpack
