#include <gtest/gtest.h>

#include "docpack/config.hpp"
#include "docpack/error.hpp"
#include "test_support.hpp"

namespace docpack {
namespace {

TEST(Config, Defaults) {
  const RunConfig c = parse_run_config("{}");
  EXPECT_EQ(c.strategy, PackingStrategy::no_packing());
  EXPECT_EQ(c.epoch_mode, EpochMode::kRepackEveryEpoch);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_EQ(c.judge.message_role, "user");
  EXPECT_EQ(c.judge.temperature, 0.0);
  EXPECT_EQ(c.vocab.context_window, 512u);
}

TEST(Config, FullFileWithComments) {
  const RunConfig c = parse_run_config(R"({
    // packing
    "docs": "d.jsonl", "groups": "/abs/g.jsonl", "out": "run",
    "vocab": {"sep_id": 2, "pad_id": 3, "context_window": 128},
    "strategy": "pack-2-4-8", "epoch_mode": "no-repack-reshuffle",
    "epochs": 4, "seed": 99, "batch_size": 16, "sft_template": "inline", "compact": true,
    /* judge */
    "judge": {"endpoint": "http://h:1/v1/chat/completions", "message_role": "system",
              "max_in_flight": 2, "timeout_ms": 1500, "max_retries": 1,
              "backoff_initial_ms": 10, "backoff_max_ms": 20}
  })", "/base");
  EXPECT_EQ(c.docs, std::filesystem::path("/base/d.jsonl"));
  EXPECT_EQ(c.groups, std::filesystem::path("/abs/g.jsonl"));
  EXPECT_EQ(c.out, std::filesystem::path("/base/run"));
  EXPECT_EQ(c.vocab.sep_id, 2u);
  EXPECT_EQ(c.strategy.to_string(), "pack-2-4-8");
  EXPECT_EQ(c.epoch_mode, EpochMode::kNoRepackReshuffleOrder);
  EXPECT_EQ(c.epochs, 4u);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.sft_template, RecallTemplate::kInline);
  EXPECT_TRUE(c.write_compact);
  EXPECT_EQ(c.judge.message_role, "system");
  EXPECT_EQ(c.judge.timeout.count(), 1500);
  EXPECT_EQ(c.judge.backoff_max.count(), 20);
}

TEST(Config, Rejections) {
  for (const char* bad : {
           "[1]", "{", R"({"colour": 1})", R"({"vocab": {"eos": 1}})",
           R"({"judge": {"url": "x"}})", R"({"strategy": "pack-0"})",
           R"({"batch_size": 0})", R"({"vocab": {"sep_id": 0, "pad_id": 0}})",
           R"({"judge": {"message_role": "assistant"}})", R"({"epochs": "two"})",
           R"({"epoch_mode": "always"})", R"({"judge": {"max_in_flight": 0}})"}) {
    EXPECT_THROW(parse_run_config(bad), ConfigError) << bad;
  }
}

TEST(Config, LoadResolvesAgainstFileDirectory) {
  testing::TempDir dir("config");
  testing::write_file(dir / "run.json", R"({"docs": "data/d.jsonl"})");
  EXPECT_EQ(load_run_config(dir / "run.json").docs, dir.path() / "data/d.jsonl");
  EXPECT_THROW(load_run_config(dir / "missing.json"), ConfigError);
}

TEST(Config, ExampleConfigParses) {
  const auto c = load_run_config(std::filesystem::path(DOCPACK_DATA_DIR) / "../configs/example_run.jsonc");
  EXPECT_TRUE(std::filesystem::exists(c.docs)) << c.docs;
  EXPECT_TRUE(std::filesystem::exists(c.groups)) << c.groups;
}

}  // namespace
}  // namespace docpack
