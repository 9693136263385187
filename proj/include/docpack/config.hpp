#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "docpack/corpus.hpp"
#include "docpack/judge.hpp"
#include "docpack/packer.hpp"
#include "docpack/recall_format.hpp"

namespace docpack {

struct RunConfig {
  std::filesystem::path docs;
  std::filesystem::path groups;
  std::filesystem::path out = "out";
  VocabConfig vocab;
  PackingStrategy strategy = PackingStrategy::no_packing();
  EpochMode epoch_mode = EpochMode::kRepackEveryEpoch;
  std::uint64_t epochs = 1;
  std::uint64_t seed = 0;
  std::size_t batch_size = 32;
  RecallTemplate sft_template = RecallTemplate::kMarkdown;
  JudgeConfig judge;
  bool write_compact = false;
};

// JSON (comments allowed). Relative paths resolve against the file's
// directory. Unknown keys are rejected. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir = {});

// Throws ConfigError on invariant violations (paths are checked separately).
void validate(const RunConfig& config);

}  // namespace docpack
