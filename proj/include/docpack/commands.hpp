#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docpack/config.hpp"
#include "docpack/judge.hpp"

namespace docpack {

enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kData = 3,
  kTransport = 4,
};

// Writes <out>/epoch_NNN.jsonl and <out>/epoch_NNN.manifest.json for every
// epoch in [0, epochs). Returns the written paths.
std::vector<std::filesystem::path> cmd_pack(const RunConfig& config,
                                            std::ostream& log);

struct StatsOptions {
  std::optional<std::filesystem::path> packed;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> steps_table;
  std::optional<std::filesystem::path> reference_table;
  std::optional<std::filesystem::path> report;
  double tolerance = 0.05;
};

// Returns false when a compared cell exceeds the tolerance.
bool cmd_stats(const StatsOptions& options, std::ostream& out);

struct EvalOptions {
  std::filesystem::path generations;
  std::optional<std::filesystem::path> verdict_cache;
  std::optional<std::filesystem::path> report;
  bool no_judge = false;
};

// transport may be null, in which case one is built from config.judge.
void cmd_eval(const RunConfig& config, const EvalOptions& options,
              std::ostream& out,
              std::unique_ptr<ChatTransport> transport = nullptr);

struct JudgeOptions {
  std::optional<std::filesystem::path> requests;
  std::optional<std::filesystem::path> verdict_cache;
  std::optional<std::filesystem::path> output;
  std::string question;
  std::string expected;
  std::string answer;
  bool print_prompt = false;
};

void cmd_judge(const RunConfig& config, const JudgeOptions& options,
               std::ostream& out,
               std::unique_ptr<ChatTransport> transport = nullptr);

struct InspectOptions {
  std::filesystem::path packed;
  std::size_t index = 0;
  bool cross_doc = true;
  std::size_t max_matrix = 64;
};

void cmd_inspect(const InspectOptions& options, std::ostream& out);

}  // namespace docpack
