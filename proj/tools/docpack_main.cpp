// docpack: build packed pre-training epochs, report their cost, and score
// structured recall generations.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "docpack/commands.hpp"
#include "docpack/error.hpp"

namespace {

using docpack::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document packing toolkit for continual pre-training"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path, out_dir, docs, groups;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Run config (JSON, comments allowed)");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--docs", docs, "Documents file (line-delimited JSON)");
  app.add_option("--groups", groups, "Question groups file (line-delimited JSON)");

  // pack
  auto* pack = app.add_subcommand("pack", "Write packed sequences and a manifest per epoch");
  std::optional<std::string> strategy, mode, tmpl;
  std::optional<std::uint64_t> epochs;
  std::optional<std::size_t> batch_size, window;
  std::optional<std::uint32_t> sep_id, pad_id;
  bool compact = false;
  pack->add_option("--strategy", strategy, "none | pack-X | pack-A-B-... | fill");
  pack->add_option("--mode", mode, "repack | no-repack | no-repack-reshuffle");
  pack->add_option("--epochs", epochs, "Number of epochs");
  pack->add_option("--batch-size", batch_size, "Sequences per batch");
  pack->add_option("--context-window", window, "Tokens per sequence");
  pack->add_option("--sep-id", sep_id, "Separator token id");
  pack->add_option("--pad-id", pad_id, "Padding token id");
  pack->add_flag("--compact", compact, "Also write the little-endian binary form");

  // stats
  auto* stats = app.add_subcommand("stats", "Padding, batch and attention statistics; convergence tables");
  docpack::StatsOptions stats_opts;
  std::optional<std::string> packed, manifest, steps_table, ref_table, report;
  stats->add_option("--packed", packed, "Packed epoch file");
  stats->add_option("--manifest", manifest, "Manifest (default: next to the packed file)");
  stats->add_option("--steps-table", steps_table, "CSV of steps to convergence");
  stats->add_option("--ref-table", ref_table, "CSV of reference document counts");
  stats->add_option("--tolerance", stats_opts.tolerance, "Relative tolerance")->capture_default_str();
  stats->add_option("--report", report, "Write a JSON report here");

  // eval
  auto* eval = app.add_subcommand("eval", "Score recall generations");
  std::string generations;
  std::optional<std::string> verdict_cache, eval_report, endpoint, judge_model;
  bool no_judge = false;
  eval->add_option("--generations", generations, "Line-delimited {question_id, text}")->required();
  eval->add_option("--verdict-cache", verdict_cache, "Judge verdict cache file");
  eval->add_option("--report", eval_report, "Write per-question and aggregate records here");
  eval->add_option("--template", tmpl, "markdown | inline");
  eval->add_flag("--no-judge", no_judge, "Skip judging; accuracy is undefined");
  eval->add_option("--endpoint", endpoint, "Judge chat-completions URL");
  eval->add_option("--model", judge_model, "Judge model name");

  // judge
  auto* judge = app.add_subcommand("judge", "Ask the judge model about answers");
  docpack::JudgeOptions judge_opts;
  std::optional<std::string> requests, judge_out;
  judge->add_option("--requests", requests, "Line-delimited {question, expected, answer}");
  judge->add_option("--question", judge_opts.question);
  judge->add_option("--expected", judge_opts.expected);
  judge->add_option("--answer", judge_opts.answer);
  judge->add_option("--verdict-cache", verdict_cache, "Judge verdict cache file");
  judge->add_option("--output", judge_out, "Write verdict records here");
  judge->add_flag("--print-prompt", judge_opts.print_prompt, "Print the rendered prompt and exit");
  judge->add_option("--endpoint", endpoint, "Judge chat-completions URL");
  judge->add_option("--model", judge_model, "Judge model name");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Pretty-print one packed sequence and its mask");
  docpack::InspectOptions inspect_opts;
  std::string cross = "on";
  inspect->add_option("--packed", inspect_opts.packed, "Packed epoch file")->required();
  inspect->add_option("--index", inspect_opts.index, "Sequence index")->capture_default_str();
  inspect->add_option("--cross-doc", cross, "on | off")->check(CLI::IsMember({"on", "off"}));
  inspect->add_option("--max-matrix", inspect_opts.max_matrix, "Largest mask drawn")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::kConfig);
  }

  try {
    docpack::RunConfig config;
    if (config_path) config = docpack::load_run_config(*config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.out = *out_dir;
    if (docs) config.docs = *docs;
    if (groups) config.groups = *groups;
    if (strategy) config.strategy = docpack::PackingStrategy::parse(*strategy);
    if (mode) config.epoch_mode = docpack::parse_epoch_mode(*mode);
    if (epochs) config.epochs = *epochs;
    if (batch_size) config.batch_size = *batch_size;
    if (window) config.vocab.context_window = *window;
    if (sep_id) config.vocab.sep_id = *sep_id;
    if (pad_id) config.vocab.pad_id = *pad_id;
    if (compact) config.write_compact = true;
    if (tmpl) config.sft_template = docpack::parse_recall_template(*tmpl);
    if (endpoint) config.judge.endpoint = *endpoint;
    if (judge_model) config.judge.model = *judge_model;
    docpack::validate(config);

    if (*pack) {
      docpack::cmd_pack(config, std::cerr);
    } else if (*stats) {
      if (packed) stats_opts.packed = *packed;
      if (manifest) stats_opts.manifest = *manifest;
      if (steps_table) stats_opts.steps_table = *steps_table;
      if (ref_table) stats_opts.reference_table = *ref_table;
      if (report) stats_opts.report = *report;
      if (!docpack::cmd_stats(stats_opts, std::cout)) return code(ExitCode::kData);
    } else if (*eval) {
      docpack::EvalOptions opts;
      opts.generations = generations;
      if (verdict_cache) opts.verdict_cache = *verdict_cache;
      if (eval_report) opts.report = *eval_report;
      opts.no_judge = no_judge;
      docpack::cmd_eval(config, opts, std::cout);
    } else if (*judge) {
      if (requests) judge_opts.requests = *requests;
      if (verdict_cache) judge_opts.verdict_cache = *verdict_cache;
      if (judge_out) judge_opts.output = *judge_out;
      docpack::cmd_judge(config, judge_opts, std::cout);
    } else if (*inspect) {
      inspect_opts.cross_doc = cross == "on";
      docpack::cmd_inspect(inspect_opts, std::cout);
    }
  } catch (const docpack::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return code(ExitCode::kConfig);
  } catch (const docpack::TransportError& e) {
    spdlog::error("judgeclient: {}", e.what());
    return code(ExitCode::kTransport);
  } catch (const docpack::DataError& e) {
    spdlog::error("data: {}", e.what());
    return code(ExitCode::kData);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return code(ExitCode::kInternal);
  }
  return code(ExitCode::kOk);
}
