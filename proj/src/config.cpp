#include "docpack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "docpack/error.hpp"

namespace docpack {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root,
                 {"docs", "groups", "out", "vocab", "strategy", "epoch_mode", "epochs", "seed",
                  "batch_size", "sft_template", "judge", "compact"},
                 "config");

  RunConfig cfg;
  const std::string w = "config";
  if (root.contains("docs")) cfg.docs = resolve(base_dir, get<std::string>(root, "docs", w));
  if (root.contains("groups")) cfg.groups = resolve(base_dir, get<std::string>(root, "groups", w));
  if (root.contains("out")) cfg.out = resolve(base_dir, get<std::string>(root, "out", w));
  if (root.contains("vocab")) {
    const auto& v = root["vocab"];
    reject_unknown(v, {"sep_id", "pad_id", "context_window"}, "config.vocab");
    if (v.contains("sep_id")) cfg.vocab.sep_id = get<TokenId>(v, "sep_id", "config.vocab");
    if (v.contains("pad_id")) cfg.vocab.pad_id = get<TokenId>(v, "pad_id", "config.vocab");
    if (v.contains("context_window")) {
      cfg.vocab.context_window = get<std::size_t>(v, "context_window", "config.vocab");
    }
  }
  if (root.contains("strategy")) cfg.strategy = PackingStrategy::parse(get<std::string>(root, "strategy", w));
  if (root.contains("epoch_mode")) cfg.epoch_mode = parse_epoch_mode(get<std::string>(root, "epoch_mode", w));
  if (root.contains("epochs")) cfg.epochs = get<std::uint64_t>(root, "epochs", w);
  if (root.contains("seed")) cfg.seed = get<std::uint64_t>(root, "seed", w);
  if (root.contains("batch_size")) cfg.batch_size = get<std::size_t>(root, "batch_size", w);
  if (root.contains("sft_template")) {
    cfg.sft_template = parse_recall_template(get<std::string>(root, "sft_template", w));
  }
  if (root.contains("compact")) cfg.write_compact = get<bool>(root, "compact", w);
  if (root.contains("judge")) {
    const auto& j = root["judge"];
    const std::string jw = "config.judge";
    reject_unknown(j,
                   {"endpoint", "model", "api_key_env", "message_role", "temperature", "max_tokens",
                    "max_in_flight", "timeout_ms", "max_retries", "backoff_initial_ms",
                    "backoff_max_ms"},
                   jw);
    auto& jc = cfg.judge;
    if (j.contains("endpoint")) jc.endpoint = get<std::string>(j, "endpoint", jw);
    if (j.contains("model")) jc.model = get<std::string>(j, "model", jw);
    if (j.contains("api_key_env")) jc.api_key_env = get<std::string>(j, "api_key_env", jw);
    if (j.contains("message_role")) jc.message_role = get<std::string>(j, "message_role", jw);
    if (j.contains("temperature")) jc.temperature = get<double>(j, "temperature", jw);
    if (j.contains("max_tokens")) jc.max_tokens = get<int>(j, "max_tokens", jw);
    if (j.contains("max_in_flight")) jc.max_in_flight = get<std::size_t>(j, "max_in_flight", jw);
    if (j.contains("timeout_ms")) jc.timeout = std::chrono::milliseconds(get<long>(j, "timeout_ms", jw));
    if (j.contains("max_retries")) jc.max_retries = get<int>(j, "max_retries", jw);
    if (j.contains("backoff_initial_ms")) {
      jc.backoff_initial = std::chrono::milliseconds(get<long>(j, "backoff_initial_ms", jw));
    }
    if (j.contains("backoff_max_ms")) {
      jc.backoff_max = std::chrono::milliseconds(get<long>(j, "backoff_max_ms", jw));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  cfg.vocab.validate();
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (cfg.judge.message_role != "user" && cfg.judge.message_role != "system") {
    throw ConfigError("judge.message_role must be \"user\" or \"system\"");
  }
  if (cfg.judge.max_in_flight < 1) throw ConfigError("judge.max_in_flight must be at least 1");
  if (cfg.judge.max_retries < 0) throw ConfigError("judge.max_retries must be non-negative");
  if (cfg.judge.timeout.count() <= 0) throw ConfigError("judge.timeout_ms must be positive");
}

}  // namespace docpack
