#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docpack/error.hpp"
#include "docpack/evalharness.hpp"

namespace docpack {

struct JudgeRequest {
  std::string question;
  std::string expected_answer;
  std::string model_answer;
};

struct JudgeVerdict {
  Verdict verdict = Verdict::kUnparseable;
  std::string raw_response;
  bool cached = false;
};

// Fills the grading template. Throws ConfigError on an empty field. Field
// text is substituted verbatim, newlines included.
std::string render_prompt(const JudgeRequest& req);

// Trims, case-folds and compares the leading word against yes/no.
Verdict parse_verdict(std::string_view response);

std::string to_string(Verdict v);
std::optional<Verdict> parse_verdict_name(std::string_view name);

// Hex SHA-256 of the rendered prompt.
std::string cache_key(std::string_view prompt);

// Verdict cache, optionally backed by a line-delimited file of
// {"key","verdict","raw"} records. Safe for concurrent use.
class VerdictCache {
 public:
  VerdictCache() = default;
  // Loads existing records (if the file exists) and appends new ones to it.
  explicit VerdictCache(std::filesystem::path path);

  std::optional<JudgeVerdict> lookup(const std::string& key) const;
  void insert(const std::string& key, const JudgeVerdict& verdict);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, JudgeVerdict> entries_;
  std::optional<std::filesystem::path> path_;
};

struct JudgeConfig {
  // Full chat-completions URL, e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string endpoint;
  std::string model = "meta-llama/Llama-3.1-8B-Instruct";
  std::string api_key_env = "OPENAI_API_KEY";
  // "user" or "system".
  std::string message_role = "user";
  double temperature = 0.0;
  int max_tokens = 8;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 4;
  std::chrono::milliseconds backoff_initial{250};
  std::chrono::milliseconds backoff_max{8000};
};

// Thrown by transports for failures worth retrying (connection errors,
// timeouts, HTTP 429 and 5xx).
class TransientTransportError : public TransportError {
 public:
  using TransportError::TransportError;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  // Returns the assistant message content.
  virtual std::string complete(const std::string& prompt) = 0;
};

// OpenAI-compatible chat-completions over HTTP(S).
class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(JudgeConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  JudgeConfig config_;
  std::string base_url_;
  std::string path_;
};

class JudgeClient {
 public:
  JudgeClient(JudgeConfig config, std::unique_ptr<ChatTransport> transport,
              std::shared_ptr<VerdictCache> cache = nullptr);

  // Cache hit, or a transport call with bounded exponential backoff on
  // transient failures. Throws TransportError once retries are exhausted.
  JudgeVerdict judge(const JudgeRequest& req);

  // Runs up to config.max_in_flight requests at once; results keep input
  // order. Rethrows the first failure after all workers finish.
  std::vector<JudgeVerdict> judge_all(std::span<const JudgeRequest> reqs);

  std::size_t transport_calls() const;

 private:
  JudgeConfig config_;
  std::unique_ptr<ChatTransport> transport_;
  std::shared_ptr<VerdictCache> cache_;
  std::atomic<std::size_t> transport_calls_{0};
};

}  // namespace docpack
