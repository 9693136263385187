#include "docpack/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "docpack/error.hpp"

namespace docpack {

using json = nlohmann::json;

namespace {

constexpr std::string_view kJudgeInstruction =
    "Your task is to compare the model's answer to the expected answer and "
    "determine if the model's answer is correct. Respond with \"yes\" if the "
    "answer is correct, and \"no\" if it is incorrect. Do not include any "
    "explanations.";

}  // namespace

std::string render_prompt(const JudgeRequest& req) {
  if (req.question.empty()) throw ConfigError("judge request has an empty question");
  if (req.expected_answer.empty()) throw ConfigError("judge request has an empty expected answer");
  if (req.model_answer.empty()) throw ConfigError("judge request has an empty model answer");
  std::string out(kJudgeInstruction);
  out += "\n\nQuestion: ";
  out += req.question;
  out += "\nExpected Answer: ";
  out += req.expected_answer;
  out += "\nModel's Answer: ";
  out += req.model_answer;
  return out;
}

Verdict parse_verdict(std::string_view response) {
  std::size_t at = 0;
  // Whitespace and wrapping quotes/emphasis before the first word.
  while (at < response.size() &&
         (std::isspace(static_cast<unsigned char>(response[at])) ||
          std::string_view("\"'`*").find(response[at]) != std::string_view::npos)) {
    ++at;
  }
  std::string word;
  while (at < response.size() && std::isalpha(static_cast<unsigned char>(response[at]))) {
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(response[at]))));
    ++at;
  }
  if (word == "yes") return Verdict::kYes;
  if (word == "no") return Verdict::kNo;
  return Verdict::kUnparseable;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kYes: return "yes";
    case Verdict::kNo: return "no";
    case Verdict::kUnparseable: return "unparseable";
  }
  return "?";
}

std::optional<Verdict> parse_verdict_name(std::string_view name) {
  if (name == "yes") return Verdict::kYes;
  if (name == "no") return Verdict::kNo;
  if (name == "unparseable") return Verdict::kUnparseable;
  return std::nullopt;
}

std::string cache_key(std::string_view prompt) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(prompt.data(), prompt.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

VerdictCache::VerdictCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json rec = json::parse(line);
      const auto verdict = parse_verdict_name(rec.at("verdict").get<std::string>());
      if (!verdict) throw DataError("unknown verdict");
      entries_[rec.at("key").get<std::string>()] =
          JudgeVerdict{*verdict, rec.at("raw").get<std::string>(), true};
    } catch (const std::exception& e) {
      throw DataError(path_->string() + ":" + std::to_string(lineno) +
                      ": bad cache record: " + e.what());
    }
  }
}

std::optional<JudgeVerdict> VerdictCache::lookup(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  JudgeVerdict v = it->second;
  v.cached = true;
  return v;
}

void VerdictCache::insert(const std::string& key, const JudgeVerdict& verdict) {
  std::lock_guard lock(mu_);
  if (!entries_.emplace(key, verdict).second) return;
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw DataError("cannot append to verdict cache " + path_->string());
    json rec = json::object();
    rec["key"] = key;
    rec["verdict"] = to_string(verdict.verdict);
    rec["raw"] = verdict.raw_response;
    out << rec.dump() << '\n';
  }
}

std::size_t VerdictCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

HttpChatTransport::HttpChatTransport(JudgeConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, kUrl)) {
    throw ConfigError("judge endpoint \"" + config_.endpoint + "\" is not an http(s) URL");
  }
  base_url_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
}

std::string HttpChatTransport::complete(const std::string& prompt) {
  httplib::Client client(base_url_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  json body = {
      {"model", config_.model},
      {"messages", json::array({{{"role", config_.message_role}, {"content", prompt}}})},
      {"temperature", config_.temperature},
      {"max_tokens", config_.max_tokens},
  };
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransientTransportError("judge request to " + base_url_ + path_ +
                                  " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientTransportError("judge endpoint returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw TransportError("judge endpoint returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200));
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what());
  }
}

JudgeClient::JudgeClient(JudgeConfig config, std::unique_ptr<ChatTransport> transport,
                         std::shared_ptr<VerdictCache> cache)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(cache ? std::move(cache) : std::make_shared<VerdictCache>()) {
  if (!transport_) throw ConfigError("judge client needs a transport");
}

JudgeVerdict JudgeClient::judge(const JudgeRequest& req) {
  const std::string prompt = render_prompt(req);
  const std::string key = cache_key(prompt);
  if (auto hit = cache_->lookup(key)) return *hit;

  std::string raw;
  auto delay = config_.backoff_initial;
  for (int attempt = 0;; ++attempt) {
    try {
      ++transport_calls_;
      raw = transport_->complete(prompt);
      break;
    } catch (const TransientTransportError& e) {
      if (attempt >= config_.max_retries) {
        throw TransportError(std::string(e.what()) + " (gave up after " +
                             std::to_string(attempt + 1) + " attempts)");
      }
      std::this_thread::sleep_for(delay);
      delay = std::min(delay * 2, config_.backoff_max);
    }
  }
  JudgeVerdict verdict{parse_verdict(raw), raw, false};
  cache_->insert(key, verdict);
  return verdict;
}

std::vector<JudgeVerdict> JudgeClient::judge_all(std::span<const JudgeRequest> reqs) {
  std::vector<JudgeVerdict> out(reqs.size());
  if (reqs.empty()) return out;
  const std::size_t workers = std::clamp<std::size_t>(config_.max_in_flight, 1, reqs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto work = [&] {
    for (std::size_t i = next++; i < reqs.size(); i = next++) {
      try {
        out[i] = judge(reqs[i]);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();  // joins
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::size_t JudgeClient::transport_calls() const { return transport_calls_.load(); }

}  // namespace docpack
