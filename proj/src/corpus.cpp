#include "docpack/corpus.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "docpack/error.hpp"

namespace docpack {

using json = nlohmann::json;

void VocabConfig::validate() const {
  if (sep_id == pad_id) {
    throw ConfigError("vocab: sep_id and pad_id must differ (both " +
                      std::to_string(sep_id) + ")");
  }
  if (context_window < 2) {
    throw ConfigError("vocab: context_window must be at least 2");
  }
}

namespace {

[[noreturn]] void fail_at(std::string_view source, std::size_t line,
                          const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw DataError(os.str());
}

const json& require(const json& rec, const char* key, json::value_t type,
                    std::string_view source, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) fail_at(source, line, std::string("missing field \"") + key + "\"");
  const bool ok = type == json::value_t::number_unsigned
                      ? it->is_number_integer()
                      : it->type() == type;
  if (!ok) fail_at(source, line, std::string("field \"") + key + "\" has wrong type");
  return *it;
}

std::vector<std::string> string_list(const json& arr, const char* key,
                                     std::string_view source, std::size_t line) {
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_string()) {
      fail_at(source, line, std::string("field \"") + key + "\" must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Calls fn(record, line_number) for each non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_at(source, lineno, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) fail_at(source, lineno, "record is not an object");
    fn(rec, lineno);
  }
}

}  // namespace

std::vector<Document> parse_documents(std::istream& in, std::string_view source) {
  std::vector<Document> docs;
  for_each_record(in, source, [&](const json& rec, std::size_t line) {
    Document d;
    d.id = require(rec, "id", json::value_t::string, source, line).get<std::string>();
    d.title = require(rec, "title", json::value_t::string, source, line).get<std::string>();
    const auto& toks = require(rec, "tokens", json::value_t::array, source, line);
    d.tokens.reserve(toks.size());
    for (const auto& t : toks) {
      if (!t.is_number_integer() || t.get<std::int64_t>() < 0 ||
          t.get<std::int64_t>() > std::int64_t{UINT32_MAX}) {
        fail_at(source, line, "document \"" + d.id + "\": token ids must be non-negative 32-bit integers");
      }
      d.tokens.push_back(t.get<TokenId>());
    }
    if (auto it = rec.find("text"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) fail_at(source, line, "field \"text\" has wrong type");
      d.raw_text = it->get<std::string>();
    }
    docs.push_back(std::move(d));
  });
  return docs;
}

std::vector<DocumentGroup> parse_groups(std::istream& in, std::string_view source) {
  std::vector<DocumentGroup> groups;
  for_each_record(in, source, [&](const json& rec, std::size_t line) {
    DocumentGroup g;
    g.question_id = require(rec, "question_id", json::value_t::string, source, line).get<std::string>();
    g.doc_ids = string_list(require(rec, "doc_ids", json::value_t::array, source, line), "doc_ids", source, line);
    g.relevant_ids = string_list(require(rec, "relevant_ids", json::value_t::array, source, line), "relevant_ids", source, line);
    g.answer = require(rec, "answer", json::value_t::string, source, line).get<std::string>();
    if (auto it = rec.find("question"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) fail_at(source, line, "field \"question\" has wrong type");
      g.question = it->get<std::string>();
    }
    groups.push_back(std::move(g));
  });
  return groups;
}

Corpus Corpus::build(std::vector<Document> documents,
                     std::vector<DocumentGroup> groups,
                     const VocabConfig& vocab) {
  vocab.validate();
  Corpus c;
  c.documents_.reserve(documents.size());
  c.order_.reserve(documents.size());
  for (auto& d : documents) {
    if (d.tokens.empty()) throw DataError("document \"" + d.id + "\" has no tokens");
    for (TokenId t : d.tokens) {
      if (t == vocab.sep_id || t == vocab.pad_id) {
        throw DataError("document \"" + d.id + "\" contains reserved token " +
                        std::to_string(t) + " (sep/pad)");
      }
    }
    std::string id = d.id;
    if (!c.documents_.emplace(id, std::move(d)).second) {
      throw DataError("duplicate document id \"" + id + "\"");
    }
    c.order_.push_back(std::move(id));
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const std::string where = "group \"" + g.question_id + "\"";
    if (g.doc_ids.empty()) throw DataError(where + " has no doc_ids");
    std::unordered_set<std::string_view> members;
    for (const auto& id : g.doc_ids) {
      if (!c.documents_.contains(id)) {
        throw DataError(where + " references missing document \"" + id + "\"");
      }
      members.insert(id);
    }
    for (const auto& id : g.relevant_ids) {
      if (!members.contains(id)) {
        throw DataError(where + ": relevant id \"" + id + "\" is not among its doc_ids");
      }
    }
    if (!c.group_index_.emplace(g.question_id, gi).second) {
      throw DataError("duplicate question_id \"" + g.question_id + "\"");
    }
  }
  c.groups_ = std::move(groups);
  return c;
}

const Document* Corpus::find(std::string_view id) const {
  auto it = documents_.find(std::string(id));
  return it == documents_.end() ? nullptr : &it->second;
}

const Document& Corpus::document(std::string_view id) const {
  if (const auto* d = find(id)) return *d;
  throw DataError("unknown document \"" + std::string(id) + "\"");
}

const DocumentGroup* Corpus::find_group(std::string_view question_id) const {
  auto it = group_index_.find(std::string(question_id));
  return it == group_index_.end() ? nullptr : &groups_[it->second];
}

Corpus load_corpus(const std::filesystem::path& docs_path,
                   const std::filesystem::path& groups_path,
                   const VocabConfig& vocab) {
  std::ifstream docs_in(docs_path);
  if (!docs_in) throw DataError("cannot open documents file " + docs_path.string());
  std::ifstream groups_in(groups_path);
  if (!groups_in) throw DataError("cannot open groups file " + groups_path.string());
  auto docs = parse_documents(docs_in, docs_path.string());
  auto groups = parse_groups(groups_in, groups_path.string());
  return Corpus::build(std::move(docs), std::move(groups), vocab);
}

std::vector<TokenId> tokenize_fallback(std::string_view text) {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (char ch : text) {
    out.push_back(static_cast<TokenId>(static_cast<unsigned char>(ch)) + kFallbackTokenOffset);
  }
  return out;
}

std::string detokenize_fallback(std::span<const TokenId> tokens) {
  std::string out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t < kFallbackTokenOffset || t >= kFallbackTokenOffset + 256) {
      throw DataError("token " + std::to_string(t) + " is not a byte token");
    }
    out.push_back(static_cast<char>(static_cast<unsigned char>(t - kFallbackTokenOffset)));
  }
  return out;
}

}  // namespace docpack
