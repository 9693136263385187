#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace docpack {

using TokenId = std::uint32_t;

struct VocabConfig {
  TokenId sep_id = 1;
  TokenId pad_id = 0;
  std::size_t context_window = 512;

  // Throws ConfigError when sep_id == pad_id or context_window < 2.
  void validate() const;
};

struct Document {
  std::string id;
  std::string title;
  std::vector<TokenId> tokens;
  std::optional<std::string> raw_text;
};

// The per-question list of associated documents (relevant + distractors).
struct DocumentGroup {
  std::string question_id;
  std::vector<std::string> doc_ids;
  std::vector<std::string> relevant_ids;
  std::string answer;
  // Question text; needed for SFT prompts and judging, optional for packing.
  std::string question;
};

// Immutable after construction. All referential invariants are checked by
// Corpus::build, so a Corpus value is always consistent.
class Corpus {
 public:
  // Throws DataError on duplicate ids, empty or reserved tokens, and dangling
  // references from groups.
  static Corpus build(std::vector<Document> documents,
                      std::vector<DocumentGroup> groups,
                      const VocabConfig& vocab);

  const Document& document(std::string_view id) const;
  const Document* find(std::string_view id) const;

  std::span<const DocumentGroup> groups() const { return groups_; }
  const DocumentGroup* find_group(std::string_view question_id) const;

  std::size_t num_documents() const { return order_.size(); }
  // Document ids in file order.
  std::span<const std::string> document_ids() const { return order_; }

 private:
  std::unordered_map<std::string, Document> documents_;
  std::vector<std::string> order_;
  std::vector<DocumentGroup> groups_;
  std::unordered_map<std::string, std::size_t> group_index_;
};

// Line-delimited record readers. Errors carry "<source>:<line>: ...".
std::vector<Document> parse_documents(std::istream& in,
                                      std::string_view source = "docs");
std::vector<DocumentGroup> parse_groups(std::istream& in,
                                        std::string_view source = "groups");

Corpus load_corpus(const std::filesystem::path& docs_path,
                   const std::filesystem::path& groups_path,
                   const VocabConfig& vocab);

// Byte-level tokenizer used by tests and fixtures. Token = byte + offset, so
// ids below the offset stay free for PAD/SEP and friends.
inline constexpr TokenId kFallbackTokenOffset = 4;

std::vector<TokenId> tokenize_fallback(std::string_view text);
// Throws DataError for ids outside the byte range.
std::string detokenize_fallback(std::span<const TokenId> tokens);

}  // namespace docpack
