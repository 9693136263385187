#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "docpack/corpus.hpp"
#include "docpack/recall_format.hpp"

namespace docpack {

// NFKC with case folding, whitespace runs collapsed to one space, trimmed.
// Punctuation is kept.
std::string normalize(std::string_view text);

enum class Verdict { kYes, kNo, kUnparseable };

struct EvalCounts {
  std::size_t titles_recalled = 0;    // unique after normalization
  std::size_t titles_matched = 0;
  std::size_t contents_mismatched = 0;
  std::size_t questions = 0;
  std::size_t judged_questions = 0;
  std::size_t judged_yes = 0;
  std::size_t unparseable_verdicts = 0;
  // Unmatched titles split by whether some corpus document carries them.
  std::size_t titles_other_document = 0;
  std::size_t titles_not_in_corpus = 0;

  EvalCounts& operator+=(const EvalCounts& other);
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

// Percentages; each is absent when its denominator is zero.
struct EvalScores {
  std::optional<double> precision;
  std::optional<double> hallucination_rate;
  std::optional<double> accuracy;
  EvalCounts counts;

  static EvalScores from_counts(const EvalCounts& counts);
};

// Normalized ground-truth titles and texts for one question.
class GroundTruth {
 public:
  // Throws DataError when a relevant document lacks raw text.
  GroundTruth(const DocumentGroup& group, const Corpus& corpus);

  std::span<const std::string> titles() const { return titles_; }
  // True when some relevant document with this title has this text.
  bool content_matches(const std::string& norm_title,
                       const std::string& norm_content) const;
  bool has_title(const std::string& norm_title) const;

 private:
  std::vector<std::string> titles_;
  std::vector<std::string> contents_;
};

// Normalized titles of every corpus document, for the unmatched-title
// breakdown. Build once and share across questions.
class TitleIndex {
 public:
  explicit TitleIndex(const Corpus& corpus);
  bool contains(const std::string& norm_title) const;

 private:
  std::vector<std::string> titles_;
};

EvalScores score_one(const RecallGeneration& generation,
                     const DocumentGroup& truth, const Corpus& corpus,
                     std::optional<Verdict> verdict,
                     const TitleIndex* titles = nullptr);

// Micro-averaged over pooled counts. Throws DataError on an empty list.
EvalScores aggregate(std::span<const EvalScores> scores);

}  // namespace docpack
