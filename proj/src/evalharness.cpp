#include "docpack/evalharness.hpp"

#include <algorithm>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "docpack/error.hpp"

namespace docpack {

std::string normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc_cf = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status)) throw Error(std::string("ICU normalizer unavailable: ") + u_errorName(status));

  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString folded = nfkc_cf->normalize(src, status);
  if (U_FAILURE(status)) throw Error(std::string("ICU normalization failed: ") + u_errorName(status));

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < folded.length();) {
    const UChar32 cp = folded.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) collapsed.append(static_cast<UChar>(u' '));
    pending_space = false;
    collapsed.append(cp);
  }
  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
  titles_recalled += o.titles_recalled;
  titles_matched += o.titles_matched;
  contents_mismatched += o.contents_mismatched;
  questions += o.questions;
  judged_questions += o.judged_questions;
  judged_yes += o.judged_yes;
  unparseable_verdicts += o.unparseable_verdicts;
  titles_other_document += o.titles_other_document;
  titles_not_in_corpus += o.titles_not_in_corpus;
  return *this;
}

EvalScores EvalScores::from_counts(const EvalCounts& c) {
  auto pct = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  EvalScores s;
  s.counts = c;
  s.precision = pct(c.titles_matched, c.titles_recalled);
  s.hallucination_rate = pct(c.contents_mismatched, c.titles_matched);
  s.accuracy = pct(c.judged_yes, c.judged_questions);
  return s;
}

GroundTruth::GroundTruth(const DocumentGroup& group, const Corpus& corpus) {
  for (const auto& id : group.relevant_ids) {
    const Document& doc = corpus.document(id);
    if (!doc.raw_text) {
      throw DataError("question \"" + group.question_id + "\": relevant document \"" + id +
                      "\" has no text to compare against");
    }
    titles_.push_back(normalize(doc.title));
    contents_.push_back(normalize(*doc.raw_text));
  }
}

bool GroundTruth::has_title(const std::string& norm_title) const {
  return std::find(titles_.begin(), titles_.end(), norm_title) != titles_.end();
}

bool GroundTruth::content_matches(const std::string& norm_title,
                                  const std::string& norm_content) const {
  for (std::size_t i = 0; i < titles_.size(); ++i) {
    if (titles_[i] == norm_title && contents_[i] == norm_content) return true;
  }
  return false;
}

TitleIndex::TitleIndex(const Corpus& corpus) {
  titles_.reserve(corpus.num_documents());
  for (const auto& id : corpus.document_ids()) titles_.push_back(normalize(corpus.document(id).title));
  std::sort(titles_.begin(), titles_.end());
  titles_.erase(std::unique(titles_.begin(), titles_.end()), titles_.end());
}

bool TitleIndex::contains(const std::string& norm_title) const {
  return std::binary_search(titles_.begin(), titles_.end(), norm_title);
}

EvalScores score_one(const RecallGeneration& generation, const DocumentGroup& truth,
                     const Corpus& corpus, std::optional<Verdict> verdict,
                     const TitleIndex* titles) {
  const GroundTruth gt(truth, corpus);
  std::optional<TitleIndex> local_index;
  if (titles == nullptr) titles = &local_index.emplace(corpus);

  EvalCounts c;
  c.questions = 1;
  std::vector<std::string> seen;
  for (const auto& article : generation.articles) {
    std::string title = normalize(article.title);
    if (std::find(seen.begin(), seen.end(), title) != seen.end()) continue;
    ++c.titles_recalled;
    if (gt.has_title(title)) {
      ++c.titles_matched;
      if (!gt.content_matches(title, normalize(article.content))) ++c.contents_mismatched;
    } else if (titles->contains(title)) {
      ++c.titles_other_document;
    } else {
      ++c.titles_not_in_corpus;
    }
    seen.push_back(std::move(title));
  }

  if (verdict) {
    switch (*verdict) {
      case Verdict::kYes:
        ++c.judged_questions;
        ++c.judged_yes;
        break;
      case Verdict::kNo:
        ++c.judged_questions;
        break;
      case Verdict::kUnparseable:
        ++c.unparseable_verdicts;
        break;
    }
  }
  return EvalScores::from_counts(c);
}

EvalScores aggregate(std::span<const EvalScores> scores) {
  if (scores.empty()) throw DataError("aggregate: no scores");
  EvalCounts total;
  for (const auto& s : scores) total += s.counts;
  return EvalScores::from_counts(total);
}

}  // namespace docpack
