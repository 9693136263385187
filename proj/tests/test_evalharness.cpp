#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "docpack/error.hpp"
#include "docpack/evalharness.hpp"
#include "test_support.hpp"

namespace docpack {
namespace {

using testing::fixture_path;

class Worked : public ::testing::Test {
 protected:
  Corpus corpus = load_corpus(fixture_path("worked_docs.jsonl"),
                              fixture_path("worked_groups.jsonl"), VocabConfig{});

  RecallGeneration generation(std::size_t line) {
    std::istringstream in(testing::read_file(fixture_path("worked_generations.jsonl")));
    std::string rec;
    for (std::size_t i = 0; i <= line; ++i) std::getline(in, rec);
    const auto text = nlohmann::json::parse(rec).at("text").get<std::string>();
    return parse_generation(text, RecallTemplate::kMarkdown).generation;
  }
};

TEST_F(Worked, HotpotExample) {
  const auto s = score_one(generation(0), *corpus.find_group("hotpot-fear-reaper"), corpus,
                           Verdict::kYes);
  // One of two recalled titles is relevant; its content differs.
  EXPECT_EQ(s.counts.titles_recalled, 2u);
  EXPECT_EQ(s.counts.titles_matched, 1u);
  EXPECT_EQ(s.counts.contents_mismatched, 1u);
  EXPECT_DOUBLE_EQ(*s.precision, 50.0);
  EXPECT_DOUBLE_EQ(*s.hallucination_rate, 100.0);
  EXPECT_DOUBLE_EQ(*s.accuracy, 100.0);
  // The stray title belongs to a distractor in the same corpus.
  EXPECT_EQ(s.counts.titles_other_document, 1u);
  EXPECT_EQ(s.counts.titles_not_in_corpus, 0u);
}

TEST_F(Worked, TwoWikiExampleFollowsTheDefinition) {
  const auto s = score_one(generation(1), *corpus.find_group("2wiki-dallas-362"), corpus,
                           Verdict::kYes);
  // Four titles recalled and matched; only the Scott Caan text differs.
  EXPECT_DOUBLE_EQ(*s.precision, 100.0);
  EXPECT_DOUBLE_EQ(*s.hallucination_rate, 25.0);
  EXPECT_DOUBLE_EQ(*s.accuracy, 100.0);
}

TEST_F(Worked, AggregateIsMicroAveraged) {
  const std::vector<EvalScores> all{
      score_one(generation(0), *corpus.find_group("hotpot-fear-reaper"), corpus, Verdict::kYes),
      score_one(generation(1), *corpus.find_group("2wiki-dallas-362"), corpus, Verdict::kNo)};
  const auto s = aggregate(all);
  EXPECT_DOUBLE_EQ(*s.precision, 100.0 * 5 / 6);
  EXPECT_DOUBLE_EQ(*s.hallucination_rate, 100.0 * 2 / 5);
  EXPECT_DOUBLE_EQ(*s.accuracy, 50.0);
  EXPECT_THROW(aggregate(std::span<const EvalScores>{}), DataError);
}

TEST_F(Worked, VerdictHandling) {
  const auto& g = *corpus.find_group("hotpot-fear-reaper");
  const auto unparseable = score_one(generation(0), g, corpus, Verdict::kUnparseable);
  EXPECT_FALSE(unparseable.accuracy.has_value());
  EXPECT_EQ(unparseable.counts.unparseable_verdicts, 1u);
  EXPECT_FALSE(score_one(generation(0), g, corpus, std::nullopt).accuracy.has_value());
}

TEST_F(Worked, DuplicateTitlesCountOnce) {
  RecallGeneration gen{{{"Dallas 362", "x"}, {"  dallas   362 ", "y"}, {"Nowhere", "z"}}, "a"};
  const auto s = score_one(gen, *corpus.find_group("2wiki-dallas-362"), corpus, std::nullopt);
  EXPECT_EQ(s.counts.titles_recalled, 2u);
  EXPECT_EQ(s.counts.titles_matched, 1u);
  EXPECT_EQ(s.counts.titles_not_in_corpus, 1u);
}

TEST_F(Worked, EmptyRecallLeavesPrecisionUndefined) {
  const auto s = score_one({{}, "a"}, *corpus.find_group("2wiki-dallas-362"), corpus, Verdict::kYes);
  EXPECT_FALSE(s.precision.has_value());
  EXPECT_FALSE(s.hallucination_rate.has_value());
  EXPECT_DOUBLE_EQ(*s.accuracy, 100.0);
}

TEST(Normalize, CaseWidthAndWhitespace) {
  EXPECT_EQ(normalize("  Gotham\t(Season 4) \n"), "gotham (season 4)");
  EXPECT_EQ(normalize("\xEF\xBC\xA1\xEF\xBC\xA2"), "ab");  // fullwidth letters
  EXPECT_EQ(normalize("Stra\xC3\x9F" "e"), "strasse");
  EXPECT_EQ(normalize("season, and"), "season, and");  // punctuation kept
  EXPECT_NE(normalize("season and"), normalize("season, and"));
}

}  // namespace
}  // namespace docpack
