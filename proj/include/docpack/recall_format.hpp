#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace docpack {

// Layout of a structured recall generation.
//
// kMarkdown:
//   # Evidence:
//   ## <title>
//   <content>
//
//   # Answer:
//   <answer>
//
// kInline:
//   Recalled Article 1: <title>
//   <content>
//   Answer: <answer>
enum class RecallTemplate { kMarkdown, kInline };

RecallTemplate parse_recall_template(std::string_view text);
std::string to_string(RecallTemplate tmpl);

struct RecalledArticle {
  std::string title;
  std::string content;

  friend bool operator==(const RecalledArticle&,
                         const RecalledArticle&) = default;
};

struct RecallGeneration {
  std::vector<RecalledArticle> articles;
  std::string answer;

  friend bool operator==(const RecallGeneration&,
                         const RecallGeneration&) = default;
};

struct ParsedGeneration {
  RecallGeneration generation;
  std::vector<std::string> warnings;
};

std::string render_generation(const RecallGeneration& generation,
                              RecallTemplate tmpl);

// Throws DataError when the answer block is missing or empty. A generation
// without article blocks parses with a warning.
ParsedGeneration parse_generation(std::string_view text, RecallTemplate tmpl);

// Instruction preamble plus question, as used for SFT prompts.
std::string render_question_prompt(std::string_view question,
                                   RecallTemplate tmpl);

}  // namespace docpack
