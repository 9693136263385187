#include "docpack/recall_format.hpp"

#include <cctype>
#include <optional>

#include "docpack/error.hpp"

namespace docpack {

namespace {

constexpr std::string_view kInstruction =
    "Below is a question. Your task is to read the question, recall the "
    "necessary information, and provide a concise answer. Please ensure your "
    "answer is based only on the recalled information.";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t at = 0;
  while (at <= text.size()) {
    auto nl = text.find('\n', at);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(at, nl - at);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    at = nl + 1;
  }
  return lines;
}

// "<word>" optionally followed by ':' and then the rest of the line, after
// `hashes` leading '#' characters. Returns the remainder on a match.
std::optional<std::string_view> match_header(std::string_view line, int hashes,
                                             std::string_view word) {
  std::string_view s = line;
  for (int i = 0; i < hashes; ++i) {
    if (s.empty() || s.front() != '#') return std::nullopt;
    s.remove_prefix(1);
  }
  if (hashes > 0 && !s.empty() && s.front() == '#') return std::nullopt;
  s = trim(s);
  if (!iequals_prefix(s, word)) return std::nullopt;
  s.remove_prefix(word.size());
  if (!s.empty() && s.front() != ':' && !std::isspace(static_cast<unsigned char>(s.front()))) {
    return std::nullopt;
  }
  if (!s.empty() && s.front() == ':') s.remove_prefix(1);
  return trim(s);
}

// "Recalled Article <n>:" prefix; returns the remainder (the title).
std::optional<std::string_view> match_inline_article(std::string_view line) {
  constexpr std::string_view kWord = "recalled article";
  std::string_view s = trim(line);
  if (!iequals_prefix(s, kWord)) return std::nullopt;
  s.remove_prefix(kWord.size());
  s = trim(s);
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits == 0) return std::nullopt;
  s.remove_prefix(digits);
  if (s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  return trim(s);
}

std::string join_trimmed(const std::vector<std::string_view>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return std::string(trim(out));
}

struct Builder {
  ParsedGeneration result;
  std::optional<RecalledArticle> current;
  std::vector<std::string_view> content;
  std::vector<std::string_view> answer;
  bool in_answer = false;

  void close_article() {
    if (current) {
      current->content = join_trimmed(content);
      result.generation.articles.push_back(std::move(*current));
    }
    current.reset();
    content.clear();
  }
  void open_article(std::string_view title) {
    close_article();
    current = RecalledArticle{std::string(title), {}};
  }
  void open_answer(std::string_view first) {
    close_article();
    in_answer = true;
    if (!first.empty()) answer.push_back(first);
  }
  void line(std::string_view l) {
    if (in_answer) {
      answer.push_back(l);
    } else if (current) {
      // An empty inline title line takes the first non-blank line as title.
      if (current->title.empty() && content.empty() && !trim(l).empty()) {
        current->title = std::string(trim(l));
      } else {
        content.push_back(l);
      }
    }
  }
  ParsedGeneration finish() {
    close_article();
    if (!in_answer) throw DataError("generation has no answer block");
    result.generation.answer = join_trimmed(answer);
    if (result.generation.answer.empty()) throw DataError("generation has an empty answer");
    if (result.generation.articles.empty()) {
      result.warnings.push_back("generation has no article blocks");
    }
    return std::move(result);
  }
};

}  // namespace

RecallTemplate parse_recall_template(std::string_view text) {
  if (text == "markdown") return RecallTemplate::kMarkdown;
  if (text == "inline") return RecallTemplate::kInline;
  throw ConfigError("unknown template \"" + std::string(text) + "\" (expected markdown or inline)");
}

std::string to_string(RecallTemplate tmpl) {
  return tmpl == RecallTemplate::kMarkdown ? "markdown" : "inline";
}

std::string render_generation(const RecallGeneration& gen, RecallTemplate tmpl) {
  std::string out;
  if (tmpl == RecallTemplate::kMarkdown) {
    out += "# Evidence:\n";
    for (const auto& a : gen.articles) {
      out += "## " + a.title + "\n" + a.content + "\n\n";
    }
    out += "# Answer:\n" + gen.answer + "\n";
  } else {
    for (std::size_t i = 0; i < gen.articles.size(); ++i) {
      out += "Recalled Article " + std::to_string(i + 1) + ": " + gen.articles[i].title + "\n";
      out += gen.articles[i].content + "\n";
    }
    out += "Answer: " + gen.answer + "\n";
  }
  return out;
}

ParsedGeneration parse_generation(std::string_view text, RecallTemplate tmpl) {
  Builder b;
  for (std::string_view line : split_lines(text)) {
    if (tmpl == RecallTemplate::kMarkdown) {
      if (b.in_answer) {
        b.line(line);
      } else if (match_header(line, 1, "evidence")) {
        b.close_article();
      } else if (auto rest = match_header(line, 1, "answer")) {
        b.open_answer(*rest);
      } else if (line.starts_with("##") && !line.starts_with("###")) {
        b.open_article(trim(line.substr(2)));
      } else {
        b.line(line);
      }
    } else {
      if (b.in_answer) {
        b.line(line);
      } else if (auto title = match_inline_article(line)) {
        b.open_article(*title);
      } else if (iequals_prefix(trim(line), "answer:")) {
        b.open_answer(trim(trim(line).substr(7)));
      } else {
        b.line(line);
      }
    }
  }
  return b.finish();
}

std::string render_question_prompt(std::string_view question, RecallTemplate tmpl) {
  std::string out(kInstruction);
  out += tmpl == RecallTemplate::kMarkdown ? "\n\n# Question:\n" : "\n\nQuestion: ";
  out += question;
  out += "\n";
  return out;
}

}  // namespace docpack
