#include "docpack/packer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>

#include "docpack/error.hpp"

namespace docpack {

PackingStrategy PackingStrategy::no_packing() { return {Kind::kNoPacking, {1}}; }

PackingStrategy PackingStrategy::fixed(int docs_per_sequence) {
  if (docs_per_sequence < 1) {
    throw ConfigError("pack size must be at least 1, got " + std::to_string(docs_per_sequence));
  }
  return {Kind::kFixed, {docs_per_sequence}};
}

PackingStrategy PackingStrategy::multi(std::vector<int> choices) {
  if (choices.empty()) throw ConfigError("multi-packing needs at least one choice");
  for (int c : choices) {
    if (c < 1) throw ConfigError("multi-packing choices must be at least 1, got " + std::to_string(c));
  }
  std::sort(choices.begin(), choices.end());
  choices.erase(std::unique(choices.begin(), choices.end()), choices.end());
  return {Kind::kMulti, std::move(choices)};
}

PackingStrategy PackingStrategy::fill() { return {Kind::kFill, {}}; }

PackingStrategy PackingStrategy::parse(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "none" || s == "no-packing" || s == "nopack") return no_packing();
  if (s == "fill") return fill();
  constexpr std::string_view kPrefix = "pack-";
  if (s.starts_with(kPrefix)) {
    std::vector<int> counts;
    std::string_view rest = std::string_view(s).substr(kPrefix.size());
    while (true) {
      const auto dash = rest.find('-');
      const auto part = rest.substr(0, dash);
      int value = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
      if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
        throw ConfigError("bad packing strategy \"" + std::string(text) + "\"");
      }
      counts.push_back(value);
      if (dash == std::string_view::npos) break;
      rest = rest.substr(dash + 1);
    }
    if (counts.size() == 1) return fixed(counts.front());
    return multi(std::move(counts));
  }
  throw ConfigError("unknown packing strategy \"" + std::string(text) +
                    "\" (expected none, pack-X, pack-A-B-..., fill)");
}

std::string PackingStrategy::to_string() const {
  switch (kind_) {
    case Kind::kNoPacking: return "none";
    case Kind::kFill: return "fill";
    case Kind::kFixed:
    case Kind::kMulti: {
      std::string out = "pack";
      for (int c : choices_) out += "-" + std::to_string(c);
      return out;
    }
  }
  return "?";
}

int PackingStrategy::docs_per_sequence() const {
  switch (kind_) {
    case Kind::kNoPacking: return 1;
    case Kind::kFixed: return choices_.front();
    default: return 0;
  }
}

EpochMode parse_epoch_mode(std::string_view text) {
  if (text == "repack") return EpochMode::kRepackEveryEpoch;
  if (text == "no-repack") return EpochMode::kNoRepack;
  if (text == "no-repack-reshuffle") return EpochMode::kNoRepackReshuffleOrder;
  throw ConfigError("unknown epoch mode \"" + std::string(text) +
                    "\" (expected repack, no-repack, no-repack-reshuffle)");
}

std::string to_string(EpochMode mode) {
  switch (mode) {
    case EpochMode::kRepackEveryEpoch: return "repack";
    case EpochMode::kNoRepack: return "no-repack";
    case EpochMode::kNoRepackReshuffleOrder: return "no-repack-reshuffle";
  }
  return "?";
}

std::size_t PackedSequence::content_length() const {
  std::size_t n = segment_ids.size();
  while (n > 0 && segment_ids[n - 1] == kPadSegment) --n;
  return n;
}

std::vector<IdTuple> pack_group(std::span<const std::string> doc_ids,
                                const PackingStrategy& strategy, Rng& rng) {
  if (doc_ids.empty()) throw DataError("cannot pack an empty document list");
  if (strategy.kind() == PackingStrategy::Kind::kFill) {
    throw ConfigError("fill packing needs document lengths; use fill_group");
  }
  IdTuple order(doc_ids.begin(), doc_ids.end());
  rng.shuffle(std::span<std::string>(order));

  std::vector<IdTuple> tuples;
  std::size_t at = 0;
  while (at < order.size()) {
    std::size_t size = 0;
    if (strategy.kind() == PackingStrategy::Kind::kMulti) {
      const auto choices = strategy.choices();
      size = static_cast<std::size_t>(choices[rng.uniform_below(choices.size())]);
    } else {
      size = static_cast<std::size_t>(strategy.docs_per_sequence());
    }
    size = std::min(size, order.size() - at);
    tuples.emplace_back(std::make_move_iterator(order.begin() + at),
                        std::make_move_iterator(order.begin() + at + size));
    at += size;
  }
  return tuples;
}

std::vector<IdTuple> fill_group(std::span<const std::string> doc_ids,
                                const Corpus& corpus, const VocabConfig& vocab,
                                Rng& rng) {
  if (doc_ids.empty()) throw DataError("cannot pack an empty document list");
  IdTuple order(doc_ids.begin(), doc_ids.end());
  rng.shuffle(std::span<std::string>(order));

  const std::size_t window = vocab.context_window;
  std::vector<IdTuple> tuples;
  std::size_t used = 0;
  for (auto& id : order) {
    const std::size_t len = std::min(corpus.document(id).tokens.size(), window);
    if (!tuples.empty() && used + 1 + len <= window) {
      tuples.back().push_back(std::move(id));
      used += 1 + len;
    } else {
      tuples.push_back({std::move(id)});
      used = len;
    }
  }
  return tuples;
}

Materialized materialize(std::span<const std::string> ids, const Corpus& corpus,
                         const VocabConfig& vocab) {
  if (ids.empty()) throw DataError("cannot materialize an empty tuple");
  const std::size_t window = vocab.context_window;
  Materialized m;
  auto& seq = m.sequence;
  seq.tokens.reserve(window);
  seq.segment_ids.reserve(window);

  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Document& doc = corpus.document(ids[k]);
    const auto segment = static_cast<std::int32_t>(k);
    if (k > 0) {
      // The next document would begin at or past the window end.
      if (seq.tokens.size() + 1 >= window) {
        m.overflow.assign(ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end());
        break;
      }
      seq.sep_positions.push_back(static_cast<std::uint32_t>(seq.tokens.size()));
      seq.tokens.push_back(vocab.sep_id);
      seq.segment_ids.push_back(segment - 1);
    }
    const std::size_t room = window - seq.tokens.size();
    const std::size_t take = std::min(room, doc.tokens.size());
    seq.tokens.insert(seq.tokens.end(), doc.tokens.begin(),
                      doc.tokens.begin() + static_cast<std::ptrdiff_t>(take));
    seq.segment_ids.insert(seq.segment_ids.end(), take, segment);
    seq.doc_ids.push_back(doc.id);
    if (take < doc.tokens.size()) {
      seq.truncated = true;
      if (k == 0) {
        m.warning = "document \"" + doc.id + "\" has " + std::to_string(doc.tokens.size()) +
                    " tokens, more than the context window of " + std::to_string(window) +
                    "; hard-truncated";
      }
      m.overflow.assign(ids.begin() + static_cast<std::ptrdiff_t>(k) + 1, ids.end());
      break;
    }
  }
  seq.segment_ids.resize(window, kPadSegment);
  seq.tokens.resize(window, vocab.pad_id);
  return m;
}

std::vector<IdTuple> epoch_tuples(const Corpus& corpus, const DocumentGroup& group,
                                  const PackingStrategy& strategy, EpochMode mode,
                                  std::uint64_t epoch_index, std::uint64_t seed,
                                  const VocabConfig& vocab) {
  const std::uint64_t pack_epoch = mode == EpochMode::kRepackEveryEpoch ? epoch_index : 0;
  Rng rng = derive_stream(seed, pack_epoch, group.question_id, "pack");
  auto tuples = strategy.kind() == PackingStrategy::Kind::kFill
                    ? fill_group(group.doc_ids, corpus, vocab, rng)
                    : pack_group(group.doc_ids, strategy, rng);
  if (mode == EpochMode::kNoRepackReshuffleOrder && epoch_index != 0) {
    Rng order_rng = derive_stream(seed, epoch_index, group.question_id, "order");
    for (auto& t : tuples) order_rng.shuffle(std::span<std::string>(t));
  }
  return tuples;
}

EpochPlan plan_epoch(const Corpus& corpus, const PackingStrategy& strategy,
                     EpochMode mode, std::uint64_t epoch_index, std::uint64_t seed,
                     std::size_t batch_size, const VocabConfig& vocab) {
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  vocab.validate();

  EpochPlan plan;
  plan.epoch_index = epoch_index;
  plan.strategy = strategy;
  plan.mode = mode;
  plan.seed = seed;
  plan.batch_size = batch_size;

  const auto groups = corpus.groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (auto& tuple : epoch_tuples(corpus, groups[gi], strategy, mode, epoch_index, seed, vocab)) {
      IdTuple pending = std::move(tuple);
      while (!pending.empty()) {
        Materialized m = materialize(pending, corpus, vocab);
        if (!m.warning.empty()) plan.warnings.push_back(std::move(m.warning));
        plan.sequences.push_back(std::move(m.sequence));
        plan.sequence_group.push_back(gi);
        pending = std::move(m.overflow);
      }
    }
  }

  std::vector<std::size_t> order(plan.sequences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng batch_rng = derive_stream(seed, epoch_index, "", "batch");
  batch_rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t at = 0; at < order.size(); at += batch_size) {
    const std::size_t end = std::min(order.size(), at + batch_size);
    plan.batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                              order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

SftExample build_sft_example(const DocumentGroup& group, const Corpus& corpus,
                             RecallTemplate tmpl) {
  const std::string where = "group \"" + group.question_id + "\"";
  if (group.relevant_ids.empty()) throw DataError(where + " has no relevant documents");
  if (group.question.empty()) throw DataError(where + " has no question text");

  RecallGeneration target;
  target.answer = group.answer;
  for (const auto& id : group.relevant_ids) {
    const Document& doc = corpus.document(id);
    if (!doc.raw_text) {
      throw DataError(where + ": relevant document \"" + id + "\" has no text");
    }
    target.articles.push_back({doc.title, *doc.raw_text});
  }

  SftExample ex;
  ex.prompt_text = render_question_prompt(group.question, tmpl);
  ex.target_text = render_generation(target, tmpl);
  ex.prompt_tokens = tokenize_fallback(ex.prompt_text);
  ex.target_tokens = tokenize_fallback(ex.target_text);
  ex.loss_mask.assign(ex.prompt_tokens.size(), false);
  ex.loss_mask.resize(ex.prompt_tokens.size() + ex.target_tokens.size(), true);
  return ex;
}

}  // namespace docpack
