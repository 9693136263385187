#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docpack/corpus.hpp"
#include "docpack/recall_format.hpp"
#include "docpack/rng.hpp"

namespace docpack {

// How many documents go into one training sequence.
//
//   none          one document per sequence
//   pack-X        X documents per sequence (pack-1 behaves exactly like none)
//   pack-A-B-...  per sequence, a count drawn uniformly from {A, B, ...}
//   fill          greedy: add whole documents while they fit in the window
class PackingStrategy {
 public:
  enum class Kind { kNoPacking, kFixed, kMulti, kFill };

  static PackingStrategy no_packing();
  static PackingStrategy fixed(int docs_per_sequence);
  static PackingStrategy multi(std::vector<int> choices);
  static PackingStrategy fill();

  // Accepts the textual forms above. Throws ConfigError.
  static PackingStrategy parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  // Fixed: the count. NoPacking: 1. Others: 0.
  int docs_per_sequence() const;
  // Multi only; sorted, unique.
  std::span<const int> choices() const { return choices_; }

  friend bool operator==(const PackingStrategy&,
                         const PackingStrategy&) = default;

 private:
  PackingStrategy(Kind kind, std::vector<int> choices)
      : kind_(kind), choices_(std::move(choices)) {}

  Kind kind_;
  std::vector<int> choices_;  // Fixed stores its single count here.
};

enum class EpochMode { kRepackEveryEpoch, kNoRepack, kNoRepackReshuffleOrder };

EpochMode parse_epoch_mode(std::string_view text);
std::string to_string(EpochMode mode);

// Segment id of PAD positions.
inline constexpr std::int32_t kPadSegment = -1;

struct PackedSequence {
  std::vector<TokenId> tokens;
  // 0-based document index within the sequence; SEP takes the index of the
  // document it terminates; PAD is kPadSegment.
  std::vector<std::int32_t> segment_ids;
  std::vector<std::string> doc_ids;
  bool truncated = false;
  std::vector<std::uint32_t> sep_positions;

  // Number of leading non-PAD positions.
  std::size_t content_length() const;

  friend bool operator==(const PackedSequence&,
                         const PackedSequence&) = default;
};

using IdTuple = std::vector<std::string>;

// Splits one group's documents into ordered tuples according to the
// strategy. Assignment and within-tuple order are uniformly random under rng.
// Fill needs document lengths; use fill_group for it. Throws DataError on an
// empty list and ConfigError for Fill.
std::vector<IdTuple> pack_group(std::span<const std::string> doc_ids,
                                const PackingStrategy& strategy, Rng& rng);

// Greedy window fill over a random order: a document joins the current tuple
// only when it fits whole (with its SEP); otherwise it starts a new tuple.
std::vector<IdTuple> fill_group(std::span<const std::string> doc_ids,
                                const Corpus& corpus, const VocabConfig& vocab,
                                Rng& rng);

struct Materialized {
  PackedSequence sequence;
  // Documents that would start at or past the window end. The caller packs
  // them as a new tuple.
  IdTuple overflow;
  // Set when a lone document exceeds the window and was hard-truncated.
  std::string warning;
};

Materialized materialize(std::span<const std::string> ids,
                         const Corpus& corpus, const VocabConfig& vocab);

struct EpochPlan {
  std::uint64_t epoch_index = 0;
  PackingStrategy strategy = PackingStrategy::no_packing();
  EpochMode mode = EpochMode::kRepackEveryEpoch;
  std::uint64_t seed = 0;
  std::size_t batch_size = 1;
  std::vector<PackedSequence> sequences;
  // Index into corpus.groups() for each sequence.
  std::vector<std::size_t> sequence_group;
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::string> warnings;
};

// Packs every group, pools the sequences and draws batches without
// replacement. The last batch may be short.
EpochPlan plan_epoch(const Corpus& corpus, const PackingStrategy& strategy,
                     EpochMode mode, std::uint64_t epoch_index,
                     std::uint64_t seed, std::size_t batch_size,
                     const VocabConfig& vocab);

// Tuples a group is packed into for an epoch, before materialization.
std::vector<IdTuple> epoch_tuples(const Corpus& corpus,
                                  const DocumentGroup& group,
                                  const PackingStrategy& strategy,
                                  EpochMode mode, std::uint64_t epoch_index,
                                  std::uint64_t seed, const VocabConfig& vocab);

struct SftExample {
  std::string prompt_text;
  std::string target_text;
  std::vector<TokenId> prompt_tokens;
  std::vector<TokenId> target_tokens;
  // Over prompt followed by target; true exactly on target positions.
  std::vector<bool> loss_mask;
};

// Prompt is the instruction preamble plus question; target lists every
// relevant article (title and text) followed by the answer. Tokens come from
// the byte-level fallback tokenizer. Throws DataError when the group has no
// relevant documents or one lacks raw text.
SftExample build_sft_example(const DocumentGroup& group, const Corpus& corpus,
                             RecallTemplate tmpl = RecallTemplate::kMarkdown);

}  // namespace docpack
