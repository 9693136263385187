#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "docpack/packer.hpp"

namespace docpack {

// Canonical form: one JSON record per line,
//   {"tokens":[..],"segment_ids":[..],"doc_ids":[..],"truncated":b,"sep_positions":[..]}
void write_sequences_jsonl(std::ostream& out,
                           const std::vector<PackedSequence>& sequences);

// Throws DataError naming the 0-based record index on schema violations.
std::vector<PackedSequence> read_sequences_jsonl(std::istream& in);
std::vector<PackedSequence> read_sequences_jsonl(
    const std::filesystem::path& path);

struct Manifest {
  std::string strategy;
  std::string mode;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::size_t batch_size = 0;
  std::vector<std::vector<std::size_t>> batches;
};

Manifest manifest_of(const EpochPlan& plan);
// {"strategy":..,"mode":..,"seed":..,"epoch":..,"batch_size":..,"batches":[[..]]}
std::string manifest_json(const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

// Compact form: <stem>.bin holds, per sequence, its tokens as little-endian
// uint32 followed by its segment ids as little-endian int32; <stem>.idx.json
// lists byte offsets and the per-sequence metadata. See docs/FORMATS.md.
void write_compact(const std::filesystem::path& bin_path,
                   const std::filesystem::path& index_path,
                   const std::vector<PackedSequence>& sequences);
std::vector<PackedSequence> read_compact(
    const std::filesystem::path& bin_path,
    const std::filesystem::path& index_path);

// File names used by `docpack pack` for one epoch.
std::string epoch_stem(std::uint64_t epoch);

}  // namespace docpack
