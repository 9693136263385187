#include "docpack/packed_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "docpack/error.hpp"

namespace docpack {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

ojson metadata_json(const PackedSequence& seq) {
  ojson rec;
  rec["doc_ids"] = seq.doc_ids;
  rec["truncated"] = seq.truncated;
  rec["sep_positions"] = seq.sep_positions;
  return rec;
}

[[noreturn]] void bad_record(std::size_t index, const std::string& what) {
  throw DataError("packed record " + std::to_string(index) + ": " + what);
}

void read_metadata(const json& rec, std::size_t index, PackedSequence& seq) {
  try {
    seq.doc_ids = rec.at("doc_ids").get<std::vector<std::string>>();
    seq.truncated = rec.at("truncated").get<bool>();
    seq.sep_positions = rec.at("sep_positions").get<std::vector<std::uint32_t>>();
  } catch (const json::exception& e) {
    bad_record(index, e.what());
  }
}

void check_sequence(const PackedSequence& seq, std::size_t index) {
  if (seq.tokens.size() != seq.segment_ids.size()) {
    bad_record(index, "segment_ids has " + std::to_string(seq.segment_ids.size()) +
                          " entries for " + std::to_string(seq.tokens.size()) + " tokens");
  }
  for (auto s : seq.segment_ids) {
    if (s < kPadSegment) bad_record(index, "segment id below -1");
  }
  for (auto p : seq.sep_positions) {
    if (p >= seq.tokens.size()) bad_record(index, "sep position out of range");
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> le{static_cast<char>(v), static_cast<char>(v >> 8),
                               static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(le.data(), le.size());
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
         std::uint32_t{p[3]} << 24;
}

}  // namespace

void write_sequences_jsonl(std::ostream& out, const std::vector<PackedSequence>& sequences) {
  for (const auto& seq : sequences) {
    ojson rec;
    rec["tokens"] = seq.tokens;
    rec["segment_ids"] = seq.segment_ids;
    rec["doc_ids"] = seq.doc_ids;
    rec["truncated"] = seq.truncated;
    rec["sep_positions"] = seq.sep_positions;
    out << rec.dump() << '\n';
  }
}

std::vector<PackedSequence> read_sequences_jsonl(std::istream& in) {
  std::vector<PackedSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t index = out.size();
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      bad_record(index, e.what());
    }
    PackedSequence seq;
    try {
      seq.tokens = rec.at("tokens").get<std::vector<TokenId>>();
      seq.segment_ids = rec.at("segment_ids").get<std::vector<std::int32_t>>();
    } catch (const json::exception& e) {
      bad_record(index, e.what());
    }
    read_metadata(rec, index, seq);
    check_sequence(seq, index);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<PackedSequence> read_sequences_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open packed file " + path.string());
  return read_sequences_jsonl(in);
}

Manifest manifest_of(const EpochPlan& plan) {
  return Manifest{plan.strategy.to_string(), to_string(plan.mode), plan.seed,
                  plan.epoch_index, plan.batch_size, plan.batches};
}

std::string manifest_json(const Manifest& m) {
  ojson rec;
  rec["strategy"] = m.strategy;
  rec["mode"] = m.mode;
  rec["seed"] = m.seed;
  rec["epoch"] = m.epoch;
  rec["batch_size"] = m.batch_size;
  rec["batches"] = m.batches;
  return rec.dump() + "\n";
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  try {
    const json rec = json::parse(in);
    Manifest m;
    m.strategy = rec.at("strategy").get<std::string>();
    m.mode = rec.at("mode").get<std::string>();
    m.seed = rec.at("seed").get<std::uint64_t>();
    m.epoch = rec.at("epoch").get<std::uint64_t>();
    m.batch_size = rec.at("batch_size").get<std::size_t>();
    m.batches = rec.at("batches").get<std::vector<std::vector<std::size_t>>>();
    return m;
  } catch (const json::exception& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
}

void write_compact(const std::filesystem::path& bin_path, const std::filesystem::path& index_path,
                   const std::vector<PackedSequence>& sequences) {
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw DataError("cannot write " + bin_path.string());
  ojson index;
  index["format"] = "docpack-compact-v1";
  index["num_sequences"] = sequences.size();
  ojson entries = ojson::array();
  std::uint64_t offset = 0;
  for (const auto& seq : sequences) {
    for (auto t : seq.tokens) put_u32(bin, t);
    for (auto s : seq.segment_ids) put_u32(bin, static_cast<std::uint32_t>(s));
    ojson e;
    e["offset"] = offset;
    e["length"] = seq.tokens.size();
    e.update(metadata_json(seq));
    entries.push_back(std::move(e));
    offset += 8 * seq.tokens.size();
  }
  index["sequences"] = std::move(entries);
  std::ofstream idx(index_path);
  if (!idx) throw DataError("cannot write " + index_path.string());
  idx << index.dump() << '\n';
}

std::vector<PackedSequence> read_compact(const std::filesystem::path& bin_path,
                                         const std::filesystem::path& index_path) {
  std::ifstream idx(index_path);
  if (!idx) throw DataError("cannot open " + index_path.string());
  json index;
  try {
    index = json::parse(idx);
  } catch (const json::parse_error& e) {
    throw DataError(index_path.string() + ": " + e.what());
  }
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw DataError("cannot open " + bin_path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)),
                                         std::istreambuf_iterator<char>());

  if (!index.is_object() || index.value("format", "") != "docpack-compact-v1") {
    throw DataError(index_path.string() + ": not a docpack-compact-v1 index");
  }
  std::vector<PackedSequence> out;
  const auto entries = index.find("sequences");
  if (entries == index.end() || !entries->is_array()) {
    throw DataError(index_path.string() + ": missing \"sequences\" array");
  }
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const auto& e = (*entries)[i];
    std::uint64_t offset = 0, length = 0;
    try {
      offset = e.at("offset").get<std::uint64_t>();
      length = e.at("length").get<std::uint64_t>();
    } catch (const json::exception& ex) {
      bad_record(i, ex.what());
    }
    if (offset + 8 * length > bytes.size()) bad_record(i, "extends past end of " + bin_path.string());
    PackedSequence seq;
    seq.tokens.resize(length);
    seq.segment_ids.resize(length);
    const unsigned char* p = bytes.data() + offset;
    for (std::size_t k = 0; k < length; ++k) seq.tokens[k] = get_u32(p + 4 * k);
    p += 4 * length;
    for (std::size_t k = 0; k < length; ++k) {
      seq.segment_ids[k] = static_cast<std::int32_t>(get_u32(p + 4 * k));
    }
    read_metadata(e, i, seq);
    check_sequence(seq, i);
    out.push_back(std::move(seq));
  }
  return out;
}

std::string epoch_stem(std::uint64_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%03llu", static_cast<unsigned long long>(epoch));
  return buf;
}

}  // namespace docpack
