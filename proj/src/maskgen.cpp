#include "docpack/maskgen.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace docpack {

MaskSpec MaskSpec::from(const PackedSequence& seq, bool cross_doc) {
  return MaskSpec{seq.segment_ids, cross_doc};
}

bool may_attend(const MaskSpec& spec, std::size_t query, std::size_t key) {
  if (query >= spec.length() || key >= spec.length()) {
    throw std::out_of_range("may_attend: position (" + std::to_string(query) + ", " +
                            std::to_string(key) + ") outside length " +
                            std::to_string(spec.length()));
  }
  const auto qs = spec.segment_ids[query];
  const auto ks = spec.segment_ids[key];
  return key <= query && qs != kPadSegment && ks != kPadSegment &&
         (spec.cross_doc || qs == ks);
}

std::size_t DenseMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

DenseMask dense_mask(const MaskSpec& spec, std::size_t cap) {
  const std::size_t n = spec.length();
  if (n > cap) {
    throw std::length_error("dense_mask: length " + std::to_string(n) +
                            " exceeds export cap " + std::to_string(cap));
  }
  DenseMask m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, may_attend(spec, i, j));
  }
  return m;
}

std::vector<std::uint8_t> pack_dense_mask(const DenseMask& mask) {
  const std::size_t n = mask.size();
  std::vector<std::uint8_t> out((n * n + 7) / 8, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mask(i, j)) {
        const std::size_t k = i * n + j;
        out[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
      }
    }
  }
  return out;
}

DenseMask unpack_dense_mask(std::span<const std::uint8_t> bytes, std::size_t length) {
  if (bytes.size() != (length * length + 7) / 8) {
    throw std::invalid_argument("unpack_dense_mask: expected " +
                                std::to_string((length * length + 7) / 8) + " bytes, got " +
                                std::to_string(bytes.size()));
  }
  DenseMask m(length);
  for (std::size_t k = 0; k < length * length; ++k) {
    m.set(k / length, k % length, (bytes[k / 8] >> (k % 8)) & 1u);
  }
  return m;
}

std::vector<bool> loss_mask(const PackedSequence& seq) {
  std::vector<bool> out(seq.segment_ids.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = seq.segment_ids[i] != kPadSegment;
  return out;
}

std::uint64_t allowed_pairs(std::span<const std::int32_t> segment_ids, bool cross_doc) {
  auto triangle = [](std::uint64_t n) { return n * (n + 1) / 2; };
  if (cross_doc) {
    const auto n = static_cast<std::uint64_t>(
        std::count_if(segment_ids.begin(), segment_ids.end(),
                      [](std::int32_t s) { return s != kPadSegment; }));
    return triangle(n);
  }
  std::unordered_map<std::int32_t, std::uint64_t> sizes;
  for (auto s : segment_ids) {
    if (s != kPadSegment) ++sizes[s];
  }
  std::uint64_t total = 0;
  for (const auto& [seg, n] : sizes) total += triangle(n);
  return total;
}

}  // namespace docpack
