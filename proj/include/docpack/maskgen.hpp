#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "docpack/packer.hpp"

namespace docpack {

// Attention permissions are carried as segment ids plus one flag; the dense
// matrix is only materialized for tests and small exports.
struct MaskSpec {
  std::vector<std::int32_t> segment_ids;
  bool cross_doc = true;

  std::size_t length() const { return segment_ids.size(); }

  static MaskSpec from(const PackedSequence& seq, bool cross_doc);
};

// Causal, PAD-excluding, and same-segment unless cross_doc.
// Throws std::out_of_range for positions outside the spec.
bool may_attend(const MaskSpec& spec, std::size_t query, std::size_t key);

inline constexpr std::size_t kDefaultDenseMaskCap = 4096;

// Row-major length x length matrix of may_attend. Throws std::length_error
// above the cap.
class DenseMask {
 public:
  explicit DenseMask(std::size_t n) : n_(n), bits_(n * n, false) {}
  std::size_t size() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, bool v) { bits_[i * n_ + j] = v; }
  std::size_t count() const;
  friend bool operator==(const DenseMask&, const DenseMask&) = default;

 private:
  std::size_t n_;
  std::vector<bool> bits_;
};

DenseMask dense_mask(const MaskSpec& spec,
                     std::size_t cap = kDefaultDenseMaskCap);

// Compact export: bit k = i * length + j lives in byte k / 8 at bit k % 8
// (least significant bit first). Trailing bits of the last byte are zero.
std::vector<std::uint8_t> pack_dense_mask(const DenseMask& mask);
DenseMask unpack_dense_mask(std::span<const std::uint8_t> bytes,
                            std::size_t length);

// True on every non-PAD position (SEP included).
std::vector<bool> loss_mask(const PackedSequence& seq);

// Count of permitted (query, key) pairs, computed from segment run lengths.
std::uint64_t allowed_pairs(std::span<const std::int32_t> segment_ids,
                            bool cross_doc);

}  // namespace docpack
