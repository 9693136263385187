#include "docpack/rng.hpp"

#include <array>

namespace docpack {

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  // Rejection sampling: discard the biased low range so every residue is
  // equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(std::uint64_t& h, const unsigned char* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_u64(std::uint64_t& h, std::uint64_t v) {
  std::array<unsigned char, 8> le{};
  for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
  fnv_bytes(h, le.data(), le.size());
}

void fnv_str(std::uint64_t& h, std::string_view s) {
  // Length prefix keeps ("ab","c") and ("a","bc") apart.
  fnv_u64(h, s.size());
  fnv_bytes(h, reinterpret_cast<const unsigned char*>(s.data()), s.size());
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t epoch,
                          std::string_view key, std::string_view purpose) {
  std::uint64_t h = kFnvOffset;
  fnv_u64(h, seed);
  fnv_u64(h, epoch);
  fnv_str(h, key);
  fnv_str(h, purpose);
  return splitmix64(h);
}

}  // namespace docpack
