#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace docpack {

// Seeded random stream. Uses its own bounded draw and shuffle instead of the
// standard distributions so results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Stable 64-bit hash over (seed, epoch, key, purpose). A group's stream
// depends only on its own id, so adding a group never perturbs another.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t epoch,
                          std::string_view key, std::string_view purpose);

inline Rng derive_stream(std::uint64_t seed, std::uint64_t epoch,
                         std::string_view key, std::string_view purpose) {
  return Rng(derive_seed(seed, epoch, key, purpose));
}

}  // namespace docpack
