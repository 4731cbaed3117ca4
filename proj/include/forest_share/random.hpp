#pragma once

// Portable draws on top of std::mt19937_64 (whose output sequence is fixed by the standard;
// the <random> distributions are not, so we avoid them wherever bit-identical artifacts matter).

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace forest_share {

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound), bound > 0, by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t v = 0;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace forest_share
