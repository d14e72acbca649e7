#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tesa {

/// Seeded engine with a fixed, platform-independent output sequence.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). Standard distributions are
/// implementation-defined, so draws are derived from raw engine output.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

/// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace tesa
