#pragma once

#include <cstdint>
#include <random>

namespace qrcert {

/// mt19937_64 output is fixed by the standard; the distributions are not, so
/// bounded draws go through this rejection sampler to stay platform independent.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace qrcert
