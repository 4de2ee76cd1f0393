// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace haarlab {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Counter-based splittable generator. Each draw is a pure function of
/// (seed, stream, counter), so parallel sampling is order-independent and
/// any sample can be regenerated in isolation.
struct CounterRng {
  std::uint64_t key;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key(detail::splitmix64(seed ^ (0xa0761d6478bd642full * (stream + 1)))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return detail::splitmix64(key ^ (0xe7037ed1a0b428dbull * (counter + 1)));
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
};

}  // namespace haarlab
