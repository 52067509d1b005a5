#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace litterscan {

/// SplitMix64. Every random decision in the toolkit (balancing, splitting,
/// weight initialization, synthetic scenes) draws from this generator so
/// runs are reproducible across platforms and implementations.
///
///   next():      state += 0x9E3779B97F4A7C15, then the standard
///                xor-shift/multiply finalizer.
///   uniform01(): (next() >> 11) * 2^-53, in [0, 1).
///   below(n):    rejection sampling; draws until r >= (2^64 - n) mod n and
///                returns r mod n. Unbiased on [0, n).
///   shuffle():   Fisher-Yates from the back: for i = n-1 .. 1, swap i with
///                below(i + 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next()
  {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n)
  {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  template <typename T>
  void shuffle(std::span<T> items)
  {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace litterscan
