#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tscf {

/// Seeded 64-bit Mersenne Twister with draw primitives built directly on the
/// engine output, so draw sequences do not depend on the standard library's
/// distribution implementations.
///
/// Each primitive consumes engine words as follows:
///   uniform01()      one word (top 53 bits)
///   bernoulli(p)     one word via uniform01(), also when p is 0 or 1
///   uniform_index(n) one or more words (rejection sampling); none when n == 1
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tscf
