#pragma once

#include <cstdint>
#include <iterator>
#include <random>
#include <utility>

namespace qkdlab {

/// Seeded random stream used for every random decision in a session.
///
/// The engine (mt19937_64) is bit-exact across standard libraries, but the
/// std:: distributions are not, so the sampling helpers here are written out
/// explicitly. Two streams built from the same seed produce the same
/// sequence on any conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Poisson-distributed count (Knuth's multiplication method; intended for
  /// the small means used by weak laser sources).
  std::uint32_t poisson(double mean);

  /// Independent child stream seeded from this one.
  RandomStream split() { return RandomStream(engine_() ^ 0x9e3779b97f4a7c15ULL); }

  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    auto n = static_cast<std::uint64_t>(std::distance(first, last));
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      using std::swap;
      swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qkdlab
