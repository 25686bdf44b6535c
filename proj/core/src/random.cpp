#include "qkdlab/random.hpp"

#include <cmath>
#include <limits>

namespace qkdlab {

std::uint64_t RandomStream::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Reject the low band so that r % bound is exactly uniform.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

std::uint32_t RandomStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  const double limit = std::exp(-mean);
  std::uint32_t k = 0;
  double product = uniform();
  while (product > limit && k < std::numeric_limits<std::uint32_t>::max()) {
    ++k;
    product *= uniform();
  }
  return k;
}

}  // namespace qkdlab
