#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qkdlab/channel.hpp"
#include "qkdlab/protocols.hpp"
#include "qkdlab/random.hpp"

namespace qkdlab::post {

inline constexpr double kDefaultQberThreshold = 0.11;
inline constexpr double kDefaultSampleFraction = 0.25;
inline constexpr std::size_t kMinEstimationKey = 16;

enum class Verdict { Proceed, Abort };

std::string_view to_string(Verdict v);

struct ErrorEstimate {
  /// Positions within the sifted key that were disclosed, ascending.
  std::vector<std::size_t> sampled_indices;
  std::size_t mismatches = 0;
  double qber = 0.0;
  double threshold = kDefaultQberThreshold;
  Verdict verdict = Verdict::Proceed;
};

struct EstimationResult {
  ErrorEstimate estimate;
  /// The sifted key with the disclosed sample removed from both sides.
  protocols::SiftedKey remaining;
};

/// Discloses a random ceil(sample_fraction * n) subset of the sifted key,
/// compares the two sides and drops the sample. Abort iff qber > threshold.
/// Throws KeyTooShort for keys under 16 bits and ConfigInvalid for
/// fractions or thresholds outside (0, 1).
EstimationResult estimate_error(const protocols::SiftedKey& sifted, double sample_fraction, double threshold,
                                channel::ClassicalChannel& classical, RandomStream& rng,
                                const protocols::Parties& parties = {});

}  // namespace qkdlab::post
