#include "qkdlab/error_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/wire.hpp"

namespace qkdlab::post {

std::string_view to_string(Verdict v) { return v == Verdict::Proceed ? "Proceed" : "Abort"; }

EstimationResult estimate_error(const protocols::SiftedKey& sifted, double sample_fraction, double threshold,
                                channel::ClassicalChannel& classical, RandomStream& rng,
                                const protocols::Parties& parties) {
  if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("sample_fraction: {} outside (0, 1)", sample_fraction));
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("qber_threshold: {} outside (0, 1)", threshold));
  }
  const std::size_t n = sifted.size();
  if (n < kMinEstimationKey) {
    throw Error(ErrorCode::KeyTooShort,
                fmt::format("sifted key has {} bits, error estimation needs {}", n, kMinEstimationKey));
  }

  const auto sample_size =
      std::min(n, static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(n))));

  // Receiver picks the sample: a partial Fisher-Yates draw.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < sample_size; ++i) {
    const auto j = i + rng.below(n - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> sample(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sample_size));
  std::sort(sample.begin(), sample.end());

  const auto index_msg =
      classical.deliver({parties.receiver, std::string(wire::kSampleIndices), wire::encode_indices(sample)});
  const auto disclosed = wire::decode_indices(index_msg.payload);

  ByteString sender_sample;
  ByteString receiver_sample;
  sender_sample.reserve(disclosed.size());
  receiver_sample.reserve(disclosed.size());
  for (auto idx : disclosed) {
    sender_sample.push_back(sifted.sender_bits[idx]);
    receiver_sample.push_back(sifted.receiver_bits[idx]);
  }
  const auto sender_msg =
      classical.deliver({parties.sender, std::string(wire::kSenderSample), std::move(sender_sample)});
  classical.deliver({parties.receiver, std::string(wire::kReceiverSample), std::move(receiver_sample)});

  ErrorEstimate estimate;
  estimate.threshold = threshold;
  for (std::size_t k = 0; k < disclosed.size(); ++k) {
    if (sender_msg.payload[k] != sifted.receiver_bits[disclosed[k]]) ++estimate.mismatches;
  }
  estimate.qber = static_cast<double>(estimate.mismatches) / static_cast<double>(disclosed.size());
  estimate.verdict = estimate.qber > threshold ? Verdict::Abort : Verdict::Proceed;
  estimate.sampled_indices = disclosed;
  classical.deliver({parties.receiver, std::string(wire::kVerdict),
                     ByteString{static_cast<std::uint8_t>(estimate.verdict == Verdict::Abort)}});

  EstimationResult result;
  result.estimate = std::move(estimate);
  auto& rest = result.remaining;
  rest.leakage_bits = sifted.leakage_bits;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cursor < disclosed.size() && disclosed[cursor] == i) {
      ++cursor;
      continue;
    }
    rest.kept_indices.push_back(sifted.kept_indices[i]);
    rest.sender_bits.push_back(sifted.sender_bits[i]);
    rest.receiver_bits.push_back(sifted.receiver_bits[i]);
  }
  return result;
}

}  // namespace qkdlab::post
