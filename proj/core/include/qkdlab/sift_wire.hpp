#pragma once

// Byte layout of the public sifting announcements. Shared by the two
// parties and by anyone replaying a transcript (Eve, tests).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qkdlab/channel.hpp"
#include "qkdlab/quantum.hpp"

namespace qkdlab::sift_wire {

// BB84
inline constexpr std::string_view kReceiverBases = "sift.receiver_bases";  // 1 byte per pulse
inline constexpr std::string_view kBasisVerdicts = "sift.basis_verdicts";  // 1 byte per pulse
// SARG04
inline constexpr std::string_view kDetections = "sift.detections";          // 1 byte per pulse
inline constexpr std::string_view kCandidatePairs = "sift.candidate_pairs";  // 2 bytes per pulse
inline constexpr std::string_view kConclusive = "sift.conclusive";          // 1 byte per pulse

inline constexpr std::uint8_t kNoDetection = 0xFF;

/// What the public sifting messages reveal, per pulse index.
struct Announcements {
  std::vector<std::uint8_t> kept;
  /// BB84: the receiver's (= sender's, on kept pulses) basis.
  std::vector<std::optional<quantum::Basis>> bases;
  /// SARG04: the unordered candidate pair, stored in ascending state order.
  std::vector<std::optional<std::pair<quantum::Polarization, quantum::Polarization>>> candidates;
};

/// Decodes the sift messages of `protocol` found in `messages`; other tags
/// are ignored. Missing sift messages yield empty vectors.
Announcements decode(std::span<const channel::ClassicalMessage> messages, Protocol protocol);

}  // namespace qkdlab::sift_wire
