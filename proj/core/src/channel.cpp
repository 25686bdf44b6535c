#include "qkdlab/channel.hpp"

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/sift_wire.hpp"

namespace qkdlab {

std::string_view to_string(Protocol p) { return p == Protocol::BB84 ? "BB84" : "SARG04"; }

}  // namespace qkdlab

namespace qkdlab::channel {

using quantum::Basis;
using quantum::Polarization;

ChannelConfig::ChannelConfig(double flip_probability, double loss_probability, quantum::SourceModel source)
    : flip_(flip_probability), loss_(loss_probability), source_(source) {
  if (!(flip_ >= 0.0 && flip_ <= 0.5)) {
    throw Error(ErrorCode::ConfigInvalid,
                fmt::format("channel.flip_probability: {} outside [0, 0.5]", flip_));
  }
  if (!(loss_ >= 0.0 && loss_ < 1.0)) {
    throw Error(ErrorCode::ConfigInvalid,
                fmt::format("channel.loss_probability: {} outside [0, 1)", loss_));
  }
}

EveStrategy EveStrategy::intercept_resend(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("eve.fraction: {} outside [0, 1]", fraction));
  }
  return {Kind::InterceptResend, fraction};
}

std::string_view to_string(EveStrategy::Kind kind) {
  switch (kind) {
    case EveStrategy::Kind::None: return "none";
    case EveStrategy::Kind::InterceptResend: return "intercept";
    case EveStrategy::Kind::PhotonNumberSplitting: return "pns";
  }
  return "?";
}

quantum::PhotonPulse transmit(quantum::PhotonPulse pulse, std::size_t index, const ChannelConfig& cfg,
                              const EveStrategy& eve, EveKnowledge& knowledge, RandomStream& rng) {
  switch (eve.kind) {
    case EveStrategy::Kind::None:
      break;
    case EveStrategy::Kind::InterceptResend:
      if (!pulse.is_vacuum() && rng.bernoulli(eve.fraction)) {
        const auto basis = static_cast<Basis>(rng.bit());
        const auto outcome = quantum::measure(pulse, basis, rng);
        const auto bit = quantum::bit_of(outcome);
        knowledge.intercepted[index] = Interception{basis, bit};
        pulse = quantum::PhotonPulse{1, quantum::encode(bit, basis)};
      }
      break;
    case EveStrategy::Kind::PhotonNumberSplitting:
      if (pulse.photon_count >= 2) {
        --pulse.photon_count;
        knowledge.stored_photons[index] = pulse.polarization;
      }
      break;
  }

  if (cfg.loss_probability() > 0.0 && rng.bernoulli(cfg.loss_probability())) {
    pulse.photon_count = 0;
  }
  if (cfg.flip_probability() > 0.0 && !pulse.is_vacuum() && rng.bernoulli(cfg.flip_probability())) {
    pulse.polarization = quantum::orthogonal(pulse.polarization);
  }
  return pulse;
}

std::optional<ClassicalMessage> ClassicalChannel::send(ClassicalMessage message) {
  bool delivered = true;
  if (fault_hook_) delivered = fault_hook_(message);
  log_.push_back(TranscriptEntry{message, delivered});
  if (!delivered) return std::nullopt;
  return message;
}

ClassicalMessage ClassicalChannel::deliver(ClassicalMessage message) {
  bool delivered = true;
  if (fault_hook_) delivered = fault_hook_(message);
  log_.push_back(TranscriptEntry{std::move(message), delivered});
  if (!delivered) {
    throw Error(ErrorCode::Io, fmt::format("classical channel dropped '{}'", log_.back().message.tag));
  }
  return log_.back().message;
}

std::vector<ClassicalMessage> ClassicalChannel::eve_view() const {
  std::vector<ClassicalMessage> out;
  out.reserve(log_.size());
  for (const auto& entry : log_) {
    if (entry.delivered) out.push_back(entry.message);
  }
  return out;
}

EveKnowledge eve_resolve_pns(EveKnowledge knowledge, std::span<const ClassicalMessage> sift_announcements,
                             Protocol protocol, RandomStream& rng) {
  if (knowledge.stored_photons.empty()) return knowledge;
  const auto ann = sift_wire::decode(sift_announcements, protocol);

  for (const auto& [index, polarization] : knowledge.stored_photons) {
    if (index >= ann.kept.size() || !ann.kept[index]) continue;
    if (protocol == Protocol::BB84) {
      if (index >= ann.bases.size() || !ann.bases[index]) continue;
      quantum::PhotonPulse stored{1, polarization};
      const auto outcome = quantum::measure(stored, *ann.bases[index], rng);
      knowledge.resolved_bits[index] = quantum::bit_of(outcome);
    } else {
      if (index >= ann.candidates.size() || !ann.candidates[index]) continue;
      const auto& pair = ann.candidates[index];
      if (!rng.bernoulli(kSarg04PnsResolveProbability)) continue;
      // A successful unambiguous measurement identifies which candidate was sent.
      const auto sent = pair->first == polarization ? pair->first : pair->second;
      knowledge.resolved_bits[index] = static_cast<std::uint8_t>(quantum::basis_of(sent));
    }
  }
  return knowledge;
}

EveKnowledge eve_resolve_intercepts(EveKnowledge knowledge,
                                    std::span<const ClassicalMessage> sift_announcements, Protocol protocol) {
  if (knowledge.intercepted.empty()) return knowledge;
  const auto ann = sift_wire::decode(sift_announcements, protocol);

  for (const auto& [index, seen] : knowledge.intercepted) {
    if (index >= ann.kept.size() || !ann.kept[index]) continue;
    if (protocol == Protocol::BB84) {
      if (index < ann.bases.size() && ann.bases[index] && *ann.bases[index] == seen.basis) {
        knowledge.resolved_bits[index] = seen.bit;
      }
    } else {
      if (index >= ann.candidates.size() || !ann.candidates[index]) continue;
      const auto& pair = ann.candidates[index];
      const auto state = quantum::encode(seen.bit, seen.basis);
      const bool excludes_first = quantum::are_orthogonal(state, pair->first);
      const bool excludes_second = quantum::are_orthogonal(state, pair->second);
      if (excludes_first != excludes_second) {
        const auto inferred = excludes_first ? pair->second : pair->first;
        knowledge.resolved_bits[index] = static_cast<std::uint8_t>(quantum::basis_of(inferred));
      }
    }
  }
  return knowledge;
}

}  // namespace qkdlab::channel

namespace qkdlab::sift_wire {

Announcements decode(std::span<const channel::ClassicalMessage> messages, Protocol protocol) {
  Announcements ann;
  for (const auto& msg : messages) {
    if (protocol == Protocol::BB84) {
      if (msg.tag == kReceiverBases) {
        ann.bases.assign(msg.payload.size(), std::nullopt);
        for (std::size_t i = 0; i < msg.payload.size(); ++i) {
          if (msg.payload[i] != kNoDetection) ann.bases[i] = static_cast<quantum::Basis>(msg.payload[i] & 1U);
        }
      } else if (msg.tag == kBasisVerdicts) {
        ann.kept = msg.payload;
      }
    } else {
      if (msg.tag == kCandidatePairs) {
        const std::size_t n = msg.payload.size() / 2;
        ann.candidates.assign(n, std::nullopt);
        for (std::size_t i = 0; i < n; ++i) {
          const auto a = msg.payload[2 * i];
          const auto b = msg.payload[2 * i + 1];
          if (a == kNoDetection || b == kNoDetection) continue;
          ann.candidates[i] = std::pair{static_cast<quantum::Polarization>(a & 3U),
                                        static_cast<quantum::Polarization>(b & 3U)};
        }
      } else if (msg.tag == kConclusive) {
        ann.kept = msg.payload;
      }
    }
  }
  return ann;
}

}  // namespace qkdlab::sift_wire
