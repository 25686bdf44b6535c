#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkdlab/bits.hpp"
#include "qkdlab/quantum.hpp"
#include "qkdlab/random.hpp"

namespace qkdlab {

enum class Protocol : std::uint8_t { BB84, SARG04 };

std::string_view to_string(Protocol p);

}  // namespace qkdlab

namespace qkdlab::channel {

/// Quantum channel parameters. Probabilities are validated on construction.
class ChannelConfig {
 public:
  ChannelConfig() : ChannelConfig(0.0, 0.0, quantum::SourceModel::single_photon()) {}
  ChannelConfig(double flip_probability, double loss_probability, quantum::SourceModel source);

  static ChannelConfig ideal() { return {}; }

  double flip_probability() const { return flip_; }
  double loss_probability() const { return loss_; }
  const quantum::SourceModel& source() const { return source_; }

 private:
  double flip_;
  double loss_;
  quantum::SourceModel source_;
};

struct EveStrategy {
  enum class Kind : std::uint8_t { None, InterceptResend, PhotonNumberSplitting };

  Kind kind = Kind::None;
  /// Share of pulses attacked; only meaningful for InterceptResend.
  double fraction = 0.0;

  static EveStrategy none() { return {}; }
  static EveStrategy intercept_resend(double fraction);
  static EveStrategy photon_number_splitting() { return {Kind::PhotonNumberSplitting, 0.0}; }
};

std::string_view to_string(EveStrategy::Kind kind);

struct Interception {
  quantum::Basis basis;
  std::uint8_t bit;
};

struct EveKnowledge {
  std::map<std::size_t, Interception> intercepted;
  std::map<std::size_t, quantum::Polarization> stored_photons;
  /// Bits Eve has pinned down after listening to sifting. Keys are always a
  /// subset of the pulses she acted on.
  std::map<std::size_t, std::uint8_t> resolved_bits;
};

/// Applies Eve, then loss, then polarization flip to one pulse.
quantum::PhotonPulse transmit(quantum::PhotonPulse pulse, std::size_t index, const ChannelConfig& cfg,
                              const EveStrategy& eve, EveKnowledge& knowledge, RandomStream& rng);

struct ClassicalMessage {
  std::string sender;
  std::string tag;
  ByteString payload;

  friend bool operator==(const ClassicalMessage&, const ClassicalMessage&) = default;
};

struct TranscriptEntry {
  ClassicalMessage message;
  bool delivered = true;
};

/// Free-form annotation, positioned after the first `after_messages`
/// transcript entries.
struct TranscriptNote {
  std::size_t after_messages = 0;
  std::string text;
};

/// Authenticated public channel. Messages arrive unmodified and in order;
/// every message is logged, and the log doubles as Eve's read-only copy.
///
/// A fault hook can be installed by test harnesses to drop or corrupt
/// traffic (used for handshake timeout and tamper scenarios only).
class ClassicalChannel {
 public:
  /// Return false to drop the message. May modify it in place.
  using FaultHook = std::function<bool(ClassicalMessage&)>;

  std::optional<ClassicalMessage> send(ClassicalMessage message);

  /// Like send, but the caller relies on delivery (QKD post-processing).
  ClassicalMessage deliver(ClassicalMessage message);

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

  void note(std::string line) { notes_.push_back({log_.size(), std::move(line)}); }

  const std::vector<TranscriptEntry>& transcript() const { return log_; }
  const std::vector<TranscriptNote>& notes() const { return notes_; }

  /// Delivered messages only: what a passive listener observes.
  std::vector<ClassicalMessage> eve_view() const;

  std::size_t message_count() const { return log_.size(); }

 private:
  std::vector<TranscriptEntry> log_;
  std::vector<TranscriptNote> notes_;
  FaultHook fault_hook_;
};

/// Delayed measurement of PNS-stored photons once sifting is public.
/// BB84 resolves every stored photon on a sifted index; SARG04 resolves each
/// with probability 1 - 1/sqrt(2) (unambiguous discrimination of the two
/// announced candidates).
EveKnowledge eve_resolve_pns(EveKnowledge knowledge, std::span<const ClassicalMessage> sift_announcements,
                             Protocol protocol, RandomStream& rng);

/// Resolves intercept-resend measurements against the public sifting data:
/// BB84 keeps intercepts made in the announced basis; SARG04 applies the
/// receiver's own orthogonality-exclusion rule to Eve's measured state.
EveKnowledge eve_resolve_intercepts(EveKnowledge knowledge,
                                    std::span<const ClassicalMessage> sift_announcements, Protocol protocol);

inline constexpr double kSarg04PnsResolveProbability = 0.29289321881345254;  // 1 - 1/sqrt(2)

}  // namespace qkdlab::channel
