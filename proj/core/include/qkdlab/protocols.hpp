#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qkdlab/bits.hpp"
#include "qkdlab/channel.hpp"
#include "qkdlab/quantum.hpp"
#include "qkdlab/random.hpp"

namespace qkdlab::protocols {

/// Names the two ends of a QKD session in transcripts.
struct Parties {
  std::string sender = "alice";
  std::string receiver = "bob";
};

/// Everything both parties recorded during the quantum phase, one entry
/// per pulse. Each party only ever reads its own columns.
struct RawKeyRecord {
  Protocol protocol = Protocol::BB84;
  Bits sender_bits;
  std::vector<quantum::Basis> sender_bases;
  std::vector<quantum::Polarization> sender_states;
  std::vector<quantum::Basis> receiver_bases;
  std::vector<quantum::Outcome> receiver_outcomes;
  channel::EveKnowledge eve;

  std::size_t size() const { return sender_bits.size(); }
};

struct SiftedKey {
  std::vector<std::size_t> kept_indices;
  Bits sender_bits;
  Bits receiver_bits;
  /// Key-correlated bits disclosed on the classical channel so far.
  std::size_t leakage_bits = 0;

  std::size_t size() const { return kept_indices.size(); }
};

/// Sends n_pulses random bits in random bases through the quantum channel;
/// the receiver measures each in a random basis.
RawKeyRecord bb84_exchange(std::size_t n_pulses, const channel::ChannelConfig& cfg,
                           const channel::EveStrategy& eve, RandomStream& rng);

/// Receiver announces its bases, sender answers match/no-match; detected
/// pulses with matching bases are kept. No bit values cross the channel.
SiftedKey bb84_sift(const RawKeyRecord& record, channel::ClassicalChannel& classical,
                    const Parties& parties = {});

/// Quantum phase for SARG04: the logical bit is the basis choice
/// (rectilinear = 0, diagonal = 1) and the state inside it is random.
RawKeyRecord sarg04_exchange(std::size_t n_pulses, const channel::ChannelConfig& cfg,
                             const channel::EveStrategy& eve, RandomStream& rng);

/// The sender announces {sent state, random state of the other basis} per
/// detected pulse; the receiver keeps a pulse only when its outcome rules
/// out exactly one candidate, and takes the other candidate's basis as bit.
SiftedKey sarg04_sift(const RawKeyRecord& record, channel::ClassicalChannel& classical, RandomStream& rng,
                      const Parties& parties = {});

RawKeyRecord exchange(Protocol protocol, std::size_t n_pulses, const channel::ChannelConfig& cfg,
                      const channel::EveStrategy& eve, RandomStream& rng);
SiftedKey sift(const RawKeyRecord& record, channel::ClassicalChannel& classical, RandomStream& rng,
               const Parties& parties = {});

/// Fraction of positions where the two sifted strings disagree (0 if empty).
double sifted_error_rate(const SiftedKey& key);

}  // namespace qkdlab::protocols
