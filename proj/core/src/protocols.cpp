#include "qkdlab/protocols.hpp"

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/sift_wire.hpp"

namespace qkdlab::protocols {

using quantum::Basis;
using quantum::Outcome;
using quantum::Polarization;

namespace {

void require_pulses(std::size_t n_pulses) {
  if (n_pulses == 0) throw Error(ErrorCode::ConfigInvalid, "n_pulses must be at least 1");
}

void require_protocol(const RawKeyRecord& record, Protocol expected) {
  if (record.protocol != expected) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("record holds a {} exchange, expected {}",
                                                      to_string(record.protocol), to_string(expected)));
  }
}

RawKeyRecord make_record(Protocol protocol, std::size_t n) {
  RawKeyRecord record;
  record.protocol = protocol;
  record.sender_bits.reserve(n);
  record.sender_bases.reserve(n);
  record.sender_states.reserve(n);
  record.receiver_bases.reserve(n);
  record.receiver_outcomes.reserve(n);
  return record;
}

void send_and_measure(RawKeyRecord& record, std::size_t index, std::uint8_t value, Basis basis,
                      const channel::ChannelConfig& cfg, const channel::EveStrategy& eve, RandomStream& rng) {
  auto pulse = quantum::emit_pulse(cfg.source(), value, basis, rng);
  record.sender_states.push_back(pulse.polarization);
  pulse = channel::transmit(pulse, index, cfg, eve, record.eve, rng);
  const auto receiver_basis = static_cast<Basis>(rng.bit());
  record.receiver_bases.push_back(receiver_basis);
  record.receiver_outcomes.push_back(quantum::measure(pulse, receiver_basis, rng));
}

}  // namespace

RawKeyRecord bb84_exchange(std::size_t n_pulses, const channel::ChannelConfig& cfg,
                           const channel::EveStrategy& eve, RandomStream& rng) {
  require_pulses(n_pulses);
  auto record = make_record(Protocol::BB84, n_pulses);
  for (std::size_t i = 0; i < n_pulses; ++i) {
    const std::uint8_t bit = rng.bit();
    const auto basis = static_cast<Basis>(rng.bit());
    record.sender_bits.push_back(bit);
    record.sender_bases.push_back(basis);
    send_and_measure(record, i, bit, basis, cfg, eve, rng);
  }
  return record;
}

SiftedKey bb84_sift(const RawKeyRecord& record, channel::ClassicalChannel& classical, const Parties& parties) {
  require_protocol(record, Protocol::BB84);
  const std::size_t n = record.size();

  // Receiver: bases for detected pulses only.
  ByteString bases(n, sift_wire::kNoDetection);
  for (std::size_t i = 0; i < n; ++i) {
    if (quantum::detected(record.receiver_outcomes[i])) {
      bases[i] = static_cast<std::uint8_t>(record.receiver_bases[i]);
    }
  }
  const auto bases_msg =
      classical.deliver({parties.receiver, std::string(sift_wire::kReceiverBases), std::move(bases)});

  // Sender: compare with its own bases and answer per pulse.
  ByteString verdicts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto announced = bases_msg.payload[i];
    if (announced != sift_wire::kNoDetection && static_cast<Basis>(announced) == record.sender_bases[i]) {
      verdicts[i] = 1;
    }
  }
  const auto verdict_msg =
      classical.deliver({parties.sender, std::string(sift_wire::kBasisVerdicts), std::move(verdicts)});

  SiftedKey key;
  for (std::size_t i = 0; i < n; ++i) {
    if (!verdict_msg.payload[i]) continue;
    key.kept_indices.push_back(i);
    key.sender_bits.push_back(record.sender_bits[i]);
    key.receiver_bits.push_back(quantum::bit_of(record.receiver_outcomes[i]));
  }
  return key;
}

RawKeyRecord sarg04_exchange(std::size_t n_pulses, const channel::ChannelConfig& cfg,
                             const channel::EveStrategy& eve, RandomStream& rng) {
  require_pulses(n_pulses);
  auto record = make_record(Protocol::SARG04, n_pulses);
  for (std::size_t i = 0; i < n_pulses; ++i) {
    const std::uint8_t bit = rng.bit();
    const auto basis = static_cast<Basis>(bit);
    const std::uint8_t state_value = rng.bit();
    record.sender_bits.push_back(bit);
    record.sender_bases.push_back(basis);
    send_and_measure(record, i, state_value, basis, cfg, eve, rng);
  }
  return record;
}

SiftedKey sarg04_sift(const RawKeyRecord& record, channel::ClassicalChannel& classical, RandomStream& rng,
                      const Parties& parties) {
  require_protocol(record, Protocol::SARG04);
  const std::size_t n = record.size();

  ByteString detections(n, 0);
  for (std::size_t i = 0; i < n; ++i) detections[i] = quantum::detected(record.receiver_outcomes[i]) ? 1 : 0;
  const auto detection_msg =
      classical.deliver({parties.receiver, std::string(sift_wire::kDetections), std::move(detections)});

  // Sender: pair the sent state with a random state of the other basis.
  ByteString pairs(2 * n, sift_wire::kNoDetection);
  for (std::size_t i = 0; i < n; ++i) {
    if (!detection_msg.payload[i]) continue;
    const auto sent = record.sender_states[i];
    const auto decoy = quantum::encode(rng.bit(), quantum::other(quantum::basis_of(sent)));
    const auto lo = std::min(static_cast<std::uint8_t>(sent), static_cast<std::uint8_t>(decoy));
    const auto hi = std::max(static_cast<std::uint8_t>(sent), static_cast<std::uint8_t>(decoy));
    pairs[2 * i] = lo;
    pairs[2 * i + 1] = hi;
  }
  const auto pair_msg =
      classical.deliver({parties.sender, std::string(sift_wire::kCandidatePairs), std::move(pairs)});
  const auto announced = sift_wire::decode(std::span(&pair_msg, 1), Protocol::SARG04);

  // Receiver: conclusive only if the outcome is orthogonal to exactly one candidate.
  ByteString conclusive(n, 0);
  Bits inferred_bits(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!quantum::detected(record.receiver_outcomes[i]) || !announced.candidates[i]) continue;
    const auto seen = quantum::encode(quantum::bit_of(record.receiver_outcomes[i]), record.receiver_bases[i]);
    const auto [first, second] = *announced.candidates[i];
    const bool excludes_first = quantum::are_orthogonal(seen, first);
    const bool excludes_second = quantum::are_orthogonal(seen, second);
    if (excludes_first == excludes_second) continue;
    conclusive[i] = 1;
    inferred_bits[i] = static_cast<std::uint8_t>(quantum::basis_of(excludes_first ? second : first));
  }
  const auto conclusive_msg =
      classical.deliver({parties.receiver, std::string(sift_wire::kConclusive), std::move(conclusive)});

  SiftedKey key;
  for (std::size_t i = 0; i < n; ++i) {
    if (!conclusive_msg.payload[i]) continue;
    key.kept_indices.push_back(i);
    key.sender_bits.push_back(record.sender_bits[i]);
    key.receiver_bits.push_back(inferred_bits[i]);
  }
  return key;
}

RawKeyRecord exchange(Protocol protocol, std::size_t n_pulses, const channel::ChannelConfig& cfg,
                      const channel::EveStrategy& eve, RandomStream& rng) {
  return protocol == Protocol::BB84 ? bb84_exchange(n_pulses, cfg, eve, rng)
                                    : sarg04_exchange(n_pulses, cfg, eve, rng);
}

SiftedKey sift(const RawKeyRecord& record, channel::ClassicalChannel& classical, RandomStream& rng,
               const Parties& parties) {
  return record.protocol == Protocol::BB84 ? bb84_sift(record, classical, parties)
                                           : sarg04_sift(record, classical, rng, parties);
}

double sifted_error_rate(const SiftedKey& key) {
  if (key.size() == 0) return 0.0;
  return static_cast<double>(hamming_distance(key.sender_bits, key.receiver_bits)) /
         static_cast<double>(key.size());
}

}  // namespace qkdlab::protocols
