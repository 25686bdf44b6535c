#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "qkdlab/channel.hpp"
#include "qkdlab/error_estimation.hpp"
#include "qkdlab/privacy_amplification.hpp"
#include "qkdlab/protocols.hpp"
#include "qkdlab/random.hpp"
#include "qkdlab/reconciliation.hpp"

namespace qkdlab {

struct QkdParams {
  Protocol protocol = Protocol::SARG04;
  std::size_t n_pulses = 20000;
  double sample_fraction = post::kDefaultSampleFraction;
  double qber_threshold = post::kDefaultQberThreshold;
  post::Reconciliation reconciliation = post::Reconciliation::Cascade;
  post::CascadeOptions cascade{};
  post::WinnowOptions winnow{};
  std::size_t security_parameter = post::kDefaultSecurityParameter;
};

enum class QkdStatus {
  KeyEstablished,
  QberAbort,     // eavesdropping suspected
  KeyExhausted,  // leakage ate the whole key
  KeyTooShort,   // too few sifted bits to estimate or reconcile
};

std::string_view to_string(QkdStatus s);

struct QkdSessionResult {
  QkdStatus status = QkdStatus::KeyTooShort;
  std::size_t pulses = 0;
  std::size_t sifted_length = 0;
  /// Disagreement over the whole sifted key. Diagnostic only: neither party
  /// can observe it.
  double sifted_qber = 0.0;
  std::optional<post::ErrorEstimate> estimate;
  std::size_t reconciled_length = 0;
  std::size_t leaked_bits = 0;
  std::optional<post::FinalKey> sender_key;
  std::optional<post::FinalKey> receiver_key;
  channel::EveKnowledge eve;
  /// Sifted pulses Eve holds a stored photon for (PNS) or intercepted.
  std::size_t eve_tagged_sifted = 0;

  double sift_fraction() const {
    return pulses == 0 ? 0.0 : static_cast<double>(sifted_length) / static_cast<double>(pulses);
  }
  std::size_t eve_resolved_bits() const { return eve.resolved_bits.size(); }
  std::size_t final_key_length() const { return sender_key ? sender_key->length() : 0; }
  bool keys_match() const { return sender_key && receiver_key && sender_key->bits == receiver_key->bits; }
};

/// One full QKD round: quantum exchange, sifting, Eve's post-sifting
/// resolution, error estimation, reconciliation and privacy amplification.
/// Every classical message goes through `classical`.
QkdSessionResult run_qkd_session(const QkdParams& params, const channel::ChannelConfig& cfg,
                                 const channel::EveStrategy& eve, channel::ClassicalChannel& classical,
                                 RandomStream& rng, const protocols::Parties& parties = {});

}  // namespace qkdlab
