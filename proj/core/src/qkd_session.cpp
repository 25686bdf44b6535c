#include "qkdlab/qkd_session.hpp"

#include <algorithm>
#include <vector>

#include "qkdlab/errors.hpp"
#include "qkdlab/wire.hpp"

namespace qkdlab {

std::string_view to_string(QkdStatus s) {
  switch (s) {
    case QkdStatus::KeyEstablished: return "KeyEstablished";
    case QkdStatus::QberAbort: return "QberAbort";
    case QkdStatus::KeyExhausted: return "KeyExhausted";
    case QkdStatus::KeyTooShort: return "KeyTooShort";
  }
  return "?";
}

namespace {

std::vector<channel::ClassicalMessage> delivered_since(const channel::ClassicalChannel& classical,
                                                       std::size_t first) {
  std::vector<channel::ClassicalMessage> out;
  const auto& log = classical.transcript();
  for (std::size_t i = first; i < log.size(); ++i) {
    if (log[i].delivered) out.push_back(log[i].message);
  }
  return out;
}

}  // namespace

QkdSessionResult run_qkd_session(const QkdParams& params, const channel::ChannelConfig& cfg,
                                 const channel::EveStrategy& eve, channel::ClassicalChannel& classical,
                                 RandomStream& rng, const protocols::Parties& parties) {
  QkdSessionResult result;
  result.pulses = params.n_pulses;

  auto record = protocols::exchange(params.protocol, params.n_pulses, cfg, eve, rng);
  const std::size_t sift_start = classical.message_count();
  const auto sifted = protocols::sift(record, classical, rng, parties);
  result.sifted_length = sifted.size();
  result.sifted_qber = protocols::sifted_error_rate(sifted);

  // Eve listens to the sifting discussion before anything else happens.
  const auto sift_messages = delivered_since(classical, sift_start);
  result.eve = std::move(record.eve);
  if (eve.kind == channel::EveStrategy::Kind::PhotonNumberSplitting) {
    result.eve = channel::eve_resolve_pns(std::move(result.eve), sift_messages, params.protocol, rng);
  } else if (eve.kind == channel::EveStrategy::Kind::InterceptResend) {
    result.eve = channel::eve_resolve_intercepts(std::move(result.eve), sift_messages, params.protocol);
  }
  for (auto idx : sifted.kept_indices) {
    if (result.eve.stored_photons.count(idx) || result.eve.intercepted.count(idx)) ++result.eve_tagged_sifted;
  }

  if (sifted.size() < post::kMinEstimationKey) {
    result.status = QkdStatus::KeyTooShort;
    return result;
  }
  auto estimated =
      post::estimate_error(sifted, params.sample_fraction, params.qber_threshold, classical, rng, parties);
  result.estimate = estimated.estimate;
  if (estimated.estimate.verdict == post::Verdict::Abort) {
    result.status = QkdStatus::QberAbort;
    return result;
  }
  const auto& working = estimated.remaining;
  if (working.size() < post::kMinReconcileKey) {
    result.status = QkdStatus::KeyTooShort;
    return result;
  }

  const auto reconciled =
      params.reconciliation == post::Reconciliation::Cascade
          ? post::cascade_reconcile(working.sender_bits, working.receiver_bits, estimated.estimate.qber,
                                    classical, rng, params.cascade, parties)
          : post::winnow_reconcile(working.sender_bits, working.receiver_bits, classical, rng, params.winnow,
                                   parties);
  result.reconciled_length = reconciled.sender_key.size();
  result.leaked_bits = working.leakage_bits + reconciled.parity_bits_leaked;

  try {
    result.sender_key = post::privacy_amplify(reconciled.sender_key, result.leaked_bits, params.security_parameter,
                                              classical, rng, parties.sender);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::KeyExhausted) throw;
    result.status = QkdStatus::KeyExhausted;
    return result;
  }
  const auto& seed_msg = classical.transcript().back().message;
  result.receiver_key =
      post::apply_published_amplification(reconciled.receiver_key, seed_msg, params.security_parameter);
  result.status = QkdStatus::KeyEstablished;
  return result;
}

}  // namespace qkdlab
