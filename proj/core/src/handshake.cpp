#include "qkdlab/handshake.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/prf.hpp"

namespace qkdlab::handshake {

std::string_view to_string(Role role) { return role == Role::Authenticator ? "authenticator" : "supplicant"; }

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Idle: return "Idle";
    case Phase::Msg1Sent: return "Msg1Sent";
    case Phase::Msg1Rcvd: return "Msg1Rcvd";
    case Phase::Msg2Sent: return "Msg2Sent";
    case Phase::Msg2Rcvd: return "Msg2Rcvd";
    case Phase::Msg3Sent: return "Msg3Sent";
    case Phase::Msg3Rcvd: return "Msg3Rcvd";
    case Phase::Msg4Sent: return "Msg4Sent";
    case Phase::Msg4Rcvd: return "Msg4Rcvd";
    case Phase::QkdInProgress: return "QkdInProgress";
    case Phase::Established: return "Established";
    case Phase::Aborted: return "Aborted";
  }
  return "?";
}

std::string_view to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::ProtocolViolation: return "ProtocolViolation";
    case AbortReason::MicMismatch: return "MicMismatch";
    case AbortReason::Timeout: return "Timeout";
    case AbortReason::QberThresholdExceeded: return "QberThresholdExceeded";
    case AbortReason::QMicMismatch: return "QMicMismatch";
    case AbortReason::RetriesExhausted: return "RetriesExhausted";
  }
  return "?";
}

std::optional<FrameKind> frame_kind_from_byte(std::uint8_t byte) {
  switch (byte) {
    case 0x11: return FrameKind::Msg1;
    case 0x22: return FrameKind::Msg2;
    case 0x44: return FrameKind::Msg3;
    case 0x88: return FrameKind::Msg4;
    default: return std::nullopt;
  }
}

int frame_number(FrameKind kind) {
  switch (kind) {
    case FrameKind::Msg1: return 1;
    case FrameKind::Msg2: return 2;
    case FrameKind::Msg3: return 3;
    case FrameKind::Msg4: return 4;
  }
  return 0;
}

std::uint8_t expected_flags(FrameKind kind) {
  switch (kind) {
    case FrameKind::Msg3: return kFlagInstall;
    case FrameKind::Msg4: return kFlagConfirm;
    default: return 0;
  }
}

Role sender_of(FrameKind kind) {
  return kind == FrameKind::Msg1 || kind == FrameKind::Msg3 ? Role::Authenticator : Role::Supplicant;
}

ByteString frame_mic(std::span<const std::uint8_t> kck, std::span<const std::uint8_t> frame) {
  if (frame.size() < kMicBytes) throw Error(ErrorCode::BadLength, "frame shorter than its MIC field");
  ByteString zeroed(frame.begin(), frame.end());
  std::fill(zeroed.end() - static_cast<std::ptrdiff_t>(kMicBytes), zeroed.end(), std::uint8_t{0});
  auto mac = prf::hmac_sha256(pack_bits(kck), zeroed);
  mac.resize(kMicBytes);
  return mac;
}

std::string HandshakeResult::outcome() const {
  if (established) return "Established";
  if (abort_reason) return fmt::format("Aborted({})", to_string(*abort_reason));
  return "Incomplete";
}

Bits random_pmk(RandomStream& rng) {
  Bits pmk(kPmkBits);
  for (auto& b : pmk) b = rng.bit();
  return pmk;
}

// --- endpoint ---------------------------------------------------------------

HandshakeEndpoint::HandshakeEndpoint(Role role, KeyMode mode, Bits pmk, MacAddress self, MacAddress peer,
                                     RandomStream rng, std::uint64_t timeout_ms)
    : role_(role),
      mode_(mode),
      pmk_(std::move(pmk)),
      self_(self),
      peer_(peer),
      rng_(std::move(rng)),
      timeout_ms_(timeout_ms) {
  if (pmk_.size() != kPmkBits) {
    throw Error(ErrorCode::BadLength, fmt::format("pmk has {} bits, expected {}", pmk_.size(), kPmkBits));
  }
}

std::string HandshakeEndpoint::name() const { return role_ == Role::Authenticator ? "ap" : "sta"; }

void HandshakeEndpoint::enter(Phase phase) {
  phase_ = phase;
  history_.push_back(phase);
}

void HandshakeEndpoint::abort(AbortReason reason) {
  if (terminal()) return;
  reason_ = reason;
  deadline_.reset();
  enter(Phase::Aborted);
}

void HandshakeEndpoint::begin_qkd() {
  if (mode_ != KeyMode::Quantum || phase_ != Phase::Idle) {
    abort(AbortReason::ProtocolViolation);
    return;
  }
  enter(Phase::QkdInProgress);
}

void HandshakeEndpoint::install_quantum_key(std::span<const std::uint8_t> quantum_key) {
  if (mode_ != KeyMode::Quantum || phase_ != Phase::QkdInProgress) {
    abort(AbortReason::ProtocolViolation);
    return;
  }
  hierarchy_ = quantum_hierarchy(pmk_, quantum_key);
  qmic_ = compute_qmic(quantum_key, pmk_);
  enter(Phase::Idle);
}

std::optional<FrameKind> HandshakeEndpoint::awaited() const {
  if (mode_ == KeyMode::Quantum && !qmic_) return std::nullopt;
  if (role_ == Role::Authenticator) {
    if (phase_ == Phase::Msg1Sent) return FrameKind::Msg2;
    if (phase_ == Phase::Msg3Sent) return FrameKind::Msg4;
  } else {
    if (phase_ == Phase::Idle) return FrameKind::Msg1;
    if (phase_ == Phase::Msg2Sent) return FrameKind::Msg3;
  }
  return std::nullopt;
}

channel::ClassicalMessage HandshakeEndpoint::emit(FrameKind kind, std::span<const std::uint8_t> nonce) {
  ByteString payload{static_cast<std::uint8_t>(kind), expected_flags(kind)};
  if (mode_ == KeyMode::Standard) {
    ByteString nonce_bytes = nonce.empty() ? ByteString(kNonceBits / 8, 0) : pack_bits(nonce);
    payload.insert(payload.end(), nonce_bytes.begin(), nonce_bytes.end());
    payload.resize(kStandardFrameBytes, 0);
    if (kind != FrameKind::Msg1) {
      const auto mic = frame_mic(hierarchy_->kck, payload);
      std::copy(mic.begin(), mic.end(), payload.end() - kMicBytes);
    }
  } else {
    const auto qmic = pack_bits(*qmic_);
    payload.insert(payload.end(), qmic.begin(), qmic.end());
  }
  return {name(), std::string(kFrameTag), std::move(payload)};
}

std::vector<channel::ClassicalMessage> HandshakeEndpoint::start(std::uint64_t now_ms) {
  if (terminal()) return {};
  if (mode_ == KeyMode::Quantum && !qmic_) {
    abort(AbortReason::ProtocolViolation);
    return {};
  }
  deadline_ = now_ms + timeout_ms_;
  if (role_ == Role::Supplicant) return {};
  if (phase_ != Phase::Idle) {
    abort(AbortReason::ProtocolViolation);
    return {};
  }
  std::vector<channel::ClassicalMessage> out;
  if (mode_ == KeyMode::Standard) {
    Bits anonce(kNonceBits);
    for (auto& b : anonce) b = rng_.bit();
    anonce_ = anonce;
    out.push_back(emit(FrameKind::Msg1, anonce));
  } else {
    out.push_back(emit(FrameKind::Msg1, {}));
  }
  enter(Phase::Msg1Sent);
  return out;
}

void HandshakeEndpoint::on_tick(std::uint64_t now_ms) {
  if (!terminal() && deadline_ && now_ms >= *deadline_) abort(AbortReason::Timeout);
}

std::vector<channel::ClassicalMessage> HandshakeEndpoint::on_frame(const channel::ClassicalMessage& frame,
                                                                   std::uint64_t now_ms) {
  if (terminal()) return {};
  if (deadline_ && now_ms > *deadline_) {
    abort(AbortReason::Timeout);
    return {};
  }
  const auto expected = awaited();
  const std::size_t frame_bytes = mode_ == KeyMode::Standard ? kStandardFrameBytes : kQuantumFrameBytes;
  if (!expected || frame.tag != kFrameTag || frame.payload.size() != frame_bytes) {
    abort(AbortReason::ProtocolViolation);
    return {};
  }
  const auto kind = frame_kind_from_byte(frame.payload[0]);
  if (!kind) {
    // The MIC covers the kind byte, so a corrupted kind on a frame that
    // should carry a MIC is a MIC failure.
    abort(mode_ == KeyMode::Standard && *expected != FrameKind::Msg1 ? AbortReason::MicMismatch
                                                                      : AbortReason::ProtocolViolation);
    return {};
  }
  if (*kind != *expected) {
    abort(AbortReason::ProtocolViolation);
    return {};
  }
  return mode_ == KeyMode::Standard ? handle_standard(*kind, frame.payload, now_ms)
                                    : handle_quantum(*kind, frame.payload, now_ms);
}

void HandshakeEndpoint::derive_standard_keys() {
  const auto ptk = role_ == Role::Authenticator ? derive_ptk_standard(pmk_, *anonce_, *snonce_, self_, peer_)
                                                : derive_ptk_standard(pmk_, *anonce_, *snonce_, peer_, self_);
  hierarchy_ = build_hierarchy(pmk_, ptk, KeyMode::Standard);
}

std::vector<channel::ClassicalMessage> HandshakeEndpoint::handle_standard(FrameKind kind,
                                                                          std::span<const std::uint8_t> payload,
                                                                          std::uint64_t now_ms) {
  const auto nonce = unpack_bits(payload.subspan(2, kNonceBits / 8), kNonceBits);
  const auto mic = payload.last(kMicBytes);
  auto verify = [&]() {
    const auto want = frame_mic(hierarchy_->kck, payload);
    return std::equal(want.begin(), want.end(), mic.begin());
  };

  std::vector<channel::ClassicalMessage> out;
  switch (kind) {
    case FrameKind::Msg1: {
      if (payload[1] != expected_flags(kind)) return abort(AbortReason::ProtocolViolation), out;
      enter(Phase::Msg1Rcvd);
      anonce_ = nonce;
      Bits snonce(kNonceBits);
      for (auto& b : snonce) b = rng_.bit();
      snonce_ = snonce;
      derive_standard_keys();
      out.push_back(emit(FrameKind::Msg2, *snonce_));
      enter(Phase::Msg2Sent);
      deadline_ = now_ms + timeout_ms_;
      break;
    }
    case FrameKind::Msg2: {
      snonce_ = nonce;
      derive_standard_keys();
      if (!verify()) return abort(AbortReason::MicMismatch), out;
      if (payload[1] != expected_flags(kind)) return abort(AbortReason::ProtocolViolation), out;
      enter(Phase::Msg2Rcvd);
      out.push_back(emit(FrameKind::Msg3, *anonce_));
      enter(Phase::Msg3Sent);
      deadline_ = now_ms + timeout_ms_;
      break;
    }
    case FrameKind::Msg3: {
      if (!verify()) return abort(AbortReason::MicMismatch), out;
      if (payload[1] != expected_flags(kind) || nonce != *anonce_) return abort(AbortReason::ProtocolViolation), out;
      enter(Phase::Msg3Rcvd);
      out.push_back(emit(FrameKind::Msg4, {}));
      enter(Phase::Msg4Sent);
      deadline_.reset();
      enter(Phase::Established);
      break;
    }
    case FrameKind::Msg4: {
      if (!verify()) return abort(AbortReason::MicMismatch), out;
      if (payload[1] != expected_flags(kind)) return abort(AbortReason::ProtocolViolation), out;
      enter(Phase::Msg4Rcvd);
      deadline_.reset();
      enter(Phase::Established);
      break;
    }
  }
  return out;
}

std::vector<channel::ClassicalMessage> HandshakeEndpoint::handle_quantum(FrameKind kind,
                                                                         std::span<const std::uint8_t> payload,
                                                                         std::uint64_t now_ms) {
  std::vector<channel::ClassicalMessage> out;
  const auto received = unpack_bits(payload.subspan(2), kQMicBits);
  if (received != *qmic_) return abort(AbortReason::QMicMismatch), out;
  if (payload[1] != expected_flags(kind)) return abort(AbortReason::ProtocolViolation), out;

  switch (kind) {
    case FrameKind::Msg1:
      enter(Phase::Msg1Rcvd);
      out.push_back(emit(FrameKind::Msg2, {}));
      enter(Phase::Msg2Sent);
      deadline_ = now_ms + timeout_ms_;
      break;
    case FrameKind::Msg2:
      enter(Phase::Msg2Rcvd);
      out.push_back(emit(FrameKind::Msg3, {}));
      enter(Phase::Msg3Sent);
      deadline_ = now_ms + timeout_ms_;
      break;
    case FrameKind::Msg3:
      enter(Phase::Msg3Rcvd);
      out.push_back(emit(FrameKind::Msg4, {}));
      enter(Phase::Msg4Sent);
      deadline_.reset();
      enter(Phase::Established);
      break;
    case FrameKind::Msg4:
      enter(Phase::Msg4Rcvd);
      deadline_.reset();
      enter(Phase::Established);
      break;
  }
  return out;
}

// --- session driver -----------------------------------------------------------

namespace {

struct InFlight {
  std::uint64_t at;
  bool to_authenticator;
  channel::ClassicalMessage message;
};

class Driver {
 public:
  Driver(HandshakeEndpoint& ap, HandshakeEndpoint& sta, channel::ClassicalChannel& classical,
         const HandshakeConfig& config)
      : ap_(ap), sta_(sta), classical_(classical), config_(config) {}

  std::optional<AbortReason> first_abort() const { return first_abort_; }

  void check_aborts() {
    for (auto* e : {&ap_, &sta_}) {
      if (e->phase() == Phase::Aborted && !first_abort_) {
        first_abort_ = e->abort_reason();
        classical_.note(fmt::format("t={}ms {} aborted: {}", now_, e->name(), to_string(*e->abort_reason())));
      }
    }
  }

  void post(std::vector<channel::ClassicalMessage> frames, bool from_authenticator) {
    for (auto& f : frames) {
      auto delivered = classical_.send(std::move(f));
      if (delivered) queue_.push_back({now_ + config_.latency_ms, !from_authenticator, std::move(*delivered)});
    }
  }

  std::uint64_t run() {
    post(ap_.start(now_), true);
    post(sta_.start(now_), false);
    check_aborts();
    while (!first_abort_ && !(ap_.terminal() && sta_.terminal())) {
      std::optional<std::uint64_t> deadline;
      for (auto* e : {&ap_, &sta_}) {
        if (e->deadline() && (!deadline || *e->deadline() < *deadline)) deadline = e->deadline();
      }
      if (!queue_.empty() && (!deadline || queue_.front().at <= *deadline)) {
        auto next = std::move(queue_.front());
        queue_.pop_front();
        now_ = next.at;
        auto& dest = next.to_authenticator ? ap_ : sta_;
        const auto kind = frame_kind_from_byte(next.message.payload.empty() ? 0 : next.message.payload[0]);
        classical_.note(fmt::format("t={}ms {} <- {}", now_, dest.name(),
                                    kind ? fmt::format("Msg{}", frame_number(*kind)) : std::string("unknown frame")));
        post(dest.on_frame(next.message, now_), next.to_authenticator);
      } else if (deadline) {
        now_ = *deadline;
        ap_.on_tick(now_);
        sta_.on_tick(now_);
      } else {
        break;
      }
      check_aborts();
    }
    return now_;
  }

 private:
  HandshakeEndpoint& ap_;
  HandshakeEndpoint& sta_;
  channel::ClassicalChannel& classical_;
  const HandshakeConfig& config_;
  std::deque<InFlight> queue_;
  std::uint64_t now_ = 0;
  std::optional<AbortReason> first_abort_;
};

HandshakeResult collect(const HandshakeEndpoint& ap, const HandshakeEndpoint& sta, KeyMode mode,
                        std::optional<AbortReason> first_abort) {
  HandshakeResult result;
  result.mode = mode;
  result.established = ap.phase() == Phase::Established && sta.phase() == Phase::Established;
  result.abort_reason = first_abort;
  result.authenticator = ap.hierarchy();
  result.supplicant = sta.hierarchy();
  result.authenticator_phase = ap.phase();
  result.supplicant_phase = sta.phase();
  return result;
}

}  // namespace

HandshakeResult run_standard_handshake(std::span<const std::uint8_t> authenticator_pmk,
                                       std::span<const std::uint8_t> supplicant_pmk,
                                       channel::ClassicalChannel& classical, RandomStream& rng,
                                       const HandshakeConfig& config) {
  HandshakeEndpoint ap(Role::Authenticator, KeyMode::Standard, Bits(authenticator_pmk.begin(), authenticator_pmk.end()),
                       config.authenticator_addr, config.supplicant_addr, rng.split(), config.timeout_ms);
  HandshakeEndpoint sta(Role::Supplicant, KeyMode::Standard, Bits(supplicant_pmk.begin(), supplicant_pmk.end()),
                        config.supplicant_addr, config.authenticator_addr, rng.split(), config.timeout_ms);
  classical.note(fmt::format("handshake mode=standard prf={}", prf::kPrfName));
  Driver driver(ap, sta, classical, config);
  const auto elapsed = driver.run();
  auto result = collect(ap, sta, KeyMode::Standard, driver.first_abort());
  result.elapsed_ms = elapsed;
  return result;
}

HandshakeResult run_quantum_handshake(std::span<const std::uint8_t> authenticator_pmk,
                                      std::span<const std::uint8_t> supplicant_pmk, const QkdParams& qkd_params,
                                      const channel::ChannelConfig& cfg, const channel::EveStrategy& eve,
                                      channel::ClassicalChannel& classical, RandomStream& rng,
                                      const HandshakeConfig& config) {
  HandshakeEndpoint ap(Role::Authenticator, KeyMode::Quantum, Bits(authenticator_pmk.begin(), authenticator_pmk.end()),
                       config.authenticator_addr, config.supplicant_addr, rng.split(), config.timeout_ms);
  HandshakeEndpoint sta(Role::Supplicant, KeyMode::Quantum, Bits(supplicant_pmk.begin(), supplicant_pmk.end()),
                        config.supplicant_addr, config.authenticator_addr, rng.split(), config.timeout_ms);
  classical.note(fmt::format("handshake mode=quantum protocol={} prf={}", to_string(qkd_params.protocol),
                             prf::kPrfName));

  ap.begin_qkd();
  sta.begin_qkd();
  std::vector<QkdSessionResult> rounds;
  auto finish = [&](AbortReason reason) {
    classical.note(fmt::format("quantum phase aborted: {}", to_string(reason)));
    ap.abort(reason);
    sta.abort(reason);
    auto result = collect(ap, sta, KeyMode::Quantum, reason);
    result.qkd_rounds = std::move(rounds);
    return result;
  };

  const protocols::Parties parties{sta.name(), ap.name()};
  const QkdSessionResult* usable = nullptr;
  for (int attempt = 0; attempt <= kMaxQkdRetries && !usable; ++attempt) {
    try {
      rounds.push_back(run_qkd_session(qkd_params, cfg, eve, classical, rng, parties));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Io) throw;
      return finish(AbortReason::Timeout);
    }
    const auto& round = rounds.back();
    classical.note(fmt::format("qkd round {}: {} final_key={} bits", attempt, to_string(round.status),
                               round.final_key_length()));
    if (round.status == QkdStatus::QberAbort) return finish(AbortReason::QberThresholdExceeded);
    if (round.status == QkdStatus::KeyEstablished && round.final_key_length() >= kQuantumKeyBits) usable = &round;
  }
  if (!usable) return finish(AbortReason::RetriesExhausted);

  sta.install_quantum_key(std::span(usable->sender_key->bits).first(kQuantumKeyBits));
  ap.install_quantum_key(std::span(usable->receiver_key->bits).first(kQuantumKeyBits));

  Driver driver(ap, sta, classical, config);
  const auto elapsed = driver.run();
  auto result = collect(ap, sta, KeyMode::Quantum, driver.first_abort());
  result.qkd_rounds = std::move(rounds);
  result.elapsed_ms = elapsed;
  return result;
}

}  // namespace qkdlab::handshake
