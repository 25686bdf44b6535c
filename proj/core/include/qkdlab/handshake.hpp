#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/bits.hpp"
#include "qkdlab/channel.hpp"
#include "qkdlab/key_hierarchy.hpp"
#include "qkdlab/qkd_session.hpp"
#include "qkdlab/random.hpp"

namespace qkdlab::handshake {

enum class Role { Authenticator, Supplicant };

enum class Phase {
  Idle,
  Msg1Sent,
  Msg1Rcvd,
  Msg2Sent,
  Msg2Rcvd,
  Msg3Sent,
  Msg3Rcvd,
  Msg4Sent,
  Msg4Rcvd,
  QkdInProgress,
  Established,
  Aborted,
};

enum class AbortReason {
  ProtocolViolation,
  MicMismatch,
  Timeout,
  QberThresholdExceeded,
  QMicMismatch,
  RetriesExhausted,
};

std::string_view to_string(Role role);
std::string_view to_string(Phase phase);
std::string_view to_string(AbortReason reason);

/// Frame kind codes sit at pairwise Hamming distance >= 2, so a single bit
/// flip never turns one valid kind into another.
enum class FrameKind : std::uint8_t { Msg1 = 0x11, Msg2 = 0x22, Msg3 = 0x44, Msg4 = 0x88 };

std::optional<FrameKind> frame_kind_from_byte(std::uint8_t byte);
int frame_number(FrameKind kind);

inline constexpr std::string_view kFrameTag = "handshake.frame";
inline constexpr std::uint8_t kFlagInstall = 0x01;
inline constexpr std::uint8_t kFlagConfirm = 0x02;

/// Standard frame: kind, flags, 32-byte nonce, 16-byte MIC.
inline constexpr std::size_t kStandardFrameBytes = 50;
/// Quantum frame: kind, flags, 16-byte Q-MIC. No nonce field.
inline constexpr std::size_t kQuantumFrameBytes = 18;
inline constexpr std::size_t kMicBytes = 16;

/// Flags each message must carry.
std::uint8_t expected_flags(FrameKind kind);
/// Which role sends each message.
Role sender_of(FrameKind kind);

/// Truncated HMAC-SHA256 under the kck over the frame with its MIC zeroed.
ByteString frame_mic(std::span<const std::uint8_t> kck, std::span<const std::uint8_t> frame);

/// One party of the 4-way exchange. Advanced only by start(), on_frame()
/// and on_tick(); every (phase, frame) pair either transitions or aborts.
class HandshakeEndpoint {
 public:
  HandshakeEndpoint(Role role, KeyMode mode, Bits pmk, MacAddress self, MacAddress peer, RandomStream rng,
                    std::uint64_t timeout_ms);

  /// Authenticator emits Msg1; supplicant arms its deadline for Msg1.
  std::vector<channel::ClassicalMessage> start(std::uint64_t now_ms);
  std::vector<channel::ClassicalMessage> on_frame(const channel::ClassicalMessage& frame, std::uint64_t now_ms);
  void on_tick(std::uint64_t now_ms);

  /// Quantum mode only: hand the link over to the quantum channel.
  void begin_qkd();
  /// Quantum mode only: the 384-bit key produced by the QKD phase.
  void install_quantum_key(std::span<const std::uint8_t> quantum_key);
  void abort(AbortReason reason);

  Role role() const { return role_; }
  KeyMode mode() const { return mode_; }
  Phase phase() const { return phase_; }
  const std::vector<Phase>& phase_history() const { return history_; }
  std::optional<AbortReason> abort_reason() const { return reason_; }
  const std::optional<KeyHierarchy>& hierarchy() const { return hierarchy_; }
  std::optional<std::uint64_t> deadline() const { return deadline_; }
  const std::optional<Bits>& anonce() const { return anonce_; }
  const std::optional<Bits>& snonce() const { return snonce_; }
  std::string name() const;
  bool terminal() const { return phase_ == Phase::Established || phase_ == Phase::Aborted; }

 private:
  std::optional<FrameKind> awaited() const;
  void enter(Phase phase);
  channel::ClassicalMessage emit(FrameKind kind, std::span<const std::uint8_t> nonce);
  std::vector<channel::ClassicalMessage> handle_standard(FrameKind kind, std::span<const std::uint8_t> payload,
                                                         std::uint64_t now_ms);
  std::vector<channel::ClassicalMessage> handle_quantum(FrameKind kind, std::span<const std::uint8_t> payload,
                                                        std::uint64_t now_ms);
  void derive_standard_keys();

  Role role_;
  KeyMode mode_;
  Bits pmk_;
  MacAddress self_;
  MacAddress peer_;
  RandomStream rng_;
  std::uint64_t timeout_ms_;

  Phase phase_ = Phase::Idle;
  std::vector<Phase> history_{Phase::Idle};
  std::optional<AbortReason> reason_;
  std::optional<std::uint64_t> deadline_;
  std::optional<Bits> anonce_;
  std::optional<Bits> snonce_;
  std::optional<KeyHierarchy> hierarchy_;
  std::optional<Bits> qmic_;
};

struct HandshakeConfig {
  std::uint64_t timeout_ms = 100;
  std::uint64_t latency_ms = 1;
  MacAddress authenticator_addr{0x02, 0x00, 0x00, 0x00, 0x00, 0x01};
  MacAddress supplicant_addr{0x02, 0x00, 0x00, 0x00, 0x00, 0x02};
};

/// Fresh QKD rounds allowed after the first one fails to yield a usable key.
inline constexpr int kMaxQkdRetries = 3;

struct HandshakeResult {
  KeyMode mode = KeyMode::Standard;
  bool established = false;
  /// First abort raised by either party.
  std::optional<AbortReason> abort_reason;
  std::optional<KeyHierarchy> authenticator;
  std::optional<KeyHierarchy> supplicant;
  Phase authenticator_phase = Phase::Idle;
  Phase supplicant_phase = Phase::Idle;
  /// Quantum mode: every QKD round attempted, in order.
  std::vector<QkdSessionResult> qkd_rounds;
  std::uint64_t elapsed_ms = 0;

  std::string outcome() const;
};

Bits random_pmk(RandomStream& rng);

/// Nonce-based 4-way handshake with KCK-keyed MICs. Frames travel over
/// `classical`; its fault hook may drop or alter them.
HandshakeResult run_standard_handshake(std::span<const std::uint8_t> authenticator_pmk,
                                       std::span<const std::uint8_t> supplicant_pmk,
                                       channel::ClassicalChannel& classical, RandomStream& rng,
                                       const HandshakeConfig& config = {});

/// QKD phase (with bounded retries) followed by a nonce-free 4-message
/// exchange authenticated by Q-MIC. The supplicant is the QKD sender.
HandshakeResult run_quantum_handshake(std::span<const std::uint8_t> authenticator_pmk,
                                      std::span<const std::uint8_t> supplicant_pmk, const QkdParams& qkd_params,
                                      const channel::ChannelConfig& cfg, const channel::EveStrategy& eve,
                                      channel::ClassicalChannel& classical, RandomStream& rng,
                                      const HandshakeConfig& config = {});

}  // namespace qkdlab::handshake
