#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "qkdlab/handshake.hpp"
#include "qkdlab/sift_wire.hpp"
#include "qkdlab/wire.hpp"

using namespace qkdlab;
using namespace qkdlab::handshake;
using channel::ClassicalChannel;
using channel::ClassicalMessage;

namespace {

bool is_frame(const ClassicalMessage& m, FrameKind kind) {
  return m.tag == kFrameTag && !m.payload.empty() && m.payload[0] == static_cast<std::uint8_t>(kind);
}

std::size_t frame_count(const ClassicalChannel& ch) {
  return static_cast<std::size_t>(std::count_if(ch.transcript().begin(), ch.transcript().end(),
                                                [](const auto& e) { return e.message.tag == kFrameTag; }));
}

bool contains(const ByteString& haystack, const ByteString& needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

QkdParams default_qkd() {
  QkdParams p;
  p.protocol = Protocol::SARG04;
  p.n_pulses = 20000;
  return p;
}

HandshakeResult quantum_run(std::uint64_t seed, ClassicalChannel& ch, const channel::EveStrategy& eve = {},
                            const QkdParams& params = default_qkd(),
                            const channel::ChannelConfig& cfg = channel::ChannelConfig::ideal()) {
  RandomStream rng(seed);
  const auto pmk = random_pmk(rng);
  return run_quantum_handshake(pmk, pmk, params, cfg, eve, ch, rng);
}

}  // namespace

// --- standard mode ------------------------------------------------------------

TEST(StandardHandshake, HonestRunEstablishes) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomStream rng(seed);
    const auto pmk = random_pmk(rng);
    ClassicalChannel ch;
    const auto r = run_standard_handshake(pmk, pmk, ch, rng);
    ASSERT_TRUE(r.established) << r.outcome();
    ASSERT_TRUE(r.authenticator && r.supplicant);
    EXPECT_EQ(*r.authenticator, *r.supplicant);
    EXPECT_EQ(r.authenticator->ptk.size(), 384U);
    EXPECT_EQ(r.authenticator->tk.size(), 128U);
    EXPECT_EQ(frame_count(ch), 4U);
    EXPECT_EQ(r.elapsed_ms, 4U);
    EXPECT_EQ(r.outcome(), "Established");
  }
}

TEST(StandardHandshake, MismatchedPmkFailsAtMsg2) {
  RandomStream rng(2);
  const auto a = random_pmk(rng);
  const auto b = random_pmk(rng);
  ClassicalChannel ch;
  const auto r = run_standard_handshake(a, b, ch, rng);
  EXPECT_FALSE(r.established);
  ASSERT_TRUE(r.abort_reason);
  EXPECT_EQ(*r.abort_reason, AbortReason::MicMismatch);
  EXPECT_EQ(r.authenticator_phase, Phase::Aborted);
  EXPECT_EQ(r.supplicant_phase, Phase::Msg2Sent);
  EXPECT_EQ(frame_count(ch), 2U);
}

TEST(StandardHandshake, DroppedMsg3TimesOut) {
  RandomStream rng(3);
  const auto pmk = random_pmk(rng);
  ClassicalChannel ch;
  ch.set_fault_hook([](ClassicalMessage& m) { return !is_frame(m, FrameKind::Msg3); });
  HandshakeConfig cfg;
  cfg.timeout_ms = 50;
  const auto r = run_standard_handshake(pmk, pmk, ch, rng, cfg);
  EXPECT_FALSE(r.established);
  ASSERT_TRUE(r.abort_reason);
  EXPECT_EQ(*r.abort_reason, AbortReason::Timeout);
  EXPECT_GE(r.elapsed_ms, 50U);
}

TEST(StandardHandshake, EverySingleBitFlipInMicFramesIsCaught) {
  RandomStream base(4);
  const auto pmk = random_pmk(base);
  for (auto kind : {FrameKind::Msg2, FrameKind::Msg3, FrameKind::Msg4}) {
    for (std::size_t bit = 0; bit < kStandardFrameBytes * 8; ++bit) {
      ClassicalChannel ch;
      ch.set_fault_hook([&](ClassicalMessage& m) {
        if (is_frame(m, kind)) m.payload[bit / 8] ^= static_cast<std::uint8_t>(0x80U >> (bit % 8));
        return true;
      });
      RandomStream rng(40);
      const auto r = run_standard_handshake(pmk, pmk, ch, rng);
      ASSERT_FALSE(r.established) << "Msg" << frame_number(kind) << " bit " << bit;
      ASSERT_TRUE(r.abort_reason);
      ASSERT_EQ(*r.abort_reason, AbortReason::MicMismatch) << "Msg" << frame_number(kind) << " bit " << bit;
    }
  }
}

TEST(StandardHandshake, FramesCarryNonces) {
  RandomStream rng(5);
  const auto pmk = random_pmk(rng);
  ClassicalChannel ch;
  run_standard_handshake(pmk, pmk, ch, rng);
  for (const auto& e : ch.transcript()) EXPECT_EQ(e.message.payload.size(), kStandardFrameBytes);
}

// --- quantum mode -------------------------------------------------------------

TEST(QuantumHandshake, HonestRunEstablishesWithoutNonces) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ClassicalChannel ch;
    const auto r = quantum_run(seed, ch);
    ASSERT_TRUE(r.established) << r.outcome();
    EXPECT_EQ(r.authenticator->tk, r.supplicant->tk);
    EXPECT_EQ(r.authenticator->ptk.size(), 256U);
    EXPECT_TRUE(r.authenticator->kck.empty());
    EXPECT_EQ(r.qkd_rounds.size(), 1U);

    const auto tk = pack_bits(r.authenticator->tk);
    const auto kek = pack_bits(r.authenticator->kek);
    for (const auto& e : ch.transcript()) {
      if (e.message.tag == kFrameTag) {
        EXPECT_EQ(e.message.payload.size(), kQuantumFrameBytes);
      }
      EXPECT_FALSE(contains(e.message.payload, tk)) << e.message.tag;
      EXPECT_FALSE(contains(e.message.payload, kek)) << e.message.tag;
    }
    EXPECT_EQ(frame_count(ch), 4U);
  }
}

TEST(QuantumHandshake, EndpointsNeverHoldNonces) {
  RandomStream rng(6);
  const auto pmk = random_pmk(rng);
  HandshakeEndpoint ap(Role::Authenticator, KeyMode::Quantum, pmk, {}, {}, RandomStream(1), 100);
  ap.begin_qkd();
  ap.install_quantum_key(Bits(384, 1));
  ap.start(0);
  EXPECT_FALSE(ap.anonce());
  EXPECT_FALSE(ap.snonce());
}

TEST(QuantumHandshake, QMicTamperIsDetected) {
  for (auto kind : {FrameKind::Msg1, FrameKind::Msg2, FrameKind::Msg3, FrameKind::Msg4}) {
    for (std::size_t bit = 0; bit < 128; bit += 9) {
      ClassicalChannel ch;
      ch.set_fault_hook([&](ClassicalMessage& m) {
        if (is_frame(m, kind)) m.payload[2 + bit / 8] ^= static_cast<std::uint8_t>(0x80U >> (bit % 8));
        return true;
      });
      QkdParams params = default_qkd();
      params.n_pulses = 4000;
      const auto r = quantum_run(7, ch, {}, params);
      ASSERT_FALSE(r.established);
      ASSERT_TRUE(r.abort_reason);
      EXPECT_EQ(*r.abort_reason, AbortReason::QMicMismatch) << "Msg" << frame_number(kind) << " bit " << bit;
    }
  }
}

TEST(QuantumHandshake, InterceptResendAbortsBeforeAnyFrame) {
  for (auto protocol : {Protocol::BB84, Protocol::SARG04}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ClassicalChannel ch;
      QkdParams params = default_qkd();
      params.protocol = protocol;
      const auto r = quantum_run(seed, ch, channel::EveStrategy::intercept_resend(1.0), params);
      ASSERT_TRUE(r.abort_reason);
      EXPECT_EQ(*r.abort_reason, AbortReason::QberThresholdExceeded);
      EXPECT_EQ(frame_count(ch), 0U);
      EXPECT_FALSE(r.authenticator.has_value());
    }
  }
}

TEST(QuantumHandshake, RetriesThenGivesUp) {
  ClassicalChannel ch;
  QkdParams params = default_qkd();
  params.n_pulses = 1000;  // about 250 sifted bits: never 384 final bits
  const auto r = quantum_run(8, ch, {}, params);
  ASSERT_TRUE(r.abort_reason);
  EXPECT_EQ(*r.abort_reason, AbortReason::RetriesExhausted);
  EXPECT_EQ(r.qkd_rounds.size(), static_cast<std::size_t>(kMaxQkdRetries + 1));
  EXPECT_EQ(frame_count(ch), 0U);
}

TEST(QuantumHandshake, RetryCanSucceed) {
  // Loss is high enough that some rounds fall short of 384 bits.
  QkdParams params = default_qkd();
  params.n_pulses = 4400;
  const channel::ChannelConfig cfg(0.0, 0.5, quantum::SourceModel::single_photon());
  bool saw_retry_success = false;
  for (std::uint64_t seed = 1; seed <= 60 && !saw_retry_success; ++seed) {
    ClassicalChannel ch;
    const auto r = quantum_run(seed, ch, {}, params, cfg);
    if (r.established && r.qkd_rounds.size() > 1) saw_retry_success = true;
  }
  EXPECT_TRUE(saw_retry_success);
}

TEST(QuantumHandshake, LostQkdMessageTimesOut) {
  ClassicalChannel ch;
  ch.set_fault_hook([](ClassicalMessage& m) { return m.tag != wire::kVerdict; });
  const auto r = quantum_run(9, ch);
  ASSERT_TRUE(r.abort_reason);
  EXPECT_EQ(*r.abort_reason, AbortReason::Timeout);
}

TEST(QuantumHandshake, UnreconciledKeysFailQMic) {
  // A single Winnow pass leaves residual errors at 5% QBER; Q-MIC catches them.
  QkdParams params = default_qkd();
  params.protocol = Protocol::BB84;
  params.reconciliation = post::Reconciliation::Winnow;
  const channel::ChannelConfig cfg(0.05, 0.0, quantum::SourceModel::single_photon());
  ClassicalChannel ch;
  const auto r = quantum_run(10, ch, {}, params, cfg);
  ASSERT_TRUE(r.abort_reason);
  EXPECT_EQ(*r.abort_reason, AbortReason::QMicMismatch);
}

// --- state machine totality and fuzzing -----------------------------------------

namespace {

struct Pair {
  HandshakeEndpoint ap;
  HandshakeEndpoint sta;
};

Pair make_pair(KeyMode mode, const Bits& pmk, const Bits& qkey) {
  const MacAddress a{2, 0, 0, 0, 0, 1};
  const MacAddress s{2, 0, 0, 0, 0, 2};
  Pair p{HandshakeEndpoint(Role::Authenticator, mode, pmk, a, s, RandomStream(1001), 100),
         HandshakeEndpoint(Role::Supplicant, mode, pmk, s, a, RandomStream(2002), 100)};
  if (mode == KeyMode::Quantum) {
    p.ap.begin_qkd();
    p.sta.begin_qkd();
    p.ap.install_quantum_key(qkey);
    p.sta.install_quantum_key(qkey);
  }
  return p;
}

/// The four frames of an honest exchange, in order.
std::vector<ClassicalMessage> legal_frames(KeyMode mode, const Bits& pmk, const Bits& qkey) {
  auto p = make_pair(mode, pmk, qkey);
  std::vector<ClassicalMessage> frames;
  auto m1 = p.ap.start(0);
  p.sta.start(0);
  frames.push_back(m1.at(0));
  auto m2 = p.sta.on_frame(frames[0], 1);
  frames.push_back(m2.at(0));
  auto m3 = p.ap.on_frame(frames[1], 2);
  frames.push_back(m3.at(0));
  auto m4 = p.sta.on_frame(frames[2], 3);
  frames.push_back(m4.at(0));
  p.ap.on_frame(frames[3], 4);
  EXPECT_EQ(p.ap.phase(), Phase::Established);
  EXPECT_EQ(p.sta.phase(), Phase::Established);
  return frames;
}

}  // namespace

TEST(StateMachine, EveryPhaseFrameGivesTransitionOrAbort) {
  RandomStream rng(11);
  const auto pmk = random_pmk(rng);
  Bits qkey(384);
  for (auto& b : qkey) b = rng.bit();
  for (auto mode : {KeyMode::Standard, KeyMode::Quantum}) {
    const auto frames = legal_frames(mode, pmk, qkey);
    auto junk = frames[0];
    junk.payload[0] = 0x5A;
    std::vector<ClassicalMessage> candidates = frames;
    candidates.push_back(junk);

    // Reach each prefix of the legal run, then offer every candidate frame.
    for (std::size_t prefix = 0; prefix <= 4; ++prefix) {
      for (const auto& offered : candidates) {
        for (bool to_ap : {true, false}) {
          auto p = make_pair(mode, pmk, qkey);
          p.ap.start(0);
          p.sta.start(0);
          for (std::size_t i = 0; i < prefix; ++i) {
            (i % 2 == 0 ? p.sta : p.ap).on_frame(frames[i], i + 1);
          }
          auto& target = to_ap ? p.ap : p.sta;
          const auto before = target.phase();
          const auto history_before = target.phase_history().size();
          EXPECT_NO_THROW(target.on_frame(offered, prefix + 1));
          if (before == Phase::Established || before == Phase::Aborted) {
            EXPECT_EQ(target.phase(), before);
          } else {
            EXPECT_GT(target.phase_history().size(), history_before);
            EXPECT_NE(target.phase(), before);
          }
        }
      }
    }
  }
}

TEST(StateMachine, FuzzedOrderingsNeverEstablishWithoutLegalSequence) {
  RandomStream rng(12);
  const auto pmk = random_pmk(rng);
  Bits qkey(384);
  for (auto& b : qkey) b = rng.bit();

  for (auto mode : {KeyMode::Standard, KeyMode::Quantum}) {
    const auto frames = legal_frames(mode, pmk, qkey);
    std::vector<ClassicalMessage> pool = frames;
    for (const auto& f : frames) {
      auto flipped = f;
      flipped.payload[1 + rng.below(f.payload.size() - 1)] ^= 0x01;
      pool.push_back(flipped);
    }

    std::size_t established_runs = 0;
    const int orderings = 10000;
    for (int t = 0; t < orderings; ++t) {
      auto p = make_pair(mode, pmk, qkey);
      p.ap.start(0);
      p.sta.start(0);
      std::vector<int> to_ap;
      std::vector<int> to_sta;
      std::optional<std::size_t> ap_done;
      std::optional<std::size_t> sta_done;

      // Random-length sequence of random frames to random recipients; legal
      // frames are drawn more often so complete runs actually occur.
      const auto steps = 1 + rng.below(8);
      for (std::uint64_t s = 0; s < steps; ++s) {
        const int idx = rng.bernoulli(0.7) ? static_cast<int>(rng.below(4)) : static_cast<int>(rng.below(pool.size()));
        const bool ap_target = rng.bit() == 1;
        auto& target = ap_target ? p.ap : p.sta;
        (ap_target ? to_ap : to_sta).push_back(idx);
        target.on_frame(pool[idx], s + 1);
        if (p.ap.phase() == Phase::Established && !ap_done) ap_done = to_ap.size();
        if (p.sta.phase() == Phase::Established && !sta_done) sta_done = to_sta.size();
      }

      // Oracle: an endpoint is Established only if the frames it received up
      // to that moment are exactly its legal sequence.
      if (ap_done) {
        ASSERT_EQ(std::vector<int>(to_ap.begin(), to_ap.begin() + static_cast<std::ptrdiff_t>(*ap_done)),
                  (std::vector<int>{1, 3}))
            << "ordering " << t;
      }
      if (sta_done) {
        ASSERT_EQ(std::vector<int>(to_sta.begin(), to_sta.begin() + static_cast<std::ptrdiff_t>(*sta_done)),
                  (std::vector<int>{0, 2}))
            << "ordering " << t;
      }
      if (ap_done && sta_done) ++established_runs;
    }
    EXPECT_GT(established_runs, 0U) << to_string(mode);
  }
}

TEST(StateMachine, TimeoutFiresOnlyAfterDeadline) {
  RandomStream rng(13);
  const auto pmk = random_pmk(rng);
  HandshakeEndpoint sta(Role::Supplicant, KeyMode::Standard, pmk, {}, {}, RandomStream(1), 100);
  sta.start(0);
  sta.on_tick(99);
  EXPECT_EQ(sta.phase(), Phase::Idle);
  sta.on_tick(100);
  EXPECT_EQ(sta.phase(), Phase::Aborted);
  EXPECT_EQ(*sta.abort_reason(), AbortReason::Timeout);
}
