#include <gtest/gtest.h>

#include "qkdlab/channel.hpp"
#include "qkdlab/errors.hpp"

using namespace qkdlab;
using namespace qkdlab::channel;
using quantum::Polarization;
using quantum::PhotonPulse;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(ChannelConfig, Validation) {
  EXPECT_EQ(code_of([] { ChannelConfig(0.6, 0.0, quantum::SourceModel::single_photon()); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { ChannelConfig(-0.1, 0.0, quantum::SourceModel::single_photon()); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { ChannelConfig(0.0, 1.0, quantum::SourceModel::single_photon()); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { EveStrategy::intercept_resend(1.5); }), ErrorCode::ConfigInvalid);
  EXPECT_NO_THROW(ChannelConfig(0.5, 0.99, quantum::SourceModel::single_photon()));
}

TEST(Transmit, IdealChannelIsIdentity) {
  RandomStream rng(1);
  EveKnowledge eve;
  for (std::size_t i = 0; i < 1000; ++i) {
    PhotonPulse pulse{1, static_cast<Polarization>(i % 4)};
    EXPECT_EQ(transmit(pulse, i, ChannelConfig::ideal(), EveStrategy::none(), eve, rng), pulse);
  }
  EXPECT_TRUE(eve.intercepted.empty());
}

TEST(Transmit, FlipAndLossRates) {
  RandomStream rng(2);
  EveKnowledge eve;
  const ChannelConfig cfg(0.1, 0.3, quantum::SourceModel::single_photon());
  const int n = 100000;
  int lost = 0;
  int flipped = 0;
  for (int i = 0; i < n; ++i) {
    const auto out = transmit({1, Polarization::D}, i, cfg, EveStrategy::none(), eve, rng);
    if (out.is_vacuum()) {
      ++lost;
    } else if (out.polarization == Polarization::A) {
      ++flipped;
    } else {
      EXPECT_EQ(out.polarization, Polarization::D);
    }
  }
  EXPECT_NEAR(lost / static_cast<double>(n), 0.3, 0.005);
  EXPECT_NEAR(flipped / static_cast<double>(n - lost), 0.1, 0.005);
}

TEST(Transmit, InterceptResendFraction) {
  RandomStream rng(3);
  EveKnowledge eve;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const auto out = transmit({1, Polarization::H}, i, ChannelConfig::ideal(), EveStrategy::intercept_resend(0.4), eve, rng);
    EXPECT_EQ(out.photon_count, 1U);
    if (auto it = eve.intercepted.find(i); it != eve.intercepted.end()) {
      // Eve re-emits exactly what she measured.
      EXPECT_EQ(out.polarization, quantum::encode(it->second.bit, it->second.basis));
      if (it->second.basis == quantum::Basis::Rectilinear) {
        EXPECT_EQ(it->second.bit, 0);
      }
    } else {
      EXPECT_EQ(out.polarization, Polarization::H);
    }
  }
  EXPECT_NEAR(eve.intercepted.size() / static_cast<double>(n), 0.4, 0.01);
}

TEST(Transmit, InterceptSkipsVacuum) {
  RandomStream rng(4);
  EveKnowledge eve;
  for (int i = 0; i < 100; ++i) {
    transmit({0, Polarization::H}, i, ChannelConfig::ideal(), EveStrategy::intercept_resend(1.0), eve, rng);
  }
  EXPECT_TRUE(eve.intercepted.empty());
}

TEST(Transmit, PhotonNumberSplittingTakesOneOfMany) {
  RandomStream rng(5);
  EveKnowledge eve;
  const auto pns = EveStrategy::photon_number_splitting();
  EXPECT_EQ(transmit({1, Polarization::V}, 0, ChannelConfig::ideal(), pns, eve, rng), (PhotonPulse{1, Polarization::V}));
  EXPECT_EQ(transmit({0, Polarization::V}, 1, ChannelConfig::ideal(), pns, eve, rng), (PhotonPulse{0, Polarization::V}));
  EXPECT_EQ(transmit({3, Polarization::A}, 2, ChannelConfig::ideal(), pns, eve, rng), (PhotonPulse{2, Polarization::A}));
  ASSERT_EQ(eve.stored_photons.size(), 1U);
  EXPECT_EQ(eve.stored_photons.at(2), Polarization::A);
}

TEST(ClassicalChannel, LogsEveryMessage) {
  ClassicalChannel ch;
  ch.deliver({"alice", "x", {1, 2}});
  ch.send({"bob", "y", {3}});
  ASSERT_EQ(ch.message_count(), 2U);
  EXPECT_EQ(ch.transcript()[1].message.tag, "y");
  EXPECT_EQ(ch.eve_view().size(), 2U);
}

TEST(ClassicalChannel, FaultHookDropsAndCorrupts) {
  ClassicalChannel ch;
  ch.set_fault_hook([](ClassicalMessage& m) {
    if (m.tag == "drop") return false;
    if (m.tag == "flip") m.payload[0] ^= 1;
    return true;
  });
  EXPECT_FALSE(ch.send({"a", "drop", {1}}).has_value());
  const auto flipped = ch.send({"a", "flip", {4}});
  ASSERT_TRUE(flipped);
  EXPECT_EQ(flipped->payload[0], 5);
  EXPECT_EQ(code_of([&] { ch.deliver({"a", "drop", {}}); }), ErrorCode::Io);
  EXPECT_FALSE(ch.transcript()[0].delivered);
  EXPECT_EQ(ch.eve_view().size(), 1U);
}

TEST(ClassicalChannel, NotesKeepTheirPosition) {
  ClassicalChannel ch;
  ch.note("start");
  ch.deliver({"a", "x", {}});
  ch.note("after one");
  ASSERT_EQ(ch.notes().size(), 2U);
  EXPECT_EQ(ch.notes()[0].after_messages, 0U);
  EXPECT_EQ(ch.notes()[1].after_messages, 1U);
}
