#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qkdlab/protocols.hpp"
#include "qkdlab/sift_wire.hpp"

using namespace qkdlab;
using namespace qkdlab::protocols;
using channel::ChannelConfig;
using channel::ClassicalChannel;
using channel::EveStrategy;

namespace {

struct Run {
  RawKeyRecord record;
  SiftedKey sifted;
  ClassicalChannel classical;
};

Run run(Protocol protocol, std::size_t n, const ChannelConfig& cfg, const EveStrategy& eve, std::uint64_t seed) {
  RandomStream rng(seed);
  Run r;
  r.record = exchange(protocol, n, cfg, eve, rng);
  r.sifted = sift(r.record, r.classical, rng);
  return r;
}

double binomial_sigma(double p, double n) { return std::sqrt(std::max(p * (1 - p), 1e-9) / n); }

}  // namespace

TEST(Exchange, RecordsOneEntryPerPulse) {
  for (auto protocol : {Protocol::BB84, Protocol::SARG04}) {
    auto r = run(protocol, 500, ChannelConfig::ideal(), EveStrategy::none(), 1);
    EXPECT_EQ(r.record.size(), 500U);
    EXPECT_EQ(r.record.sender_bases.size(), 500U);
    EXPECT_EQ(r.record.receiver_outcomes.size(), 500U);
    for (std::size_t i = 0; i < 500; ++i) {
      EXPECT_EQ(quantum::basis_of(r.record.sender_states[i]), r.record.sender_bases[i]);
      if (protocol == Protocol::SARG04) {
        EXPECT_EQ(r.record.sender_bits[i], static_cast<std::uint8_t>(r.record.sender_bases[i]));
      } else {
        EXPECT_EQ(r.record.sender_bits[i], quantum::bit_of(r.record.sender_states[i]));
      }
    }
  }
}

TEST(Exchange, SameSeedSameRecord) {
  for (auto protocol : {Protocol::BB84, Protocol::SARG04}) {
    const auto a = run(protocol, 2000, ChannelConfig::ideal(), EveStrategy::intercept_resend(0.5), 9);
    const auto b = run(protocol, 2000, ChannelConfig::ideal(), EveStrategy::intercept_resend(0.5), 9);
    EXPECT_EQ(a.sifted.sender_bits, b.sifted.sender_bits);
    EXPECT_EQ(a.sifted.kept_indices, b.sifted.kept_indices);
    EXPECT_EQ(a.classical.transcript().size(), b.classical.transcript().size());
  }
}

TEST(Sift, IdealChannelGivesIdenticalKeys) {
  for (auto protocol : {Protocol::BB84, Protocol::SARG04}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto r = run(protocol, 20000, ChannelConfig::ideal(), EveStrategy::none(), seed);
      EXPECT_EQ(r.sifted.sender_bits, r.sifted.receiver_bits);
      EXPECT_GT(r.sifted.size(), 0U);
      EXPECT_EQ(sifted_error_rate(r.sifted), 0.0);
      EXPECT_EQ(r.sifted.leakage_bits, 0U);
    }
  }
}

struct TreeCase {
  Protocol protocol;
  double intercept;
  double flip;
  double loss;
};

class OutcomeTree : public ::testing::TestWithParam<TreeCase> {};

TEST_P(OutcomeTree, SimulationMatchesEnumeration) {
  const auto c = GetParam();
  const std::size_t n = 100000;
  const ChannelConfig cfg(c.flip, c.loss, quantum::SourceModel::single_photon());
  const auto eve = c.intercept > 0 ? EveStrategy::intercept_resend(c.intercept) : EveStrategy::none();
  const auto r = run(c.protocol, n, cfg, eve, 77);

  const auto want = c.protocol == Protocol::BB84 ? oracle::bb84_tree(c.intercept, c.flip, 1.0 - c.loss)
                                                 : oracle::sarg04_tree(c.intercept, c.flip, 1.0 - c.loss);
  const double sift = r.sifted.size() / static_cast<double>(n);
  EXPECT_NEAR(sift, want.sift_fraction, 5 * binomial_sigma(want.sift_fraction, n));
  EXPECT_NEAR(sifted_error_rate(r.sifted), want.qber, 5 * binomial_sigma(want.qber, r.sifted.size()) + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(
    Grid, OutcomeTree,
    ::testing::Values(TreeCase{Protocol::BB84, 0.0, 0.0, 0.0}, TreeCase{Protocol::BB84, 1.0, 0.0, 0.0},
                      TreeCase{Protocol::BB84, 0.5, 0.03, 0.2}, TreeCase{Protocol::BB84, 0.0, 0.1, 0.5},
                      TreeCase{Protocol::SARG04, 0.0, 0.0, 0.0}, TreeCase{Protocol::SARG04, 1.0, 0.0, 0.0},
                      TreeCase{Protocol::SARG04, 0.5, 0.03, 0.2}, TreeCase{Protocol::SARG04, 0.0, 0.1, 0.5}));

TEST(OutcomeTree, AnalyticAnchors) {
  EXPECT_NEAR(oracle::bb84_tree(0, 0).sift_fraction, 0.5, 1e-12);
  EXPECT_NEAR(oracle::sarg04_tree(0, 0).sift_fraction, 0.25, 1e-12);
  for (double p : {0.25, 0.5, 0.75, 1.0}) EXPECT_NEAR(oracle::bb84_tree(p, 0).qber, p / 4, 1e-12);
  EXPECT_NEAR(oracle::sarg04_tree(1.0, 0).sift_fraction, 0.375, 1e-12);
  EXPECT_NEAR(oracle::sarg04_tree(1.0, 0).qber, 1.0 / 3.0, 1e-12);
}

TEST(Sift, WeakLaserDetectionRate) {
  const double mu = 0.5;
  const double loss = 0.1;
  const std::size_t n = 100000;
  const ChannelConfig cfg(0.0, loss, quantum::SourceModel::weak_laser(mu));
  const auto r = run(Protocol::BB84, n, cfg, EveStrategy::none(), 3);
  const double detect = (1.0 - oracle::poisson_pmf(mu, 0)) * (1.0 - loss);
  const double want = oracle::bb84_tree(0, 0, detect).sift_fraction;
  EXPECT_NEAR(r.sifted.size() / static_cast<double>(n), want, 5 * binomial_sigma(want, n));
}

TEST(Sift, Bb84AnnouncementsCarryNoBitValues) {
  RandomStream rng(4);
  const auto record = bb84_exchange(5000, ChannelConfig::ideal(), EveStrategy::none(), rng);
  // Complement every bit on both sides; bases and detections stay put.
  auto mirrored = record;
  for (std::size_t i = 0; i < mirrored.size(); ++i) {
    mirrored.sender_bits[i] ^= 1U;
    mirrored.sender_states[i] = quantum::orthogonal(mirrored.sender_states[i]);
    if (quantum::detected(mirrored.receiver_outcomes[i])) {
      mirrored.receiver_outcomes[i] = quantum::outcome_for(quantum::bit_of(mirrored.receiver_outcomes[i]) ^ 1U);
    }
  }
  ClassicalChannel a;
  ClassicalChannel b;
  const auto ka = bb84_sift(record, a);
  const auto kb = bb84_sift(mirrored, b);
  ASSERT_EQ(a.transcript().size(), b.transcript().size());
  for (std::size_t i = 0; i < a.transcript().size(); ++i) {
    EXPECT_EQ(a.transcript()[i].message, b.transcript()[i].message);
  }
  EXPECT_EQ(ka.kept_indices, kb.kept_indices);
  EXPECT_NE(ka.sender_bits, kb.sender_bits);
}

TEST(Sift, Sarg04CandidatePairsSpanBothBases) {
  const auto r = run(Protocol::SARG04, 5000, ChannelConfig::ideal(), EveStrategy::none(), 5);
  const auto ann = sift_wire::decode(r.classical.eve_view(), Protocol::SARG04);
  std::size_t announced = 0;
  for (std::size_t i = 0; i < ann.candidates.size(); ++i) {
    if (!ann.candidates[i]) continue;
    ++announced;
    const auto [first, second] = *ann.candidates[i];
    EXPECT_NE(quantum::basis_of(first), quantum::basis_of(second));
    EXPECT_TRUE(first == r.record.sender_states[i] || second == r.record.sender_states[i]);
  }
  EXPECT_EQ(announced, r.record.size());
  for (const auto& e : r.classical.transcript()) EXPECT_NE(e.message.tag.find("sift."), std::string::npos);
}

TEST(Eve, InterceptResolutionIsCorrectAndScoped) {
  for (auto protocol : {Protocol::BB84, Protocol::SARG04}) {
    auto r = run(protocol, 20000, ChannelConfig::ideal(), EveStrategy::intercept_resend(1.0), 6);
    const auto view = r.classical.eve_view();
    const auto eve = channel::eve_resolve_intercepts(r.record.eve, view, protocol);
    EXPECT_GT(eve.resolved_bits.size(), 0U);
    for (const auto& [idx, bit] : eve.resolved_bits) {
      EXPECT_TRUE(eve.intercepted.count(idx));
      EXPECT_EQ(bit, r.record.sender_bits[idx]) << "pulse " << idx;
    }
  }
}

TEST(Eve, PhotonNumberSplittingResolution) {
  const auto cfg = ChannelConfig(0.0, 0.0, quantum::SourceModel::weak_laser(0.5));
  for (auto protocol : {Protocol::BB84, Protocol::SARG04}) {
    auto r = run(protocol, 100000, cfg, EveStrategy::photon_number_splitting(), 8);
    EXPECT_EQ(sifted_error_rate(r.sifted), 0.0);
    RandomStream rng(99);
    const auto eve = channel::eve_resolve_pns(r.record.eve, r.classical.eve_view(), protocol, rng);

    std::size_t tagged = 0;
    std::size_t resolved = 0;
    for (auto idx : r.sifted.kept_indices) {
      if (!eve.stored_photons.count(idx)) continue;
      ++tagged;
      if (auto it = eve.resolved_bits.find(idx); it != eve.resolved_bits.end()) {
        ++resolved;
        EXPECT_EQ(it->second, r.record.sender_bits[idx]);
      }
    }
    for (const auto& [idx, bit] : eve.resolved_bits) EXPECT_TRUE(eve.stored_photons.count(idx));
    ASSERT_GT(tagged, 1000U);
    const double fraction = resolved / static_cast<double>(tagged);
    const double want = protocol == Protocol::BB84 ? 1.0 : oracle::usd_success(45.0);
    EXPECT_NEAR(fraction, want, 5 * binomial_sigma(want, tagged) + 1e-12) << to_string(protocol);
  }
}

TEST(Eve, UnambiguousDiscriminationOracleMatchesConstant) {
  EXPECT_NEAR(oracle::usd_success(45.0), channel::kSarg04PnsResolveProbability, 1e-15);
}
