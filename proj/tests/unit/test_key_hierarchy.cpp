#include <gtest/gtest.h>

#include <string>

#include "qkdlab/errors.hpp"
#include "qkdlab/key_hierarchy.hpp"
#include "qkdlab/prf.hpp"
#include "qkdlab/random.hpp"

using namespace qkdlab;
using namespace qkdlab::handshake;

namespace {

Bits random_bits(std::size_t n, RandomStream& rng) {
  Bits b(n);
  for (auto& x : b) x = rng.bit();
  return b;
}

ByteString bytes_of(std::string_view s) { return ByteString(s.begin(), s.end()); }

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

const MacAddress kAp{0x02, 0, 0, 0, 0, 0x01};
const MacAddress kSta{0x02, 0, 0, 0, 0, 0x02};

}  // namespace

TEST(Prf, HmacSha256KnownAnswer) {
  // RFC 4231 test case 2.
  EXPECT_EQ(to_hex(prf::hmac_sha256(bytes_of("Jefe"), bytes_of("what do ya want for nothing?"))),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Prf, KdfKnownAnswer) {
  ByteString key(32);
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i);
  const auto out = prf::kdf_sha256(key, kPtkLabel, bytes_of("abc"), 384);
  EXPECT_EQ(to_hex(out),
            "7a0884e1af68bd9f2589dbfe24170655370c319d340ac5050dec64137f4ecc7b14baf1ee24ccb4c016542efe20adffd8");
  EXPECT_EQ(code_of([&] { prf::kdf_sha256(key, kPtkLabel, {}, 383); }), ErrorCode::BadLength);
}

TEST(DerivePtk, DeterministicAndSymmetric) {
  RandomStream rng(1);
  const auto pmk = random_bits(256, rng);
  const auto an = random_bits(256, rng);
  const auto sn = random_bits(256, rng);
  const auto ptk = derive_ptk_standard(pmk, an, sn, kAp, kSta);
  EXPECT_EQ(ptk.size(), 384U);
  EXPECT_EQ(derive_ptk_standard(pmk, an, sn, kAp, kSta), ptk);
  EXPECT_EQ(derive_ptk_standard(pmk, sn, an, kSta, kAp), ptk);
}

TEST(DerivePtk, AvalancheOnNonceBit) {
  RandomStream rng(2);
  for (int t = 0; t < 1000; ++t) {
    const auto pmk = random_bits(256, rng);
    const auto an = random_bits(256, rng);
    auto sn = random_bits(256, rng);
    const auto before = derive_ptk_standard(pmk, an, sn, kAp, kSta);
    sn[rng.below(256)] ^= 1U;
    const auto d = hamming_distance(before, derive_ptk_standard(pmk, an, sn, kAp, kSta));
    ASSERT_GE(d, 128U);
    ASSERT_LE(d, 256U);
  }
}

TEST(DerivePtk, RejectsWrongSizes) {
  RandomStream rng(3);
  const auto ok = random_bits(256, rng);
  EXPECT_EQ(code_of([&] { derive_ptk_standard(random_bits(255, rng), ok, ok, kAp, kSta); }), ErrorCode::BadLength);
  EXPECT_EQ(code_of([&] { derive_ptk_standard(ok, random_bits(128, rng), ok, kAp, kSta); }), ErrorCode::BadLength);
}

TEST(SplitPtk, StandardZeroKey) {
  const auto parts = split_ptk(Bits(384, 0), KeyMode::Standard);
  EXPECT_EQ(parts.kck, Bits(128, 0));
  EXPECT_EQ(parts.kek, Bits(128, 0));
  EXPECT_EQ(parts.tk, Bits(128, 0));
}

TEST(SplitPtk, StandardIsPositional) {
  RandomStream rng(4);
  const auto ptk = random_bits(384, rng);
  const auto parts = split_ptk(ptk, KeyMode::Standard);
  EXPECT_EQ(parts.kck, slice(ptk, 0, 128));
  EXPECT_EQ(parts.kek, slice(ptk, 128, 128));
  EXPECT_EQ(parts.tk, slice(ptk, 256, 128));
  EXPECT_EQ(concat(concat(parts.kck, parts.kek), parts.tk), ptk);
}

TEST(SplitPtk, QuantumDropsKck) {
  RandomStream rng(5);
  const auto ptk = random_bits(256, rng);
  const auto parts = split_ptk(ptk, KeyMode::Quantum);
  EXPECT_TRUE(parts.kck.empty());
  EXPECT_EQ(parts.kek, slice(ptk, 0, 128));
  EXPECT_EQ(parts.tk, slice(ptk, 128, 128));
}

TEST(SplitPtk, WrongLengthIsBadLength) {
  EXPECT_EQ(code_of([] { split_ptk(Bits(256, 0), KeyMode::Standard); }), ErrorCode::BadLength);
  EXPECT_EQ(code_of([] { split_ptk(Bits(384, 0), KeyMode::Quantum); }), ErrorCode::BadLength);
}

TEST(QuantumHierarchy, StripsTo256Bits) {
  RandomStream rng(6);
  const auto pmk = random_bits(256, rng);
  const auto qkey = random_bits(384, rng);
  const auto h = quantum_hierarchy(pmk, qkey);
  EXPECT_EQ(h.ptk, slice(qkey, 0, 256));
  EXPECT_TRUE(h.kck.empty());
  EXPECT_EQ(h.kek.size(), 128U);
  EXPECT_EQ(h.tk, slice(qkey, 128, 128));
}

TEST(QMic, XorOfKeyTailAndPmkHead) {
  RandomStream rng(7);
  const auto qkey = random_bits(384, rng);
  auto pmk = random_bits(256, rng);
  const auto qmic = compute_qmic(qkey, pmk);
  EXPECT_EQ(qmic, xor_bits(slice(qkey, 256, 128), slice(pmk, 0, 128)));
  EXPECT_EQ(compute_qmic(qkey, pmk), qmic);

  Bits zero_prefix = pmk;
  std::fill(zero_prefix.begin(), zero_prefix.begin() + 128, 0);
  EXPECT_EQ(compute_qmic(qkey, zero_prefix), slice(qkey, 256, 128));

  Bits cancelling = qkey;
  std::copy(pmk.begin(), pmk.begin() + 128, cancelling.begin() + 256);
  EXPECT_EQ(compute_qmic(cancelling, pmk), Bits(128, 0));

  EXPECT_EQ(code_of([&] { compute_qmic(random_bits(383, rng), pmk); }), ErrorCode::BadLength);
  EXPECT_EQ(code_of([&] { compute_qmic(qkey, random_bits(128, rng)); }), ErrorCode::BadLength);
}

TEST(DemoEncryption, RoundTripAndCounterSensitivity) {
  RandomStream rng(8);
  const auto tk = random_bits(128, rng);
  EXPECT_TRUE(encrypt_demo_frame(tk, {}, 0).empty());
  for (int t = 0; t < 1000; ++t) {
    ByteString payload(1 + rng.below(100));
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(256));
    const auto counter = rng.next() >> 1;
    const auto ct = encrypt_demo_frame(tk, payload, counter);
    ASSERT_EQ(encrypt_demo_frame(tk, ct, counter), payload);
    ASSERT_NE(encrypt_demo_frame(tk, payload, counter + 1), ct);
  }
}

TEST(DemoEncryption, KekWrapsGroupKey) {
  RandomStream rng(9);
  const auto kek = random_bits(128, rng);
  const ByteString gtk(16, 0x5a);
  const auto wrapped = wrap_group_key(kek, gtk);
  EXPECT_NE(wrapped, gtk);
  EXPECT_EQ(wrap_group_key(kek, wrapped), gtk);
}
