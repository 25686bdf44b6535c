#include "qkdlab/key_hierarchy.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/prf.hpp"

namespace qkdlab::handshake {

std::string_view to_string(KeyMode mode) {
  return mode == KeyMode::Standard ? "standard" : "quantum";
}

namespace {

void require_bits(std::span<const std::uint8_t> bits, std::size_t expected, std::string_view what) {
  if (bits.size() != expected) {
    throw Error(ErrorCode::BadLength, fmt::format("{} has {} bits, expected {}", what, bits.size(), expected));
  }
}

void append(ByteString& out, std::span<const std::uint8_t> bytes) { out.insert(out.end(), bytes.begin(), bytes.end()); }

ByteString keystream_xor(std::span<const std::uint8_t> key_bits, std::span<const std::uint8_t> payload,
                         std::uint64_t counter) {
  const auto key = pack_bits(key_bits);
  ByteString out(payload.begin(), payload.end());
  std::size_t offset = 0;
  for (std::uint32_t block = 0; offset < out.size(); ++block) {
    ByteString input;
    for (int s = 56; s >= 0; s -= 8) input.push_back(static_cast<std::uint8_t>(counter >> s));
    for (int s = 24; s >= 0; s -= 8) input.push_back(static_cast<std::uint8_t>(block >> s));
    const auto pad = prf::hmac_sha256(key, input);
    for (std::size_t i = 0; i < pad.size() && offset < out.size(); ++i, ++offset) out[offset] ^= pad[i];
  }
  return out;
}

}  // namespace

Bits derive_ptk_standard(std::span<const std::uint8_t> pmk, std::span<const std::uint8_t> anonce,
                         std::span<const std::uint8_t> snonce, const MacAddress& addr_a, const MacAddress& addr_b) {
  require_bits(pmk, kPmkBits, "pmk");
  require_bits(anonce, kNonceBits, "anonce");
  require_bits(snonce, kNonceBits, "snonce");

  const auto a = pack_bits(anonce);
  const auto s = pack_bits(snonce);
  const bool addr_order = std::lexicographical_compare(addr_a.begin(), addr_a.end(), addr_b.begin(), addr_b.end());
  const bool nonce_order = std::lexicographical_compare(a.begin(), a.end(), s.begin(), s.end());

  ByteString context;
  append(context, addr_order ? addr_a : addr_b);
  append(context, addr_order ? addr_b : addr_a);
  append(context, nonce_order ? a : s);
  append(context, nonce_order ? s : a);

  const auto ptk = prf::kdf_sha256(pack_bits(pmk), kPtkLabel, context, kStandardPtkBits);
  return unpack_bits(ptk, kStandardPtkBits);
}

PtkParts split_ptk(std::span<const std::uint8_t> ptk, KeyMode mode) {
  if (mode == KeyMode::Standard) {
    require_bits(ptk, kStandardPtkBits, "standard ptk");
    return {slice(ptk, 0, kSubkeyBits), slice(ptk, kSubkeyBits, kSubkeyBits), slice(ptk, 2 * kSubkeyBits, kSubkeyBits)};
  }
  require_bits(ptk, kQuantumPtkBits, "quantum ptk");
  return {Bits{}, slice(ptk, 0, kSubkeyBits), slice(ptk, kSubkeyBits, kSubkeyBits)};
}

KeyHierarchy build_hierarchy(std::span<const std::uint8_t> pmk, std::span<const std::uint8_t> ptk, KeyMode mode) {
  require_bits(pmk, kPmkBits, "pmk");
  auto parts = split_ptk(ptk, mode);
  return KeyHierarchy{mode, Bits(pmk.begin(), pmk.end()), Bits(ptk.begin(), ptk.end()), std::move(parts.kck),
                      std::move(parts.kek), std::move(parts.tk)};
}

KeyHierarchy quantum_hierarchy(std::span<const std::uint8_t> pmk, std::span<const std::uint8_t> quantum_key) {
  require_bits(quantum_key, kQuantumKeyBits, "quantum key");
  return build_hierarchy(pmk, quantum_key.first(kQuantumPtkBits), KeyMode::Quantum);
}

Bits compute_qmic(std::span<const std::uint8_t> quantum_key, std::span<const std::uint8_t> pmk) {
  require_bits(quantum_key, kQuantumKeyBits, "quantum key");
  require_bits(pmk, kPmkBits, "pmk");
  return xor_bits(quantum_key.subspan(kQuantumPtkBits, kQMicBits), pmk.first(kQMicBits));
}

ByteString encrypt_demo_frame(std::span<const std::uint8_t> tk, std::span<const std::uint8_t> payload,
                              std::uint64_t counter) {
  return keystream_xor(tk, payload, counter);
}

ByteString wrap_group_key(std::span<const std::uint8_t> kek, std::span<const std::uint8_t> group_key) {
  return keystream_xor(kek, group_key, 0);
}

}  // namespace qkdlab::handshake
