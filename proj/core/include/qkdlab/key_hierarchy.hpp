#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "qkdlab/bits.hpp"

namespace qkdlab::handshake {

enum class KeyMode { Standard, Quantum };

std::string_view to_string(KeyMode mode);

using MacAddress = std::array<std::uint8_t, 6>;

inline constexpr std::size_t kPmkBits = 256;
inline constexpr std::size_t kNonceBits = 256;
inline constexpr std::size_t kStandardPtkBits = 384;
inline constexpr std::size_t kQuantumPtkBits = 256;
inline constexpr std::size_t kQuantumKeyBits = 384;
inline constexpr std::size_t kSubkeyBits = 128;
inline constexpr std::size_t kQMicBits = 128;
inline constexpr std::string_view kPtkLabel = "Pairwise key expansion";

/// Pairwise keys held by one party. Standard: ptk = kck || kek || tk.
/// Quantum: ptk = kek || tk and kck stays empty.
struct KeyHierarchy {
  KeyMode mode = KeyMode::Standard;
  Bits pmk;
  Bits ptk;
  Bits kck;
  Bits kek;
  Bits tk;

  friend bool operator==(const KeyHierarchy&, const KeyHierarchy&) = default;
};

struct PtkParts {
  Bits kck;
  Bits kek;
  Bits tk;
};

/// PRF-384(pmk; label, min(addr) || max(addr) || min(nonce) || max(nonce)).
/// Symmetric in the two parties, so both ends compute the same ptk.
Bits derive_ptk_standard(std::span<const std::uint8_t> pmk, std::span<const std::uint8_t> anonce,
                         std::span<const std::uint8_t> snonce, const MacAddress& addr_a, const MacAddress& addr_b);

/// Throws BadLength when |ptk| does not match the mode.
PtkParts split_ptk(std::span<const std::uint8_t> ptk, KeyMode mode);

KeyHierarchy build_hierarchy(std::span<const std::uint8_t> pmk, std::span<const std::uint8_t> ptk, KeyMode mode);

/// Quantum mode: the first 256 bits of the quantum key become the ptk.
KeyHierarchy quantum_hierarchy(std::span<const std::uint8_t> pmk, std::span<const std::uint8_t> quantum_key);

/// quantum_key[256..383] XOR pmk[0..127]. Throws BadLength on other sizes.
Bits compute_qmic(std::span<const std::uint8_t> quantum_key, std::span<const std::uint8_t> pmk);

/// XOR with PRF(tk; counter || block index) keystream. Its own inverse.
ByteString encrypt_demo_frame(std::span<const std::uint8_t> tk, std::span<const std::uint8_t> payload,
                              std::uint64_t counter);

/// Stand-in for group key delivery: wraps `group_key` under the kek with
/// the same keystream construction.
ByteString wrap_group_key(std::span<const std::uint8_t> kek, std::span<const std::uint8_t> group_key);

}  // namespace qkdlab::handshake
