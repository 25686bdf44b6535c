#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "qkdlab/bits.hpp"
#include "qkdlab/channel.hpp"
#include "qkdlab/random.hpp"

namespace qkdlab::post {

inline constexpr std::size_t kDefaultSecurityParameter = 32;

struct FinalKey {
  Bits bits;
  std::size_t security_parameter = kDefaultSecurityParameter;

  std::size_t length() const { return bits.size(); }
};

/// Output length m = |key| - leakage - s. Throws KeyExhausted when m <= 0.
std::size_t amplified_length(std::size_t key_length, std::size_t total_leakage, std::size_t security_parameter);

/// y = T x over GF(2), T the m x n Toeplitz matrix T[i][j] = seed[i - j + n - 1].
/// seed must hold n + m - 1 bits.
Bits toeplitz_hash(std::span<const std::uint8_t> key, std::span<const std::uint8_t> seed, std::size_t output_length);

/// Sender side: draws a Toeplitz seed, publishes it on the classical
/// channel, and compresses `key`.
FinalKey privacy_amplify(std::span<const std::uint8_t> key, std::size_t total_leakage,
                         std::size_t security_parameter, channel::ClassicalChannel& classical, RandomStream& rng,
                         const std::string& sender = "alice");

/// Receiver side: compresses `key` with the seed found in a published
/// amplification message.
FinalKey apply_published_amplification(std::span<const std::uint8_t> key,
                                       const channel::ClassicalMessage& seed_message,
                                       std::size_t security_parameter);

}  // namespace qkdlab::post
