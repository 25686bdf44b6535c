#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "qkdlab/bits.hpp"

namespace qkdlab::prf {

/// Name of the keyed PRF behind every key derivation; written into session
/// transcripts so a run can be reproduced against another implementation.
inline constexpr std::string_view kPrfName = "HMAC-SHA256 KDF (IEEE 802.11-2016 12.7.1.7.2)";

ByteString hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);

/// KDF-Hash-Length: concatenates HMAC(key, i || label || context || L)
/// for i = 1, 2, ... (16-bit little-endian counters) and truncates to
/// `output_bits` (a multiple of 8).
ByteString kdf_sha256(std::span<const std::uint8_t> key, std::string_view label,
                      std::span<const std::uint8_t> context, std::size_t output_bits);

}  // namespace qkdlab::prf
