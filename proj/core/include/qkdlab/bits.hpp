#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkdlab {

/// Unpacked bit string: one element per bit, each element 0 or 1.
/// Keys in this library are short enough (<= 10^5 bits) that the unpacked
/// form is used everywhere except in the hashing hot loops.
using Bits = std::vector<std::uint8_t>;
using ByteString = std::vector<std::uint8_t>;

std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::uint8_t parity(std::span<const std::uint8_t> bits);

Bits xor_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
Bits slice(std::span<const std::uint8_t> bits, std::size_t offset, std::size_t count);
Bits concat(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// MSB-first packing; a trailing partial byte is zero-padded.
ByteString pack_bits(std::span<const std::uint8_t> bits);
Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count);

/// Little-endian word packing used by the Toeplitz hash.
std::vector<std::uint64_t> pack_words(std::span<const std::uint8_t> bits);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// "0101..." rendering for diagnostics.
std::string to_bitstring(std::span<const std::uint8_t> bits);
Bits from_bitstring(std::string_view text);

}  // namespace qkdlab
