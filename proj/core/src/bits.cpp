#include "qkdlab/bits.hpp"

#include <stdexcept>

#include "qkdlab/errors.hpp"

namespace qkdlab {

std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "hamming_distance: operands differ in length");
  }
  std::size_t distance = 0;
  for (std::size_t i = 0; i < a.size(); ++i) distance += (a[i] ^ b[i]) & 1U;
  return distance;
}

std::uint8_t parity(std::span<const std::uint8_t> bits) {
  std::uint8_t p = 0;
  for (auto b : bits) p ^= b;
  return p & 1U;
}

Bits xor_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "xor_bits: operands differ in length");
  }
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] ^ b[i]) & 1U;
  return out;
}

Bits slice(std::span<const std::uint8_t> bits, std::size_t offset, std::size_t count) {
  if (offset > bits.size() || count > bits.size() - offset) {
    throw Error(ErrorCode::BadLength, "slice: range exceeds bit string");
  }
  auto sub = bits.subspan(offset, count);
  return Bits(sub.begin(), sub.end());
}

Bits concat(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  Bits out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

ByteString pack_bits(std::span<const std::uint8_t> bits) {
  ByteString out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1U) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) {
    throw Error(ErrorCode::BadLength, "unpack_bits: not enough bytes");
  }
  Bits out(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
  }
  return out;
}

std::vector<std::uint64_t> pack_words(std::span<const std::uint8_t> bits) {
  std::vector<std::uint64_t> words((bits.size() + 63) / 64 + 1, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1U) words[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return words;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

std::string to_bitstring(std::span<const std::uint8_t> bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

Bits from_bitstring(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (c != ' ' && c != '_') {
      throw Error(ErrorCode::ConfigInvalid, std::string("from_bitstring: unexpected character '") + c + "'");
    }
  }
  return out;
}

}  // namespace qkdlab
