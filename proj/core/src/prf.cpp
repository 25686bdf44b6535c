#include "qkdlab/prf.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "qkdlab/errors.hpp"

namespace qkdlab::prf {

ByteString hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
  ByteString out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  // HMAC rejects a null key pointer even for zero length.
  static const std::uint8_t empty = 0;
  const auto* key_ptr = key.empty() ? &empty : key.data();
  if (HMAC(EVP_sha256(), key_ptr, static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len) ==
      nullptr) {
    throw Error(ErrorCode::Io, "HMAC-SHA256 failed");
  }
  out.resize(len);
  return out;
}

ByteString kdf_sha256(std::span<const std::uint8_t> key, std::string_view label,
                      std::span<const std::uint8_t> context, std::size_t output_bits) {
  if (output_bits % 8 != 0 || output_bits > 0xFFFF) {
    throw Error(ErrorCode::BadLength, "kdf output length must be a whole number of bytes below 2^16 bits");
  }
  const std::size_t want = output_bits / 8;
  ByteString out;
  out.reserve(want + 32);
  for (std::uint16_t i = 1; out.size() < want; ++i) {
    ByteString block;
    block.push_back(static_cast<std::uint8_t>(i & 0xFF));
    block.push_back(static_cast<std::uint8_t>(i >> 8));
    block.insert(block.end(), label.begin(), label.end());
    block.insert(block.end(), context.begin(), context.end());
    block.push_back(static_cast<std::uint8_t>(output_bits & 0xFF));
    block.push_back(static_cast<std::uint8_t>(output_bits >> 8));
    const auto mac = hmac_sha256(key, block);
    out.insert(out.end(), mac.begin(), mac.end());
  }
  out.resize(want);
  return out;
}

}  // namespace qkdlab::prf
