#include "qkdlab/privacy_amplification.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/wire.hpp"

namespace qkdlab::post {

std::size_t amplified_length(std::size_t key_length, std::size_t total_leakage, std::size_t security_parameter) {
  if (key_length <= total_leakage + security_parameter) {
    throw Error(ErrorCode::KeyExhausted,
                fmt::format("key of {} bits cannot absorb {} leaked bits plus security parameter {}", key_length,
                            total_leakage, security_parameter));
  }
  return key_length - total_leakage - security_parameter;
}

namespace {

/// 64 bits of `words` starting at bit `offset`.
std::uint64_t window(const std::vector<std::uint64_t>& words, std::size_t offset) {
  const std::size_t q = offset / 64;
  const unsigned r = static_cast<unsigned>(offset % 64);
  if (r == 0) return words[q];
  return (words[q] >> r) | (words[q + 1] << (64 - r));
}

}  // namespace

Bits toeplitz_hash(std::span<const std::uint8_t> key, std::span<const std::uint8_t> seed,
                   std::size_t output_length) {
  const std::size_t n = key.size();
  const std::size_t m = output_length;
  if (m == 0 || n == 0) return Bits(m, 0);
  if (seed.size() != n + m - 1) {
    throw Error(ErrorCode::BadLength,
                fmt::format("toeplitz seed has {} bits, expected {}", seed.size(), n + m - 1));
  }

  // With the seed reversed, row i is the contiguous run
  // reversed[m - 1 - i .. m - 1 - i + n), so each row is a shifted window.
  Bits reversed(seed.rbegin(), seed.rend());
  auto seed_words = pack_words(reversed);
  seed_words.push_back(0);
  const auto key_words = pack_words(key);
  const std::size_t key_word_count = (n + 63) / 64;

  Bits out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t base = m - 1 - i;
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < key_word_count; ++w) acc ^= window(seed_words, base + 64 * w) & key_words[w];
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

FinalKey privacy_amplify(std::span<const std::uint8_t> key, std::size_t total_leakage,
                         std::size_t security_parameter, channel::ClassicalChannel& classical, RandomStream& rng,
                         const std::string& sender) {
  const auto m = amplified_length(key.size(), total_leakage, security_parameter);
  Bits seed(key.size() + m - 1);
  for (auto& b : seed) b = rng.bit();

  ByteString payload;
  wire::put_u32(payload, static_cast<std::uint32_t>(key.size()));
  wire::put_u32(payload, static_cast<std::uint32_t>(m));
  const auto packed = pack_bits(seed);
  payload.insert(payload.end(), packed.begin(), packed.end());
  classical.deliver({sender, std::string(wire::kToeplitzSeed), std::move(payload)});

  return FinalKey{toeplitz_hash(key, seed, m), security_parameter};
}

FinalKey apply_published_amplification(std::span<const std::uint8_t> key,
                                       const channel::ClassicalMessage& seed_message,
                                       std::size_t security_parameter) {
  if (seed_message.tag != wire::kToeplitzSeed || seed_message.payload.size() < 8) {
    throw Error(ErrorCode::ConfigInvalid, "not a Toeplitz seed announcement");
  }
  const std::size_t n = wire::get_u32(seed_message.payload, 0);
  const std::size_t m = wire::get_u32(seed_message.payload, 4);
  if (n != key.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("announced input length {} but local key has {} bits", n, key.size()));
  }
  const auto seed = unpack_bits(std::span(seed_message.payload).subspan(8), n + m - 1);
  return FinalKey{toeplitz_hash(key, seed, m), security_parameter};
}

}  // namespace qkdlab::post
