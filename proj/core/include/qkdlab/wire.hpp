#pragma once

// Message tags and small codecs for the post-processing exchanges.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qkdlab/bits.hpp"

namespace qkdlab::wire {

// Error estimation
inline constexpr std::string_view kSampleIndices = "estimate.sample_indices";
inline constexpr std::string_view kSenderSample = "estimate.sender_sample";
inline constexpr std::string_view kReceiverSample = "estimate.receiver_sample";
inline constexpr std::string_view kVerdict = "estimate.verdict";

// Cascade
inline constexpr std::string_view kCascadeShuffleSeed = "cascade.shuffle_seed";
inline constexpr std::string_view kCascadeBlockParities = "cascade.block_parities";  // key-correlated
inline constexpr std::string_view kCascadeQuery = "cascade.query";
inline constexpr std::string_view kCascadeParity = "cascade.parity";  // key-correlated

// Winnow
inline constexpr std::string_view kWinnowShuffleSeed = "winnow.shuffle_seed";
inline constexpr std::string_view kWinnowBlockParities = "winnow.block_parities";  // key-correlated
inline constexpr std::string_view kWinnowMismatches = "winnow.mismatched_blocks";
inline constexpr std::string_view kWinnowSyndromes = "winnow.syndromes";  // key-correlated

// Privacy amplification
inline constexpr std::string_view kToeplitzSeed = "amplify.toeplitz_seed";

inline void put_u32(ByteString& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(ByteString& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  return v;
}

inline ByteString encode_indices(std::span<const std::size_t> indices) {
  ByteString out;
  out.reserve(indices.size() * 4);
  for (auto i : indices) put_u32(out, static_cast<std::uint32_t>(i));
  return out;
}

inline std::vector<std::size_t> decode_indices(std::span<const std::uint8_t> payload) {
  std::vector<std::size_t> out(payload.size() / 4);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = get_u32(payload, 4 * k);
  return out;
}

}  // namespace qkdlab::wire
