#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/reconciliation.hpp"
#include "qkdlab/wire.hpp"

namespace qkdlab::post {

std::uint8_t hamming7_syndrome(std::span<const std::uint8_t> seven_bits) {
  std::uint8_t syndrome = 0;
  for (std::size_t i = 0; i < 7 && i < seven_bits.size(); ++i) {
    if (seven_bits[i] & 1U) syndrome ^= static_cast<std::uint8_t>(i + 1);
  }
  return syndrome;
}

namespace {

Bits permuted(const Bits& key, const std::vector<std::size_t>& order) {
  Bits out(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) out[i] = key[order[i]];
  return out;
}

std::vector<std::size_t> shuffle_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream shuffle_rng(seed);
  shuffle_rng.shuffle(order.begin(), order.end());
  return order;
}

Bits without_discards(const Bits& key, const ByteString& treated) {
  Bits out;
  out.reserve(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    const auto block = i / kWinnowBlock;
    if (block < treated.size() && treated[block] && i % kWinnowBlock == 0) continue;
    out.push_back(key[i]);
  }
  return out;
}

}  // namespace

ReconciliationResult winnow_reconcile(std::span<const std::uint8_t> sender_key,
                                      std::span<const std::uint8_t> receiver_key,
                                      channel::ClassicalChannel& classical, RandomStream& rng,
                                      const WinnowOptions& options, const protocols::Parties& parties) {
  if (sender_key.size() != receiver_key.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("winnow: keys differ in length ({} vs {})", sender_key.size(), receiver_key.size()));
  }
  if (sender_key.size() < kMinReconcileKey) {
    throw Error(ErrorCode::KeyTooShort,
                fmt::format("winnow: {} bits, need at least {}", sender_key.size(), kMinReconcileKey));
  }
  if (options.passes == 0) throw Error(ErrorCode::ConfigInvalid, "winnow.passes must be positive");

  ReconciliationResult result;
  result.strategy = Reconciliation::Winnow;
  Bits theirs(sender_key.begin(), sender_key.end());
  Bits mine(receiver_key.begin(), receiver_key.end());

  for (std::size_t pass = 0; pass < options.passes; ++pass) {
    if (pass > 0) {
      const auto seed = rng.next();
      ByteString payload;
      wire::put_u64(payload, seed);
      const auto seed_msg =
          classical.deliver({parties.sender, std::string(wire::kWinnowShuffleSeed), std::move(payload)});
      theirs = permuted(theirs, shuffle_order(theirs.size(), seed));
      mine = permuted(mine, shuffle_order(mine.size(), wire::get_u64(seed_msg.payload, 0)));
    }
    const std::size_t blocks = mine.size() / kWinnowBlock;
    theirs.resize(blocks * kWinnowBlock);
    mine.resize(blocks * kWinnowBlock);
    if (blocks == 0) break;

    // Sender: one parity per block.
    ByteString parities(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      parities[b] = parity(std::span(theirs).subspan(b * kWinnowBlock, kWinnowBlock));
    }
    const auto parity_msg =
        classical.deliver({parties.sender, std::string(wire::kWinnowBlockParities), std::move(parities)});
    result.parity_bits_leaked += parity_msg.payload.size();

    // Receiver: flag odd blocks.
    ByteString flagged(blocks, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto own = parity(std::span(mine).subspan(b * kWinnowBlock, kWinnowBlock));
      flagged[b] = own != parity_msg.payload[b] ? 1 : 0;
    }
    const auto flag_msg =
        classical.deliver({parties.receiver, std::string(wire::kWinnowMismatches), std::move(flagged)});

    // Sender: 3 syndrome bits for each flagged block, in block order.
    ByteString syndromes;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (!flag_msg.payload[b]) continue;
      const auto s = hamming7_syndrome(std::span(theirs).subspan(b * kWinnowBlock, 7));
      for (int k = 2; k >= 0; --k) syndromes.push_back((s >> k) & 1U);
    }
    const auto syndrome_msg =
        classical.deliver({parties.sender, std::string(wire::kWinnowSyndromes), std::move(syndromes)});
    result.parity_bits_leaked += syndrome_msg.payload.size();

    // Receiver: the syndrome difference names the bad bit; zero means the
    // error sits in the eighth bit, outside the Hamming window.
    std::size_t cursor = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (!flag_msg.payload[b]) continue;
      const auto& s = syndrome_msg.payload;
      const std::uint8_t received =
          static_cast<std::uint8_t>((s[cursor] << 2) | (s[cursor + 1] << 1) | s[cursor + 2]);
      cursor += 3;
      const auto own = hamming7_syndrome(std::span(mine).subspan(b * kWinnowBlock, 7));
      const std::uint8_t diff = received ^ own;
      const std::size_t offset = diff == 0 ? 7 : diff - 1U;
      mine[b * kWinnowBlock + offset] ^= 1U;
      ++result.corrections;
    }

    theirs = without_discards(theirs, flag_msg.payload);
    mine = without_discards(mine, flag_msg.payload);
    ++result.passes;
  }

  result.sender_key = std::move(theirs);
  result.receiver_key = std::move(mine);
  return result;
}

}  // namespace qkdlab::post
