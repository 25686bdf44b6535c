#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "qkdlab/bits.hpp"
#include "qkdlab/channel.hpp"
#include "qkdlab/protocols.hpp"
#include "qkdlab/random.hpp"

namespace qkdlab::post {

enum class Reconciliation { Cascade, Winnow };

std::string_view to_string(Reconciliation r);

inline constexpr std::size_t kMinReconcileKey = 8;

struct ReconciliationResult {
  /// The sender's key is the reference; the receiver corrects towards it.
  /// Winnow also shortens both keys by its discards.
  Bits sender_key;
  Bits receiver_key;
  std::size_t parity_bits_leaked = 0;
  std::size_t passes = 0;
  std::size_t corrections = 0;
  Reconciliation strategy = Reconciliation::Cascade;
};

struct CascadeOptions {
  std::size_t passes = 4;
  /// First-pass block size is ceil(block_constant / qber).
  double block_constant = 0.73;
};

/// First-pass Cascade block size: clamp(ceil(0.73 / max(qber, 1/n)), 2, n).
std::size_t cascade_initial_block_size(std::size_t n, double estimated_qber, double block_constant = 0.73);

/// Interactive parity reconciliation. Each pass shuffles the key with a seed
/// the sender publishes, compares block parities and bisects every odd
/// block down to one bit, then re-examines the blocks of earlier passes
/// that contain the flipped bit. Every parity bit the sender discloses is
/// counted in parity_bits_leaked.
ReconciliationResult cascade_reconcile(std::span<const std::uint8_t> sender_key,
                                       std::span<const std::uint8_t> receiver_key, double estimated_qber,
                                       channel::ClassicalChannel& classical, RandomStream& rng,
                                       const CascadeOptions& options = {},
                                       const protocols::Parties& parties = {});

struct WinnowOptions {
  std::size_t passes = 1;
};

inline constexpr std::size_t kWinnowBlock = 8;

/// Hamming(7,4) syndrome of a 7-bit window (positions 1..7), in [0, 8).
std::uint8_t hamming7_syndrome(std::span<const std::uint8_t> seven_bits);

/// Winnow with 8-bit blocks: one parity per block, a 3-bit Hamming syndrome
/// over the first seven bits of each odd block, single-error correction,
/// and one discarded bit per treated block. Trailing bits that do not fill
/// a block are dropped at the start of every pass.
ReconciliationResult winnow_reconcile(std::span<const std::uint8_t> sender_key,
                                      std::span<const std::uint8_t> receiver_key,
                                      channel::ClassicalChannel& classical, RandomStream& rng,
                                      const WinnowOptions& options = {},
                                      const protocols::Parties& parties = {});

}  // namespace qkdlab::post
