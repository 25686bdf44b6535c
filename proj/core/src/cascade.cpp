#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/reconciliation.hpp"
#include "qkdlab/wire.hpp"

namespace qkdlab::post {

std::string_view to_string(Reconciliation r) { return r == Reconciliation::Cascade ? "cascade" : "winnow"; }

namespace {

struct PassLayout {
  std::vector<std::size_t> order;     // shuffled position -> key index
  std::vector<std::size_t> position;  // key index -> shuffled position
  std::size_t block = 1;

  std::size_t blocks() const { return (order.size() + block - 1) / block; }
  std::size_t block_of(std::size_t key_index) const { return position[key_index] / block; }
};

PassLayout make_layout(std::size_t n, std::size_t block, bool shuffled, std::uint64_t seed) {
  PassLayout layout;
  layout.block = block;
  layout.order.resize(n);
  std::iota(layout.order.begin(), layout.order.end(), std::size_t{0});
  if (shuffled) {
    RandomStream shuffle_rng(seed);
    shuffle_rng.shuffle(layout.order.begin(), layout.order.end());
  }
  layout.position.resize(n);
  for (std::size_t i = 0; i < n; ++i) layout.position[layout.order[i]] = i;
  return layout;
}

PassLayout decode_layout(std::size_t n, const ByteString& payload) {
  return make_layout(n, wire::get_u32(payload, 4), payload[8] != 0, wire::get_u64(payload, 9));
}

std::uint8_t range_parity(std::span<const std::uint8_t> key, const PassLayout& layout, std::size_t lo,
                          std::size_t hi) {
  std::uint8_t p = 0;
  for (std::size_t k = lo; k < hi; ++k) p ^= key[layout.order[k]];
  return p & 1U;
}

/// The sender's half of Cascade: it only ever sees its own key and the
/// receiver's public queries.
class CascadeSender {
 public:
  CascadeSender(std::span<const std::uint8_t> key, channel::ClassicalChannel& classical, RandomStream& rng,
                const protocols::Parties& parties)
      : key_(key), classical_(classical), rng_(rng), parties_(parties) {}

  channel::ClassicalMessage publish_layout(std::size_t pass, std::size_t block) {
    const bool shuffled = pass > 0;
    const std::uint64_t seed = shuffled ? rng_.next() : 0;
    ByteString payload;
    wire::put_u32(payload, static_cast<std::uint32_t>(pass));
    wire::put_u32(payload, static_cast<std::uint32_t>(block));
    payload.push_back(shuffled ? 1 : 0);
    wire::put_u64(payload, seed);
    layouts_.push_back(make_layout(key_.size(), block, shuffled, seed));
    return classical_.deliver({parties_.sender, std::string(wire::kCascadeShuffleSeed), std::move(payload)});
  }

  channel::ClassicalMessage block_parities(std::size_t pass) {
    const auto& layout = layouts_.at(pass);
    ByteString parities(layout.blocks());
    for (std::size_t b = 0; b < parities.size(); ++b) {
      const auto lo = b * layout.block;
      parities[b] = range_parity(key_, layout, lo, std::min(lo + layout.block, key_.size()));
    }
    return classical_.deliver({parties_.sender, std::string(wire::kCascadeBlockParities), std::move(parities)});
  }

  channel::ClassicalMessage answer(const channel::ClassicalMessage& query) {
    const auto pass = wire::get_u32(query.payload, 0);
    const auto lo = wire::get_u32(query.payload, 4);
    const auto hi = wire::get_u32(query.payload, 8);
    const auto p = range_parity(key_, layouts_.at(pass), lo, hi);
    return classical_.deliver({parties_.sender, std::string(wire::kCascadeParity), ByteString{p}});
  }

 private:
  std::span<const std::uint8_t> key_;
  channel::ClassicalChannel& classical_;
  RandomStream& rng_;
  const protocols::Parties& parties_;
  std::vector<PassLayout> layouts_;
};

}  // namespace

std::size_t cascade_initial_block_size(std::size_t n, double estimated_qber, double block_constant) {
  if (n < 2) return n;
  const double floor_rate = 1.0 / static_cast<double>(n);
  const double rate = std::max(estimated_qber, floor_rate);
  const double raw = std::ceil(block_constant / rate);
  if (raw >= static_cast<double>(n)) return n;
  return std::max<std::size_t>(2, static_cast<std::size_t>(raw));
}

ReconciliationResult cascade_reconcile(std::span<const std::uint8_t> sender_key,
                                       std::span<const std::uint8_t> receiver_key, double estimated_qber,
                                       channel::ClassicalChannel& classical, RandomStream& rng,
                                       const CascadeOptions& options, const protocols::Parties& parties) {
  if (sender_key.size() != receiver_key.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("cascade: keys differ in length ({} vs {})", sender_key.size(), receiver_key.size()));
  }
  const std::size_t n = sender_key.size();
  if (n < kMinReconcileKey) {
    throw Error(ErrorCode::KeyTooShort, fmt::format("cascade: {} bits, need at least {}", n, kMinReconcileKey));
  }
  if (options.passes == 0) throw Error(ErrorCode::ConfigInvalid, "cascade.passes must be positive");

  ReconciliationResult result;
  result.strategy = Reconciliation::Cascade;
  result.sender_key.assign(sender_key.begin(), sender_key.end());
  result.receiver_key.assign(receiver_key.begin(), receiver_key.end());
  auto& mine = result.receiver_key;

  CascadeSender sender(sender_key, classical, rng, parties);
  std::vector<PassLayout> layouts;
  std::vector<ByteString> their_parity;
  std::vector<ByteString> my_parity;

  auto bisect = [&](std::size_t pass, std::size_t block) {
    const auto& layout = layouts[pass];
    std::size_t lo = block * layout.block;
    std::size_t hi = std::min(lo + layout.block, n);
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      ByteString query;
      wire::put_u32(query, static_cast<std::uint32_t>(pass));
      wire::put_u32(query, static_cast<std::uint32_t>(lo));
      wire::put_u32(query, static_cast<std::uint32_t>(mid));
      const auto query_msg =
          classical.deliver({parties.receiver, std::string(wire::kCascadeQuery), std::move(query)});
      const auto reply = sender.answer(query_msg);
      result.parity_bits_leaked += reply.payload.size();
      if (reply.payload[0] != range_parity(mine, layout, lo, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return layout.order[lo];
  };

  // Corrects the odd block (pass, block) and chases the parity changes it
  // causes through every pass seen so far.
  auto correct = [&](std::size_t pass, std::size_t block) {
    std::vector<std::pair<std::size_t, std::size_t>> pending{{pass, block}};
    while (!pending.empty()) {
      const auto [p, b] = pending.back();
      pending.pop_back();
      if (my_parity[p][b] == their_parity[p][b]) continue;
      const auto flipped = bisect(p, b);
      mine[flipped] ^= 1U;
      ++result.corrections;
      for (std::size_t q = 0; q < layouts.size(); ++q) {
        const auto qb = layouts[q].block_of(flipped);
        my_parity[q][qb] ^= 1U;
        if (my_parity[q][qb] != their_parity[q][qb]) pending.emplace_back(q, qb);
      }
    }
  };

  const std::size_t first_block = cascade_initial_block_size(n, estimated_qber, options.block_constant);
  for (std::size_t pass = 0; pass < options.passes; ++pass) {
    std::size_t block = first_block;
    for (std::size_t k = 0; k < pass && block < n; ++k) block *= 2;
    block = std::min(block, n);

    const auto layout_msg = sender.publish_layout(pass, block);
    layouts.push_back(decode_layout(n, layout_msg.payload));
    const auto& layout = layouts.back();

    const auto parities_msg = sender.block_parities(pass);
    result.parity_bits_leaked += parities_msg.payload.size();
    their_parity.push_back(parities_msg.payload);

    ByteString own(layout.blocks());
    for (std::size_t b = 0; b < own.size(); ++b) {
      const auto lo = b * layout.block;
      own[b] = range_parity(mine, layout, lo, std::min(lo + layout.block, n));
    }
    my_parity.push_back(std::move(own));

    for (std::size_t b = 0; b < layout.blocks(); ++b) {
      if (my_parity[pass][b] != their_parity[pass][b]) correct(pass, b);
    }
    ++result.passes;
  }
  return result;
}

}  // namespace qkdlab::post
