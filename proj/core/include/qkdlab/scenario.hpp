#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/channel.hpp"
#include "qkdlab/key_hierarchy.hpp"
#include "qkdlab/qkd_session.hpp"

namespace qkdlab::lab {

enum class RunMode { QkdOnly, FullHandshake };
enum class SourceKind { SinglePhoton, WeakLaser };

/// One experiment configuration. Text form is flat `key = value` lines with
/// dotted keys; `#` starts a comment. Defaults describe a SARG04 quantum
/// handshake over an ideal channel with a single-photon source.
struct Scenario {
  Protocol protocol = Protocol::SARG04;
  std::size_t n_pulses = 20000;
  SourceKind source = SourceKind::SinglePhoton;
  double mu = 0.1;
  double flip_probability = 0.0;
  double loss_probability = 0.0;
  channel::EveStrategy::Kind eve = channel::EveStrategy::Kind::None;
  double eve_fraction = 1.0;
  double sample_fraction = post::kDefaultSampleFraction;
  double qber_threshold = post::kDefaultQberThreshold;
  post::Reconciliation reconciliation = post::Reconciliation::Cascade;
  std::size_t cascade_passes = 4;
  std::size_t winnow_passes = 1;
  std::size_t security_parameter = post::kDefaultSecurityParameter;
  RunMode mode = RunMode::FullHandshake;
  handshake::KeyMode handshake_kind = handshake::KeyMode::Quantum;
  std::uint64_t timeout_ms = 100;
  std::uint64_t seed = 1;
  std::size_t trials = 1;

  /// Every recognised key, in canonical order.
  static const std::vector<std::string>& keys();
  static bool is_sweepable(std::string_view key);

  /// Throws UnknownParameter for unknown keys and ConfigInvalid for values
  /// that do not parse. Range checks are left to validate().
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  /// Throws ConfigInvalid listing every out-of-range field.
  void validate() const;

  QkdParams qkd_params() const;
  channel::ChannelConfig channel_config() const;
  channel::EveStrategy eve_strategy() const;

  std::string to_text() const;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Splits "key=value" (as given to --set) and applies it.
void apply_override(Scenario& scenario, std::string_view assignment);

}  // namespace qkdlab::lab
