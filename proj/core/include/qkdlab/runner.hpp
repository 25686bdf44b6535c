#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/channel.hpp"
#include "qkdlab/handshake.hpp"
#include "qkdlab/qkd_session.hpp"
#include "qkdlab/report.hpp"
#include "qkdlab/scenario.hpp"

namespace qkdlab::lab {

struct RunOptions {
  /// Record real elapsed time per trial. Off by default so that reports
  /// depend on nothing but the scenario.
  bool timing = false;
  bool transcripts = false;
  /// Worker threads; rows come back ordered by seed either way.
  unsigned jobs = 1;
};

struct TrialOutcome {
  TrialRow row;
  /// Last QKD round of the trial, if any ran.
  std::optional<QkdSessionResult> qkd;
  std::optional<handshake::HandshakeResult> handshake;
  /// Rendered classical transcript (only when requested).
  std::string transcript;
};

/// Runs a single trial with the given seed.
TrialOutcome run_trial(const Scenario& scenario, std::uint64_t seed, const RunOptions& options = {});

struct ScenarioRun {
  RunReport report;
  /// One per trial when transcripts were requested, in seed order.
  std::vector<std::string> transcripts;
};

/// Validates the scenario, then runs trials with seeds seed, seed+1, ...
ScenarioRun run_scenario(const Scenario& scenario, const RunOptions& options = {});

struct SweepPoint {
  std::string value;
  RunReport report;
};

/// One report per value, all sharing the base seed. Throws
/// UnknownParameter when `parameter` is unknown or not sweepable.
std::vector<SweepPoint> sweep(const Scenario& scenario, std::string_view parameter,
                              const std::vector<std::string>& values, const RunOptions& options = {});

/// Combined table: the swept parameter followed by the report columns.
std::string sweep_csv(std::string_view parameter, const std::vector<SweepPoint>& points);

std::string render_transcript(const channel::ClassicalChannel& classical);

}  // namespace qkdlab::lab
