#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkdlab/scenario.hpp"

namespace qkdlab::lab {

inline constexpr std::string_view kCsvHeader =
    "seed,sift_fraction,qber,verdict,leaked_bits,final_key_length,eve_resolved_bits,handshake_outcome,wall_time_ms";

struct TrialRow {
  std::uint64_t seed = 0;
  double sift_fraction = 0.0;
  /// Estimated from the disclosed sample (what the parties observe).
  double qber = 0.0;
  std::string verdict;
  std::size_t leaked_bits = 0;
  std::size_t final_key_length = 0;
  std::size_t eve_resolved_bits = 0;
  std::string handshake_outcome;
  double wall_time_ms = 0.0;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

struct Statistic {
  double mean = 0.0;
  /// Population standard deviation.
  double stddev = 0.0;
};

/// Mean and standard deviation of each numeric column, in CSV order.
using Aggregates = std::vector<std::pair<std::string, Statistic>>;

struct RunReport {
  Scenario scenario;
  std::vector<TrialRow> rows;

  /// Absent when there are no rows.
  std::optional<Aggregates> aggregates() const;
  std::optional<Statistic> aggregate(std::string_view column) const;
};

std::optional<Aggregates> compute_aggregates(const std::vector<TrialRow>& rows);

std::string csv_row(const TrialRow& row);
std::string to_csv(const RunReport& report);
std::string to_json(const RunReport& report);

/// Parses a JSON report and checks that the row count matches the scenario
/// and the stored aggregates match a recomputation from the rows. Throws
/// ConfigInvalid on any inconsistency.
RunReport report_from_json(std::string_view text);

}  // namespace qkdlab::lab
