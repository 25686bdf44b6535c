#include "qkdlab/report.hpp"

#include <cmath>
#include <functional>

#include <fmt/format.h>
#include <json.hpp>

#include "qkdlab/errors.hpp"

namespace qkdlab::lab {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::pair<std::string, std::function<double(const TrialRow&)>>>& numeric_columns() {
  static const std::vector<std::pair<std::string, std::function<double(const TrialRow&)>>> cols{
      {"sift_fraction", [](const TrialRow& r) { return r.sift_fraction; }},
      {"qber", [](const TrialRow& r) { return r.qber; }},
      {"leaked_bits", [](const TrialRow& r) { return static_cast<double>(r.leaked_bits); }},
      {"final_key_length", [](const TrialRow& r) { return static_cast<double>(r.final_key_length); }},
      {"eve_resolved_bits", [](const TrialRow& r) { return static_cast<double>(r.eve_resolved_bits); }},
      {"wall_time_ms", [](const TrialRow& r) { return r.wall_time_ms; }},
  };
  return cols;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::ConfigInvalid, "report integrity check failed: " + why);
}

}  // namespace

std::optional<Aggregates> compute_aggregates(const std::vector<TrialRow>& rows) {
  if (rows.empty()) return std::nullopt;
  Aggregates out;
  const auto n = static_cast<double>(rows.size());
  for (const auto& [name, column] : numeric_columns()) {
    double sum = 0.0;
    for (const auto& r : rows) sum += column(r);
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : rows) sq += (column(r) - mean) * (column(r) - mean);
    out.emplace_back(name, Statistic{mean, std::sqrt(sq / n)});
  }
  return out;
}

std::optional<Aggregates> RunReport::aggregates() const { return compute_aggregates(rows); }

std::optional<Statistic> RunReport::aggregate(std::string_view column) const {
  const auto all = aggregates();
  if (!all) return std::nullopt;
  for (const auto& [name, stat] : *all) {
    if (name == column) return stat;
  }
  return std::nullopt;
}

std::string csv_row(const TrialRow& r) {
  return fmt::format("{},{:.6f},{:.6f},{},{},{},{},{},{:.3f}", r.seed, r.sift_fraction, r.qber, r.verdict,
                     r.leaked_bits, r.final_key_length, r.eve_resolved_bits, r.handshake_outcome, r.wall_time_ms);
}

std::string to_csv(const RunReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : report.rows) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

std::string to_json(const RunReport& report) {
  Json doc;
  Json scenario = Json::object();
  for (const auto& k : Scenario::keys()) scenario[k] = report.scenario.get(k);
  doc["scenario"] = std::move(scenario);

  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"seed", r.seed},
                    {"sift_fraction", r.sift_fraction},
                    {"qber", r.qber},
                    {"verdict", r.verdict},
                    {"leaked_bits", r.leaked_bits},
                    {"final_key_length", r.final_key_length},
                    {"eve_resolved_bits", r.eve_resolved_bits},
                    {"handshake_outcome", r.handshake_outcome},
                    {"wall_time_ms", r.wall_time_ms}});
  }
  doc["trials"] = std::move(rows);

  if (const auto agg = report.aggregates()) {
    Json a = Json::object();
    for (const auto& [name, stat] : *agg) a[name] = {{"mean", stat.mean}, {"stddev", stat.stddev}};
    doc["aggregates"] = std::move(a);
  } else {
    doc["aggregates"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    corrupt(e.what());
  }
  if (!doc.is_object() || !doc.contains("scenario") || !doc.contains("trials") || !doc.contains("aggregates")) {
    corrupt("missing scenario, trials or aggregates");
  }

  RunReport report;
  try {
    for (const auto& [key, value] : doc["scenario"].items()) report.scenario.set(key, value.get<std::string>());
    for (const auto& r : doc["trials"]) {
      report.rows.push_back(TrialRow{r.at("seed").get<std::uint64_t>(), r.at("sift_fraction").get<double>(),
                                     r.at("qber").get<double>(), r.at("verdict").get<std::string>(),
                                     r.at("leaked_bits").get<std::size_t>(), r.at("final_key_length").get<std::size_t>(),
                                     r.at("eve_resolved_bits").get<std::size_t>(),
                                     r.at("handshake_outcome").get<std::string>(), r.at("wall_time_ms").get<double>()});
    }
  } catch (const Json::exception& e) {
    corrupt(e.what());
  }

  if (report.rows.size() != report.scenario.trials) {
    corrupt(fmt::format("{} rows for {} trials", report.rows.size(), report.scenario.trials));
  }
  const auto recomputed = report.aggregates();
  const auto& stored = doc["aggregates"];
  if (!recomputed) {
    if (!stored.is_null()) corrupt("aggregates present for an empty report");
    return report;
  }
  if (!stored.is_object()) corrupt("aggregates missing");
  for (const auto& [name, stat] : *recomputed) {
    if (!stored.contains(name)) corrupt(fmt::format("aggregate '{}' missing", name));
    const double mean = stored[name].value("mean", std::nan(""));
    const double sd = stored[name].value("stddev", std::nan(""));
    if (!close(mean, stat.mean) || !close(sd, stat.stddev)) {
      corrupt(fmt::format("aggregate '{}' does not match its rows", name));
    }
  }
  return report;
}

}  // namespace qkdlab::lab
