#include "qkdlab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"

namespace qkdlab::lab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorCode::ConfigInvalid, fmt::format("{}: cannot parse '{}' ({})", key, value, expected));
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "expected a number");
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "expected a non-negative integer");
  return out;
}

/// Shortest text that parses back to the same double.
std::string render(double v) { return fmt::format("{}", v); }

}  // namespace

const std::vector<std::string>& Scenario::keys() {
  static const std::vector<std::string> k{
      "protocol",        "n_pulses",         "source.kind",        "source.mu",
      "channel.flip_probability",            "channel.loss_probability",
      "eve.kind",        "eve.fraction",     "sample_fraction",    "qber_threshold",
      "reconciliation",  "cascade.passes",   "winnow.passes",      "security_parameter",
      "mode",            "handshake.kind",   "handshake.timeout_ms",
      "seed",            "trials",
  };
  return k;
}

bool Scenario::is_sweepable(std::string_view key) {
  const auto& k = keys();
  return key != "seed" && key != "trials" && std::find(k.begin(), k.end(), key) != k.end();
}

void Scenario::set(std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  const auto v = lower(value);
  if (key == "protocol") {
    if (v == "bb84") protocol = Protocol::BB84;
    else if (v == "sarg04") protocol = Protocol::SARG04;
    else bad_value(key, value, "BB84 or SARG04");
  } else if (key == "n_pulses") {
    n_pulses = parse_unsigned(key, value);
  } else if (key == "source.kind") {
    if (v == "single_photon" || v == "singlephoton") source = SourceKind::SinglePhoton;
    else if (v == "weak_laser" || v == "weaklaser") source = SourceKind::WeakLaser;
    else bad_value(key, value, "single_photon or weak_laser");
  } else if (key == "source.mu") {
    mu = parse_double(key, value);
  } else if (key == "channel.flip_probability") {
    flip_probability = parse_double(key, value);
  } else if (key == "channel.loss_probability") {
    loss_probability = parse_double(key, value);
  } else if (key == "eve.kind") {
    if (v == "none") eve = channel::EveStrategy::Kind::None;
    else if (v == "intercept" || v == "intercept_resend") eve = channel::EveStrategy::Kind::InterceptResend;
    else if (v == "pns" || v == "photon_number_splitting") eve = channel::EveStrategy::Kind::PhotonNumberSplitting;
    else bad_value(key, value, "none, intercept or pns");
  } else if (key == "eve.fraction") {
    eve_fraction = parse_double(key, value);
  } else if (key == "sample_fraction") {
    sample_fraction = parse_double(key, value);
  } else if (key == "qber_threshold") {
    qber_threshold = parse_double(key, value);
  } else if (key == "reconciliation") {
    if (v == "cascade") reconciliation = post::Reconciliation::Cascade;
    else if (v == "winnow") reconciliation = post::Reconciliation::Winnow;
    else bad_value(key, value, "cascade or winnow");
  } else if (key == "cascade.passes") {
    cascade_passes = parse_unsigned(key, value);
  } else if (key == "winnow.passes") {
    winnow_passes = parse_unsigned(key, value);
  } else if (key == "security_parameter") {
    security_parameter = parse_unsigned(key, value);
  } else if (key == "mode") {
    if (v == "qkd_only" || v == "qkdonly") mode = RunMode::QkdOnly;
    else if (v == "full_handshake" || v == "fullhandshake") mode = RunMode::FullHandshake;
    else bad_value(key, value, "qkd_only or full_handshake");
  } else if (key == "handshake.kind") {
    if (v == "quantum") handshake_kind = handshake::KeyMode::Quantum;
    else if (v == "standard") handshake_kind = handshake::KeyMode::Standard;
    else bad_value(key, value, "quantum or standard");
  } else if (key == "handshake.timeout_ms") {
    timeout_ms = parse_unsigned(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "trials") {
    trials = parse_unsigned(key, value);
  } else {
    throw Error(ErrorCode::UnknownParameter, fmt::format("unknown scenario parameter '{}'", key));
  }
}

std::string Scenario::get(std::string_view key) const {
  if (key == "protocol") return std::string(to_string(protocol));
  if (key == "n_pulses") return std::to_string(n_pulses);
  if (key == "source.kind") return source == SourceKind::SinglePhoton ? "single_photon" : "weak_laser";
  if (key == "source.mu") return render(mu);
  if (key == "channel.flip_probability") return render(flip_probability);
  if (key == "channel.loss_probability") return render(loss_probability);
  if (key == "eve.kind") return std::string(channel::to_string(eve));
  if (key == "eve.fraction") return render(eve_fraction);
  if (key == "sample_fraction") return render(sample_fraction);
  if (key == "qber_threshold") return render(qber_threshold);
  if (key == "reconciliation") return lower(post::to_string(reconciliation));
  if (key == "cascade.passes") return std::to_string(cascade_passes);
  if (key == "winnow.passes") return std::to_string(winnow_passes);
  if (key == "security_parameter") return std::to_string(security_parameter);
  if (key == "mode") return mode == RunMode::QkdOnly ? "qkd_only" : "full_handshake";
  if (key == "handshake.kind") return std::string(handshake::to_string(handshake_kind));
  if (key == "handshake.timeout_ms") return std::to_string(timeout_ms);
  if (key == "seed") return std::to_string(seed);
  if (key == "trials") return std::to_string(trials);
  throw Error(ErrorCode::UnknownParameter, fmt::format("unknown scenario parameter '{}'", key));
}

void Scenario::validate() const {
  std::vector<std::string> problems;
  auto check = [&](bool ok, std::string_view field, std::string_view rule, const std::string& got) {
    if (!ok) problems.push_back(fmt::format("{} must be {} (got {})", field, rule, got));
  };
  check(n_pulses >= 1 && n_pulses <= 10'000'000, "n_pulses", "in [1, 10^7]", std::to_string(n_pulses));
  if (source == SourceKind::WeakLaser) check(mu > 0.0 && mu <= 2.0, "source.mu", "in (0, 2]", render(mu));
  check(flip_probability >= 0.0 && flip_probability <= 0.5, "channel.flip_probability", "in [0, 0.5]",
        render(flip_probability));
  check(loss_probability >= 0.0 && loss_probability < 1.0, "channel.loss_probability", "in [0, 1)",
        render(loss_probability));
  check(eve_fraction >= 0.0 && eve_fraction <= 1.0, "eve.fraction", "in [0, 1]", render(eve_fraction));
  check(sample_fraction > 0.0 && sample_fraction < 1.0, "sample_fraction", "in (0, 1)", render(sample_fraction));
  check(qber_threshold >= 0.0 && qber_threshold <= 0.5, "qber_threshold", "in [0, 0.5]", render(qber_threshold));
  check(cascade_passes >= 1 && cascade_passes <= 16, "cascade.passes", "in [1, 16]", std::to_string(cascade_passes));
  check(winnow_passes >= 1 && winnow_passes <= 16, "winnow.passes", "in [1, 16]", std::to_string(winnow_passes));
  check(security_parameter <= 4096, "security_parameter", "at most 4096", std::to_string(security_parameter));
  check(timeout_ms >= 1, "handshake.timeout_ms", "positive", std::to_string(timeout_ms));
  check(trials <= 1'000'000, "trials", "at most 10^6", std::to_string(trials));
  if (problems.empty()) return;

  std::string msg = "invalid scenario:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw Error(ErrorCode::ConfigInvalid, msg);
}

QkdParams Scenario::qkd_params() const {
  QkdParams p;
  p.protocol = protocol;
  p.n_pulses = n_pulses;
  p.sample_fraction = sample_fraction;
  p.qber_threshold = qber_threshold;
  p.reconciliation = reconciliation;
  p.cascade.passes = cascade_passes;
  p.winnow.passes = winnow_passes;
  p.security_parameter = security_parameter;
  return p;
}

channel::ChannelConfig Scenario::channel_config() const {
  const auto src =
      source == SourceKind::SinglePhoton ? quantum::SourceModel::single_photon() : quantum::SourceModel::weak_laser(mu);
  return channel::ChannelConfig(flip_probability, loss_probability, src);
}

channel::EveStrategy Scenario::eve_strategy() const {
  switch (eve) {
    case channel::EveStrategy::Kind::None: return channel::EveStrategy::none();
    case channel::EveStrategy::Kind::InterceptResend: return channel::EveStrategy::intercept_resend(eve_fraction);
    case channel::EveStrategy::Kind::PhotonNumberSplitting: return channel::EveStrategy::photon_number_splitting();
  }
  return channel::EveStrategy::none();
}

std::string Scenario::to_text() const {
  std::string out;
  for (const auto& k : keys()) out += fmt::format("{} = {}\n", k, get(k));
  return out;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigInvalid, fmt::format("line {}: expected 'key = value'", line_no));
    }
    s.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open scenario file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void apply_override(Scenario& scenario, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("override '{}' is not of the form key=value", assignment));
  }
  scenario.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

}  // namespace qkdlab::lab
