#include "qkdlab/runner.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "qkdlab/errors.hpp"

namespace qkdlab::lab {

namespace {

void fill_from_qkd(TrialRow& row, const QkdSessionResult& r) {
  row.sift_fraction = r.sift_fraction();
  row.qber = r.estimate ? r.estimate->qber : 0.0;
  row.verdict = r.estimate ? std::string(post::to_string(r.estimate->verdict)) : std::string(to_string(r.status));
  row.leaked_bits = r.leaked_bits;
  row.final_key_length = r.final_key_length();
  row.eve_resolved_bits = r.eve_resolved_bits();
}

}  // namespace

std::string render_transcript(const channel::ClassicalChannel& classical) {
  std::string out;
  const auto& log = classical.transcript();
  const auto& notes = classical.notes();
  std::size_t next_note = 0;
  auto flush_notes = [&](std::size_t upto) {
    while (next_note < notes.size() && notes[next_note].after_messages <= upto) {
      out += fmt::format("# {}\n", notes[next_note].text);
      ++next_note;
    }
  };
  for (std::size_t i = 0; i < log.size(); ++i) {
    flush_notes(i);
    const auto& e = log[i];
    const auto& m = e.message;
    constexpr std::size_t kShown = 32;
    const auto shown = std::span(m.payload).first(std::min(m.payload.size(), kShown));
    out += fmt::format("{:>6} {:<4} {:<26} {:>6}B {}{}{}\n", i, m.sender, m.tag, m.payload.size(), to_hex(shown),
                       m.payload.size() > kShown ? "..." : "", e.delivered ? "" : " [dropped]");
  }
  flush_notes(log.size());
  return out;
}

TrialOutcome run_trial(const Scenario& scenario, std::uint64_t seed, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  TrialOutcome outcome;
  auto& row = outcome.row;
  row.seed = seed;

  RandomStream rng(seed);
  channel::ClassicalChannel classical;
  classical.note(fmt::format("seed={}", seed));

  if (scenario.mode == RunMode::QkdOnly) {
    outcome.qkd = run_qkd_session(scenario.qkd_params(), scenario.channel_config(), scenario.eve_strategy(),
                                  classical, rng);
    fill_from_qkd(row, *outcome.qkd);
    row.handshake_outcome = "skipped";
  } else {
    handshake::HandshakeConfig hs;
    hs.timeout_ms = scenario.timeout_ms;
    const auto pmk = handshake::random_pmk(rng);
    if (scenario.handshake_kind == handshake::KeyMode::Quantum) {
      outcome.handshake = handshake::run_quantum_handshake(pmk, pmk, scenario.qkd_params(), scenario.channel_config(),
                                                           scenario.eve_strategy(), classical, rng, hs);
    } else {
      outcome.handshake = handshake::run_standard_handshake(pmk, pmk, classical, rng, hs);
    }
    if (!outcome.handshake->qkd_rounds.empty()) {
      outcome.qkd = outcome.handshake->qkd_rounds.back();
      fill_from_qkd(row, *outcome.qkd);
    } else {
      row.verdict = "none";
    }
    row.handshake_outcome = outcome.handshake->outcome();
  }

  if (options.timing) {
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  if (options.transcripts) outcome.transcript = render_transcript(classical);
  return outcome;
}

ScenarioRun run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  ScenarioRun run;
  run.report.scenario = scenario;
  const std::size_t n = scenario.trials;
  std::vector<TrialOutcome> outcomes(n);

  const unsigned workers = std::max(1U, std::min<unsigned>(options.jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) outcomes[i] = run_trial(scenario, scenario.seed + i, options);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            outcomes[i] = run_trial(scenario, scenario.seed + i, options);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  run.report.rows.reserve(n);
  for (auto& o : outcomes) {
    run.report.rows.push_back(std::move(o.row));
    if (options.transcripts) run.transcripts.push_back(std::move(o.transcript));
  }
  return run;
}

std::vector<SweepPoint> sweep(const Scenario& scenario, std::string_view parameter,
                              const std::vector<std::string>& values, const RunOptions& options) {
  if (!Scenario::is_sweepable(parameter)) {
    throw Error(ErrorCode::UnknownParameter, fmt::format("'{}' is not a sweepable parameter", parameter));
  }
  std::vector<SweepPoint> points;
  for (const auto& v : values) {
    auto s = scenario;
    s.set(parameter, v);
    points.push_back({v, run_scenario(s, options).report});
  }
  return points;
}

std::string sweep_csv(std::string_view parameter, const std::vector<SweepPoint>& points) {
  std::string out = fmt::format("{},{}\n", parameter, kCsvHeader);
  for (const auto& p : points) {
    for (const auto& r : p.report.rows) out += fmt::format("{},{}\n", p.value, csv_row(r));
  }
  return out;
}

}  // namespace qkdlab::lab
