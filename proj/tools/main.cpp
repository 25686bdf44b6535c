// qkdlab: run QKD and handshake experiments from scenario files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qkdlab/errors.hpp"
#include "qkdlab/runner.hpp"
#include "qkdlab/scenario.hpp"

namespace fs = std::filesystem;
using namespace qkdlab;

namespace {

struct CommonArgs {
  std::string scenario_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool transcripts = false;
  bool timing = false;
  unsigned jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_file, "Scenario file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "Override a scenario value, e.g. --set eve.kind=intercept");
  cmd->add_option("--out", args.out_dir, "Output directory")->required();
  cmd->add_flag("--transcripts", args.transcripts, "Write one transcript_<seed>.log per trial");
  cmd->add_flag("--timing", args.timing, "Record wall-clock time per trial (reports stop being reproducible)");
  cmd->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::Range(1U, 256U));
}

lab::Scenario build_scenario(const CommonArgs& args) {
  auto s = args.scenario_file.empty() ? lab::Scenario{} : lab::load_scenario(args.scenario_file);
  for (const auto& o : args.overrides) lab::apply_override(s, o);
  s.validate();
  return s;
}

lab::RunOptions options_of(const CommonArgs& args) { return {args.timing, args.transcripts, args.jobs}; }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  out << text;
}

void write_run(const fs::path& dir, const lab::ScenarioRun& run) {
  fs::create_directories(dir);
  write_file(dir / "report.csv", lab::to_csv(run.report));
  write_file(dir / "report.json", lab::to_json(run.report));
  for (std::size_t i = 0; i < run.transcripts.size(); ++i) {
    write_file(dir / fmt::format("transcript_{}.log", run.report.rows[i].seed), run.transcripts[i]);
  }
}

void summarize(const lab::RunReport& report) {
  fmt::print("{} trial(s)", report.rows.size());
  if (const auto sift = report.aggregate("sift_fraction")) fmt::print(", mean sift fraction {:.4f}", sift->mean);
  if (const auto qber = report.aggregate("qber")) fmt::print(", mean qber {:.4f}", qber->mean);
  if (const auto key = report.aggregate("final_key_length")) fmt::print(", mean final key {:.1f} bits", key->mean);
  fmt::print("\n");
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    const auto comma = text.find(',', start);
    out.push_back(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkdlab: quantum key distribution and 4-way handshake experiments"};
  app.require_subcommand(1);

  auto* qkd = app.add_subcommand("qkd", "QKD experiments");
  qkd->require_subcommand(1);

  CommonArgs run_args;
  auto* qkd_run = qkd->add_subcommand("run", "Run a scenario");
  add_common(qkd_run, run_args);

  CommonArgs sweep_args;
  std::string param;
  std::string values;
  auto* qkd_sweep = qkd->add_subcommand("sweep", "Run a scenario once per value of one parameter");
  add_common(qkd_sweep, sweep_args);
  qkd_sweep->add_option("--param", param, "Parameter to sweep")->required();
  qkd_sweep->add_option("--values", values, "Comma-separated values")->required();

  auto* hs = app.add_subcommand("handshake", "Handshake experiments");
  hs->require_subcommand(1);
  CommonArgs hs_args;
  auto* hs_run = hs->add_subcommand("run", "Run a scenario in full-handshake mode");
  add_common(hs_run, hs_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (qkd_run->parsed()) {
      const auto scenario = build_scenario(run_args);
      const auto run = lab::run_scenario(scenario, options_of(run_args));
      write_run(run_args.out_dir, run);
      summarize(run.report);
    } else if (qkd_sweep->parsed()) {
      const auto scenario = build_scenario(sweep_args);
      const auto points = lab::sweep(scenario, param, split_values(values), options_of(sweep_args));
      const fs::path out = sweep_args.out_dir;
      fs::create_directories(out);
      write_file(out / "sweep.csv", lab::sweep_csv(param, points));
      for (const auto& p : points) {
        lab::ScenarioRun run{p.report, {}};
        write_run(out / fmt::format("{}={}", param, p.value), run);
        fmt::print("{} = {}: ", param, p.value);
        summarize(p.report);
      }
    } else if (hs_run->parsed()) {
      auto scenario = build_scenario(hs_args);
      scenario.mode = lab::RunMode::FullHandshake;
      const auto run = lab::run_scenario(scenario, options_of(hs_args));
      write_run(hs_args.out_dir, run);
      for (const auto& row : run.report.rows) fmt::print("seed {}: {}\n", row.seed, row.handshake_outcome);
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    return e.code() == ErrorCode::Io ? 1 : 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
