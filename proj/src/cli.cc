// Copyright 2026 The k06sim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "k06/cli.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "k06/analysis.hpp"
#include "k06/config.hpp"
#include "k06/random.hpp"
#include "k06/session.hpp"

namespace k06::cli {

namespace {

// Stream index for the protocol run itself; secrets use 1..3.
constexpr std::uint64_t kSessionStream = 0;

int config_error(std::ostream& err, const std::exception& e) {
  if (dynamic_cast<const ConfigParseError*>(&e)) {
    err << "config parse error: " << e.what() << '\n';
  } else {
    err << "config domain error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target);
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = load_scenario(options.config_path);
  } catch (const ConfigParseError& e) {
    return config_error(err, e);
  } catch (const ConfigDomainError& e) {
    return config_error(err, e);
  }
  if (options.seed) config.seed = *options.seed;
  if (options.out) config.transcript_path = *options.out;

  const SessionConfig session = to_session(config);
  Rng rng = make_stream(config.seed, kSessionStream);
  const SessionResult result = run_session(session, rng);
  const SessionTranscript& t = result.transcript;
  const int code = exit_code(t);

  std::ostream& summary = config.transcript_path.empty() ? err : out;
  if (config.transcript_path.empty()) {
    write_transcript(out, t);
  } else {
    try {
      write_atomically(config.transcript_path, to_csv(t));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  summary << "session " << t.session_id << ": " << t.alarm_count() << " alarm(s)";
  if (t.aborted_at) summary << ", aborted at " << to_string(*t.aborted_at);
  if (t.decode_failure) summary << ", decode failed at bit " << *t.decode_failure;
  if (t.decoded) summary << ", decoded " << t.decoded->size() << " bit(s)";
  summary << ", hash " << to_string(t.hash_check) << '\n';
  return code;
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  SweepConfig config;
  try {
    config = load_sweep(options.config_path);
    if (options.trials) {
      config.plan.trials = *options.trials;
      analysis::validate(config.plan);
    }
  } catch (const ConfigParseError& e) {
    return config_error(err, e);
  } catch (const ConfigDomainError& e) {
    return config_error(err, e);
  } catch (const std::invalid_argument& e) {
    return config_error(err, ConfigDomainError(e.what()));
  }
  if (options.seed) config.plan.master_seed = *options.seed;
  if (options.out) config.csv_path = *options.out;

  const auto cells = analysis::eve_accuracy_sweep(config.plan);
  std::ostringstream csv;
  analysis::write_sweep_csv(csv, cells);

  std::ostream& summary = config.csv_path.empty() ? err : out;
  if (config.csv_path.empty()) {
    out << csv.str();
  } else {
    try {
      write_atomically(config.csv_path, csv.str());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  for (double mu : config.plan.mu) {
    for (double z : config.plan.z) {
      const auto n_star = analysis::accuracy_threshold(
          cells, mu, z, config.plan.target_accuracy);
      summary << "mu=" << mu << " z=" << z << " threshold(acc>="
              << config.plan.target_accuracy
              << "): " << (n_star ? n_star->to_string() : "none") << '\n';
    }
  }
  return kExitOk;
}

int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err) {
  try {
    analysis::ChannelScenario s;
    s.source = SourceModel(options.mu, options.attenuation);
    s.tap_budget = options.tap_budget
                       ? *options.tap_budget
                       : static_cast<std::uint64_t>(std::llround(options.mu / 4.0));
    s.rule = DetectionRule::from_ledger(s.source, s.tap_budget, options.z);
    const Siphon siphon = Siphon::fraction(options.f);
    if (!siphon.is_noop()) {
      for (Stage hop : {Stage::kS1, Stage::kS2, Stage::kS3}) s.eve_siphon.emplace(hop, siphon);
    }
    const double p = analysis::exact_detection_oracle(s);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", p);
    out << buf << '\n';
    return kExitOk;
  } catch (const std::domain_error& e) {
    err << "oracle infeasible: " << e.what() << '\n';
  } catch (const analysis::TruncationError& e) {
    err << "oracle truncation error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid oracle arguments: " << e.what() << '\n';
  }
  return kExitUsage;
}

namespace {

std::optional<std::uint64_t> env_seed(std::ostream& err, bool& bad) {
  const char* v = std::getenv("K06_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  const std::string s(v);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    err << "K06_SEED must be an unsigned integer, got '" << s << "'\n";
    bad = true;
    return std::nullopt;
  }
  return seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-stage rotation protocol simulator"};
  app.require_subcommand(1);

  RunOptions run;
  std::uint64_t run_seed = 0;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run one session from a scenario file");
  run_cmd->add_option("--config", run.config_path, "Scenario file")->required();
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "Overrides the file seed");
  auto* run_out_opt = run_cmd->add_option("--out", run_out, "Transcript CSV path");

  SweepOptions sweep;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  std::size_t sweep_trials = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment plan, write CSV");
  sweep_cmd->add_option("--config", sweep.config_path, "Plan file")->required();
  auto* sweep_seed_opt =
      sweep_cmd->add_option("--seed", sweep_seed, "Overrides the master seed");
  auto* sweep_out_opt = sweep_cmd->add_option("--out", sweep_out, "CSV path");
  auto* sweep_trials_opt =
      sweep_cmd->add_option("--trials", sweep_trials, "Trials per cell");

  OracleOptions oracle;
  std::uint64_t oracle_tap = 0;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Exact per-pulse detection probability");
  oracle_cmd->add_option("--mu", oracle.mu, "Mean photons per pulse")->required();
  oracle_cmd->add_option("--f", oracle.f, "Eve's siphon fraction on every hop")
      ->required();
  oracle_cmd->add_option("--z", oracle.z, "Alarm threshold")->required();
  auto* oracle_tap_opt =
      oracle_cmd->add_option("--tap", oracle_tap, "Tap budget (default mu/4)");
  oracle_cmd->add_option("--attenuation", oracle.attenuation, "Per-hop transmission");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  bool bad_env = false;
  if (*run_cmd) {
    run.seed = *run_seed_opt ? std::optional(run_seed) : env_seed(std::cerr, bad_env);
    if (bad_env) return kExitUsage;
    if (*run_out_opt) run.out = run_out;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    sweep.seed =
        *sweep_seed_opt ? std::optional(sweep_seed) : env_seed(std::cerr, bad_env);
    if (bad_env) return kExitUsage;
    if (*sweep_out_opt) sweep.out = sweep_out;
    if (*sweep_trials_opt) sweep.trials = sweep_trials;
    return cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*oracle_tap_opt) oracle.tap_budget = oracle_tap;
  return cmd_oracle(oracle, std::cout, std::cerr);
}

}  // namespace k06::cli
