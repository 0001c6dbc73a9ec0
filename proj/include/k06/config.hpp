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

#ifndef K06_CONFIG_HPP_
#define K06_CONFIG_HPP_

// Scenario and sweep-plan files: INI-style text with [sections] and
// `key = value` lines; `#` or `;` start a comment line. Keys are documented in
// README.md. Unknown sections or keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "k06/adversary.hpp"
#include "k06/analysis.hpp"
#include "k06/bits.hpp"
#include "k06/channel.hpp"
#include "k06/session.hpp"

namespace k06 {

// Malformed text: bad syntax, or a value that is not a number, flag or list.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed text whose values violate a domain bound, or unknown keys.
class ConfigDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  BitString message;
  std::uint64_t seed = 0;
  HashTiming hash_timing = HashTiming::kBeforeTransmission;
  bool verify_hash = true;
  std::string digest{kDefaultDigest};

  double mu = 1000.0;
  double attenuation = 1.0;
  Emission emission = Emission::kPoisson;

  // Defaults to round(mu / 4).
  std::optional<std::uint64_t> tap_budget;
  double z_threshold = 5.0;
  std::vector<Stage> checked_stages{Stage::kS2, Stage::kS3, Stage::kFinal};
  std::size_t alarm_quorum = 1;
  std::uint64_t eve_read_floor = kDefaultEveReadFloor;
  bool continue_below_floor = false;

  EveMode eve_mode = EveMode::kNone;
  std::map<Stage, Siphon> eve_siphon;
  BitString substitute_bits;
  std::optional<double> eve_theta;

  // Secret rotations are drawn from the seed unless overridden here.
  std::optional<double> alice_theta;
  std::optional<double> bob_theta;

  std::string transcript_path;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::string& path);
std::string serialize(const ScenarioConfig& config);

// Resolves secrets and derived defaults into a runnable session.
SessionConfig to_session(const ScenarioConfig& config);

struct SweepConfig {
  analysis::ExperimentPlan plan;
  std::string csv_path;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

SweepConfig parse_sweep(std::string_view text);
SweepConfig load_sweep(const std::string& path);
std::string serialize(const SweepConfig& config);

}  // namespace k06

#endif  // K06_CONFIG_HPP_
