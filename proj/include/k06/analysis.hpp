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

#ifndef K06_ANALYSIS_HPP_
#define K06_ANALYSIS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "k06/adversary.hpp"
#include "k06/channel.hpp"
#include "k06/protocol.hpp"

namespace k06::analysis {

// A binomial proportion with its Wilson score interval.
struct Proportion {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double point = 0.0;
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double p) const { return lo <= p && p <= hi; }
};

Proportion wilson_interval(std::size_t successes, std::size_t trials,
                           double confidence = 0.95);

// Everything that determines the per-pulse photon-count law seen by the
// legitimate parties.
struct ChannelScenario {
  SourceModel source{1000.0};
  std::uint64_t tap_budget = 250;
  DetectionRule rule;
  // Keyed by hop (S1, S2, S3); missing hops are untouched.
  std::map<Stage, Siphon> eve_siphon;
  std::size_t message_bits = 1;

  // Tap budget mu/4, every stage checked, `siphon` on every hop.
  static ChannelScenario nominal(double mu, const Siphon& siphon,
                                 double z_threshold);
};

// Largest mean photon number the exact oracle will enumerate.
inline constexpr double kOracleMaxMean = 1e5;
// Source pmf is enumerated until the retained mass reaches 1 - this.
inline constexpr double kOracleTailMass = 1e-12;

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact probability that one pulse trips at least one checked stage.
// Propagates the photon-count pmf through Eve's siphons, channel loss, the
// intensity checks and the fixed taps; shares no code with the sampler.
// Requires alarm_quorum == 1 (std::invalid_argument otherwise) and
// mean_photons <= kOracleMaxMean (std::domain_error otherwise).
double exact_detection_oracle(const ChannelScenario& scenario);

// ChannelScenario::nominal(mu, f:<f>, z).
double exact_detection_oracle(double mu, double f, double z_threshold);

// 1 - (1 - p)^bits: sessions abort when any pulse alarms, and pulses are
// independent.
double session_detection_oracle(const ChannelScenario& scenario);

// Fraction of `trials` simulated sessions that abort, with a Wilson interval.
// Throws std::invalid_argument when trials < 100.
Proportion detection_probability(const ChannelScenario& scenario,
                                 std::size_t trials, std::uint64_t seed,
                                 double confidence = 0.95);

struct RocPoint {
  double z = 0.0;
  double false_alarm = 0.0;
  double detection = 0.0;
};

// Per-pulse operating characteristic from the exact oracle. False alarm is
// the same scenario without Eve. Throws std::invalid_argument on an empty
// grid.
std::vector<RocPoint> roc_sweep(const ChannelScenario& attacked,
                                std::span<const double> z_grid);
std::vector<RocPoint> roc_sweep(double mu, double f,
                                std::span<const double> z_grid);

struct RmsePoint {
  std::uint64_t photons = 0;
  double rmse = 0.0;
};

// RMSE (on the pi-periodic circle) of estimate_angle when `photons` are split
// evenly over the two bases. True angles are uniform on [0, pi) unless
// `true_angle` is given. photons == 0 yields NaN.
std::vector<RmsePoint> leakage_vs_n(std::span<const std::uint64_t> n_grid,
                                    std::size_t trials, std::uint64_t seed,
                                    std::optional<double> true_angle = {});

// Least-squares slope of log(rmse) against log(photons).
double log_log_slope(std::span<const RmsePoint> points);

inline constexpr std::size_t kReadFloorTrials = 20000;
inline constexpr std::uint64_t kReadFloorSeed = 0x6b30365f666c6f6fULL;

// Smallest photon count whose Monte Carlo RMSE is at most `target_rmse`.
std::uint64_t read_floor_for_rmse(double target_rmse,
                                  std::size_t trials = kReadFloorTrials,
                                  std::uint64_t seed = kReadFloorSeed);

struct ExperimentPlan {
  std::vector<double> mu;
  std::vector<Siphon> siphon;
  std::vector<double> z;
  std::size_t message_bits = 1;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  double target_accuracy = 0.95;
  double tap_fraction = 0.25;
  double attenuation = 1.0;
  std::vector<Stage> checked_stages{Stage::kS2, Stage::kS3, Stage::kFinal};
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

// Throws std::invalid_argument for an empty grid, zero trials or
// out-of-range numbers.
void validate(const ExperimentPlan& plan);

// One grid cell. Sessions run to completion with alarms recorded, so the
// same runs yield both the abort probability and Eve's leakage.
struct TradeoffPoint {
  double mu = 0.0;
  Siphon siphon = Siphon::photons(0);
  double z = 0.0;
  std::size_t trials = 0;
  Proportion detection;
  Proportion eve_accuracy;
  // Eve's message-angle RMSE over bits with all three hop estimates; NaN if
  // there were none.
  double rmse = 0.0;
  // session_detection_oracle for the cell; NaN beyond the oracle's range.
  double oracle_value = 0.0;
};

// Cells in mu-major, then siphon, then z order. Each cell draws from a
// stream derived from (master_seed, cell index), so results do not depend on
// scheduling.
std::vector<TradeoffPoint> eve_accuracy_sweep(const ExperimentPlan& plan);

// First siphon, in grid order, at which Eve's accuracy reaches `target`
// among the cells with the given mu and z.
std::optional<Siphon> accuracy_threshold(std::span<const TradeoffPoint> cells,
                                         double mu, double z, double target);

inline constexpr std::string_view kSweepCsvHeader =
    "mu,n_or_f,z,trials,detection,det_lo,det_hi,eve_acc,acc_lo,acc_hi,rmse,"
    "oracle_value";

void write_sweep_csv(std::ostream& os, std::span<const TradeoffPoint> cells);

}  // namespace k06::analysis

#endif  // K06_ANALYSIS_HPP_
