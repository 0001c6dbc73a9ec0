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

#ifndef K06_PROTOCOL_HPP_
#define K06_PROTOCOL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "k06/bits.hpp"
#include "k06/channel.hpp"
#include "k06/quantum.hpp"
#include "k06/random.hpp"

namespace k06 {

// Smallest number of photons (split evenly over the HV and diagonal bases)
// with which an eavesdropper estimates a polarization angle to within 0.1 rad
// RMSE. Kept in sync with analysis::read_floor_for_rmse(0.1) by a unit test.
inline constexpr std::uint64_t kDefaultEveReadFloor = 61;

// The secret rotation never leaves this struct: transcripts and every file
// writer only see counts.
struct PartyConfig {
  Rotation secret_rotation;
  std::uint64_t tap_budget = 0;
};

// Alarm when the photons arriving at a checked stage fall below
// expected - z * sqrt(expected). Stages absent from expected_by_stage are not
// checked. Expectations are arrival counts before the party's own tap.
struct DetectionRule {
  std::map<Stage, double> expected_by_stage;
  double z_threshold = 5.0;
  // Pulses that must alarm within one stage before the session aborts.
  std::size_t alarm_quorum = 1;

  // Expected arrivals for a tap ledger where every party consumes
  // `tap_budget` photons and each hop transmits `attenuation` of its input:
  // with no loss, N, N - tap and N - 2 tap at S2, S3 and FINAL.
  static DetectionRule from_ledger(const SourceModel& source,
                                   std::uint64_t tap_budget, double z_threshold,
                                   const std::vector<Stage>& checked = {
                                       Stage::kS2, Stage::kS3, Stage::kFinal});

  bool checks(Stage stage) const { return expected_by_stage.contains(stage); }
  // Alarm cutoff; observations strictly below it alarm.
  double cutoff(Stage stage) const;
  bool alarms(Stage stage, std::uint64_t observed) const;
};

// Throws std::invalid_argument on negative or NaN z, zero quorum or
// negative expectations.
void validate(const DetectionRule& rule);

struct LowPowerPolicy {
  std::uint64_t eve_read_floor = kDefaultEveReadFloor;
  // When set, an S3 alarm does not abort if every alarming pulse leaves Alice
  // with at most eve_read_floor photons: too few for another useful reading.
  bool continue_below_floor = false;
};

struct StageOutcome {
  PulseTrain train;
  std::vector<IntensityReading> readings;
  std::vector<bool> pulse_alarms;
  // Per pulse, forwarded photons <= eve_read_floor (S3 only).
  std::vector<bool> low_power;
  bool alarm = false;
  // Alarm overridden by LowPowerPolicy::continue_below_floor.
  bool continued_low_power = false;

  bool aborted() const { return alarm && !continued_low_power; }
};

class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(std::size_t bit_index);
  std::size_t bit_index() const { return bit_index_; }

 private:
  std::size_t bit_index_;
};

struct FinalOutcome {
  std::vector<IntensityReading> readings;
  std::vector<bool> pulse_alarms;
  bool alarm = false;
  // HV measurement per pulse; empty when the stage alarmed.
  std::vector<MeasurementOutcome> measurements;
  BitString decoded;
  std::optional<std::size_t> decode_failure;

  bool aborted() const { return alarm; }
};

// One pulse per bit, polarization U_A applied to the bit encoding.
PulseTrain alice_stage1(const BitString& bits, const PartyConfig& alice,
                        const SourceModel& source, Rng& rng);

// Bob reads arrivals at S2, taps, applies U_B and returns the train to Alice.
StageOutcome bob_stage2(const PulseTrain& train, const PartyConfig& bob,
                        const DetectionRule& rule);

// Alice reads arrivals at S3, taps, removes U_A and sends the train back.
StageOutcome alice_stage3(const PulseTrain& train, const PartyConfig& alice,
                          const DetectionRule& rule,
                          const LowPowerPolicy& policy = {});

// Bob's FINAL check followed by U_B^-1 and a majority-vote HV decode of the
// remaining photons. Decoding is skipped when the check alarms.
FinalOutcome bob_finalize(const PulseTrain& train, const PartyConfig& bob,
                          const DetectionRule& rule, Rng& rng);

// Majority vote: more vertical than horizontal photons decodes to 1. Throws
// DecodeError on a tie, which includes an empty pulse.
std::uint8_t decode_outcome(const MeasurementOutcome& outcome,
                            std::size_t bit_index);

}  // namespace k06

#endif  // K06_PROTOCOL_HPP_
