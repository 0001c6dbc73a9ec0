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

#include "k06/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace k06 {

DetectionRule DetectionRule::from_ledger(const SourceModel& source,
                                         std::uint64_t tap_budget,
                                         double z_threshold,
                                         const std::vector<Stage>& checked) {
  DetectionRule rule;
  rule.z_threshold = z_threshold;
  const double t = source.attenuation();
  const double tap = static_cast<double>(tap_budget);
  double arrival = source.mean_photons() * t;
  for (Stage s : {Stage::kS2, Stage::kS3, Stage::kFinal}) {
    if (std::find(checked.begin(), checked.end(), s) != checked.end()) {
      rule.expected_by_stage[s] = arrival;
    }
    arrival = std::max(0.0, arrival - tap) * t;
  }
  validate(rule);
  return rule;
}

double DetectionRule::cutoff(Stage stage) const {
  const auto it = expected_by_stage.find(stage);
  if (it == expected_by_stage.end()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double e = it->second;
  if (std::isinf(z_threshold)) return -std::numeric_limits<double>::infinity();
  return e - z_threshold * std::sqrt(e);
}

bool DetectionRule::alarms(Stage stage, std::uint64_t observed) const {
  return static_cast<double>(observed) < cutoff(stage);
}

void validate(const DetectionRule& rule) {
  if (std::isnan(rule.z_threshold) || rule.z_threshold < 0.0) {
    throw std::invalid_argument("z_threshold must be >= 0");
  }
  if (rule.alarm_quorum == 0) {
    throw std::invalid_argument("alarm_quorum must be >= 1");
  }
  for (const auto& [stage, expected] : rule.expected_by_stage) {
    if (!(expected >= 0.0) || !std::isfinite(expected)) {
      throw std::invalid_argument("expected arrivals at " +
                                  std::string(to_string(stage)) +
                                  " must be finite and >= 0");
    }
  }
}

DecodeError::DecodeError(std::size_t bit_index)
    : std::runtime_error("cannot decode bit " + std::to_string(bit_index) +
                         ": vertical and horizontal counts tie"),
      bit_index_(bit_index) {}

namespace {

void require_stage(const PulseTrain& train, Stage expected, const char* op) {
  for (const auto& p : train) {
    if (p.stage != expected) {
      throw std::invalid_argument(std::string(op) + " expects pulses tagged " +
                                  std::string(to_string(expected)));
    }
  }
}

// Shared arrival check + tap + rotation for Bob's S2 and Alice's S3 legs.
StageOutcome check_tap_rotate(const PulseTrain& train, Stage check_stage,
                              std::uint64_t tap_budget, Rotation applied,
                              const DetectionRule& rule) {
  StageOutcome out;
  out.train.reserve(train.size());
  out.readings.reserve(train.size());
  const double expected = rule.checks(check_stage)
                              ? rule.expected_by_stage.at(check_stage)
                              : 0.0;
  std::size_t alarms = 0;
  for (const auto& pulse : train) {
    Pulse arriving = pulse;
    arriving.stage = check_stage;
    Tap tap = tap_intensity(arriving, tap_budget, expected);
    const bool alarm = rule.alarms(
        check_stage, tap.reading.photons_consumed + tap.forwarded.photon_count);
    alarms += alarm ? 1 : 0;
    out.pulse_alarms.push_back(alarm);
    out.readings.push_back(tap.reading);
    tap.forwarded.polarization = rotate(tap.forwarded.polarization, applied);
    out.train.push_back(tap.forwarded);
  }
  out.alarm = alarms >= rule.alarm_quorum;
  return out;
}

}  // namespace

PulseTrain alice_stage1(const BitString& bits, const PartyConfig& alice,
                        const SourceModel& source, Rng& rng) {
  if (bits.empty()) throw std::invalid_argument("message must be nonempty");
  PulseTrain train;
  train.reserve(bits.size());
  for (auto bit : bits) {
    train.push_back(emit_pulse(
        source, rotate(PolarizationState::from_bit(bit), alice.secret_rotation),
        rng));
  }
  return train;
}

StageOutcome bob_stage2(const PulseTrain& train, const PartyConfig& bob,
                        const DetectionRule& rule) {
  require_stage(train, Stage::kS1, "bob_stage2");
  return check_tap_rotate(train, Stage::kS2, bob.tap_budget,
                          bob.secret_rotation, rule);
}

StageOutcome alice_stage3(const PulseTrain& train, const PartyConfig& alice,
                          const DetectionRule& rule,
                          const LowPowerPolicy& policy) {
  require_stage(train, Stage::kS2, "alice_stage3");
  StageOutcome out = check_tap_rotate(train, Stage::kS3, alice.tap_budget,
                                      inverse(alice.secret_rotation), rule);
  bool alarms_all_low = true;
  for (std::size_t i = 0; i < out.train.size(); ++i) {
    const bool low = out.train[i].photon_count <= policy.eve_read_floor;
    out.low_power.push_back(low);
    if (out.pulse_alarms[i] && !low) alarms_all_low = false;
  }
  out.continued_low_power =
      out.alarm && policy.continue_below_floor && alarms_all_low;
  return out;
}

std::uint8_t decode_outcome(const MeasurementOutcome& outcome,
                            std::size_t bit_index) {
  if (outcome.v_count == outcome.h_count) throw DecodeError(bit_index);
  return outcome.v_count > outcome.h_count ? 1 : 0;
}

FinalOutcome bob_finalize(const PulseTrain& train, const PartyConfig& bob,
                          const DetectionRule& rule, Rng& rng) {
  require_stage(train, Stage::kS3, "bob_finalize");
  // Reuse the tap path; U_B^-1 is applied after the reading.
  StageOutcome checked = check_tap_rotate(train, Stage::kFinal, bob.tap_budget,
                                          inverse(bob.secret_rotation), rule);
  FinalOutcome out;
  out.readings = std::move(checked.readings);
  out.pulse_alarms = std::move(checked.pulse_alarms);
  out.alarm = checked.alarm;
  if (out.alarm) return out;

  out.measurements.reserve(checked.train.size());
  out.decoded.reserve(checked.train.size());
  for (std::size_t i = 0; i < checked.train.size(); ++i) {
    const Pulse& p = checked.train[i];
    out.measurements.push_back(
        measure(p.polarization, p.photon_count, Basis::kHV, rng));
    if (out.decode_failure) continue;
    try {
      out.decoded.push_back(decode_outcome(out.measurements.back(), i));
    } catch (const DecodeError& e) {
      out.decode_failure = e.bit_index();
    }
  }
  if (out.decode_failure) out.decoded.clear();
  return out;
}

}  // namespace k06
