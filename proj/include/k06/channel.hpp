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

#ifndef K06_CHANNEL_HPP_
#define K06_CHANNEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "k06/quantum.hpp"
#include "k06/random.hpp"

namespace k06 {

// Which leg of the exchange a pulse or reading belongs to. S1 is Alice's
// first transmission, S2 Bob's reply, S3 Alice's return leg and kFinal the
// reading Bob takes before decoding.
enum class Stage : std::uint8_t { kS1, kS2, kS3, kFinal };

inline constexpr Stage kAllStages[] = {Stage::kS1, Stage::kS2, Stage::kS3,
                                       Stage::kFinal};

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

enum class Emission : std::uint8_t {
  kPoisson,
  // Every pulse carries exactly round(mean_photons) photons.
  kFixed,
};

class SourceModel {
 public:
  // Throws std::invalid_argument unless mean_photons > 0 and
  // attenuation is in (0, 1].
  explicit SourceModel(double mean_photons, double attenuation = 1.0,
                       Emission emission = Emission::kPoisson);

  double mean_photons() const { return mean_photons_; }
  double attenuation() const { return attenuation_; }
  Emission emission() const { return emission_; }

  friend bool operator==(const SourceModel&, const SourceModel&) = default;

 private:
  double mean_photons_;
  double attenuation_;
  Emission emission_;
};

struct Pulse {
  std::uint64_t photon_count = 0;
  PolarizationState polarization;
  Stage stage = Stage::kS1;

  friend bool operator==(const Pulse&, const Pulse&) = default;
};

using PulseTrain = std::vector<Pulse>;

struct IntensityReading {
  std::uint64_t photons_consumed = 0;
  Stage stage = Stage::kS1;
  double expected = 0.0;
};

struct Split {
  Pulse taken;
  Pulse forwarded;
};

struct Tap {
  IntensityReading reading;
  Pulse forwarded;
};

Pulse emit_pulse(const SourceModel& source, PolarizationState polarization,
                 Rng& rng);

// Removes exactly min(n, photon_count) photons.
Split siphon(const Pulse& pulse, std::uint64_t n);

// Beam splitter: each photon is diverted independently with probability
// `fraction`. Throws std::invalid_argument outside [0, 1].
Split siphon_fraction(const Pulse& pulse, double fraction, Rng& rng);

// Benign loss: each photon survives with probability source.attenuation().
Pulse attenuate(const Pulse& pulse, const SourceModel& source, Rng& rng);

// Consumes min(tap_photons, photon_count) photons for an intensity reading.
// `expected` is copied into the reading for the record.
Tap tap_intensity(const Pulse& pulse, std::uint64_t tap_photons,
                  double expected = 0.0);

}  // namespace k06

#endif  // K06_CHANNEL_HPP_
