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

#include "k06/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace k06 {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kS1:
      return "S1";
    case Stage::kS2:
      return "S2";
    case Stage::kS3:
      return "S3";
    case Stage::kFinal:
      return "FINAL";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view text) {
  for (Stage s : kAllStages) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

SourceModel::SourceModel(double mean_photons, double attenuation,
                         Emission emission)
    : mean_photons_(mean_photons),
      attenuation_(attenuation),
      emission_(emission) {
  if (!(mean_photons > 0.0) || !std::isfinite(mean_photons)) {
    throw std::invalid_argument("mean_photons must be a positive finite number");
  }
  if (!(attenuation > 0.0 && attenuation <= 1.0)) {
    throw std::invalid_argument("attenuation must lie in (0, 1]");
  }
}

Pulse emit_pulse(const SourceModel& source, PolarizationState polarization,
                 Rng& rng) {
  Pulse p;
  p.polarization = polarization;
  p.stage = Stage::kS1;
  if (source.emission() == Emission::kFixed) {
    p.photon_count = static_cast<std::uint64_t>(std::llround(source.mean_photons()));
  } else {
    p.photon_count =
        std::poisson_distribution<std::uint64_t>(source.mean_photons())(rng);
  }
  return p;
}

namespace {

Split split_off(const Pulse& pulse, std::uint64_t taken) {
  Split s{pulse, pulse};
  s.taken.photon_count = taken;
  s.forwarded.photon_count = pulse.photon_count - taken;
  return s;
}

std::uint64_t binomial(std::uint64_t n, double p, Rng& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::uint64_t>(n, p)(rng);
}

}  // namespace

Split siphon(const Pulse& pulse, std::uint64_t n) {
  return split_off(pulse, std::min(n, pulse.photon_count));
}

Split siphon_fraction(const Pulse& pulse, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("siphon fraction must lie in [0, 1]");
  }
  return split_off(pulse, binomial(pulse.photon_count, fraction, rng));
}

Pulse attenuate(const Pulse& pulse, const SourceModel& source, Rng& rng) {
  Pulse out = pulse;
  out.photon_count = binomial(pulse.photon_count, source.attenuation(), rng);
  return out;
}

Tap tap_intensity(const Pulse& pulse, std::uint64_t tap_photons,
                  double expected) {
  const std::uint64_t consumed = std::min(tap_photons, pulse.photon_count);
  Tap t;
  t.reading = {consumed, pulse.stage, expected};
  t.forwarded = pulse;
  t.forwarded.photon_count = pulse.photon_count - consumed;
  return t;
}

}  // namespace k06
