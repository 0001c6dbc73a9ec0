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

#include "k06/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace k06 {

double wrap_angle(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod of a tiny negative number plus period can round up to period.
  if (r >= period) r = 0.0;
  return r;
}

double polarization_distance(double a, double b) {
  const double d = wrap_angle(a - b, kPi);
  return std::min(d, kPi - d);
}

PolarizationState PolarizationState::from_bit(std::uint8_t bit) {
  if (bit > 1) throw std::invalid_argument("bit value must be 0 or 1");
  return PolarizationState(bit == 0 ? 0.0 : kHalfPi);
}

Rotation Rotation::random(Rng& rng) {
  return Rotation(std::uniform_real_distribution<double>(0.0, kTwoPi)(rng));
}

PolarizationState rotate(PolarizationState state, Rotation r) {
  return PolarizationState(state.angle() + r.theta());
}

Rotation compose(Rotation a, Rotation b) {
  return Rotation(a.theta() + b.theta());
}

Rotation inverse(Rotation a) { return Rotation(kTwoPi - a.theta()); }

std::string to_string(Basis basis) {
  return basis == Basis::kHV ? "HV" : "DIAGONAL";
}

double vertical_probability(PolarizationState state, Basis basis) {
  const double offset = basis == Basis::kHV ? 0.0 : 0.25 * kPi;
  const double s = std::sin(state.angle() - offset);
  return std::clamp(s * s, 0.0, 1.0);
}

MeasurementOutcome measure(PolarizationState state, std::uint64_t photons,
                           Basis basis, Rng& rng) {
  MeasurementOutcome out;
  out.basis = basis;
  if (photons == 0) return out;
  const double p = vertical_probability(state, basis);
  if (p <= 0.0) {
    out.v_count = 0;
  } else if (p >= 1.0) {
    out.v_count = photons;
  } else {
    out.v_count = std::binomial_distribution<std::uint64_t>(photons, p)(rng);
  }
  out.h_count = photons - out.v_count;
  return out;
}

double estimate_angle(const MeasurementOutcome& hv,
                      const MeasurementOutcome& diag) {
  if (hv.basis != Basis::kHV || diag.basis != Basis::kDiagonal) {
    throw std::invalid_argument("estimate_angle expects (HV, DIAGONAL) outcomes");
  }
  if (hv.consumed() == 0) {
    throw std::invalid_argument("estimate_angle needs at least one HV photon");
  }
  const double s = static_cast<double>(hv.v_count) /
                   static_cast<double>(hv.consumed());
  const double base = std::asin(std::sqrt(s));  // in [0, pi/2]
  if (hv.v_count == 0 || hv.h_count == 0) return wrap_angle(base, kPi);
  if (diag.consumed() == 0) {
    throw AmbiguousEstimate(
        "HV counts leave theta vs pi - theta open and no diagonal photons "
        "were measured");
  }
  // P(diag vertical) = (1 - sin 2theta) / 2: below one half for theta in
  // (0, pi/2), above for theta in (pi/2, pi). Ties keep `base`.
  if (2 * diag.v_count > diag.consumed()) return wrap_angle(kPi - base, kPi);
  return base;
}

}  // namespace k06
