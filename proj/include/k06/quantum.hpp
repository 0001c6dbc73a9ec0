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

#ifndef K06_QUANTUM_HPP_
#define K06_QUANTUM_HPP_

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "k06/random.hpp"

namespace k06 {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Reduces `x` into [0, period). Never returns `period` itself.
double wrap_angle(double x, double period);

// Shortest distance between two linear-polarization angles on the circle of
// circumference pi.
double polarization_distance(double a, double b);

// Linear polarization. Physically pi-periodic, so the angle is stored as its
// representative in [0, pi).
class PolarizationState {
 public:
  constexpr PolarizationState() = default;
  explicit PolarizationState(double angle) : angle_(wrap_angle(angle, kPi)) {}

  // Horizontal carries bit 0, vertical carries bit 1.
  static PolarizationState from_bit(std::uint8_t bit);

  double angle() const { return angle_; }

  friend bool operator==(const PolarizationState&,
                         const PolarizationState&) = default;

 private:
  double angle_ = 0.0;
};

// A planar rotation of the polarization plane. Rotations compose by angle
// addition, so any two of them commute. Stored in [0, 2pi).
class Rotation {
 public:
  constexpr Rotation() = default;
  explicit Rotation(double theta) : theta_(wrap_angle(theta, kTwoPi)) {}

  static Rotation identity() { return Rotation(); }
  // Uniform on [0, 2pi).
  static Rotation random(Rng& rng);

  double theta() const { return theta_; }

  friend bool operator==(const Rotation&, const Rotation&) = default;

 private:
  double theta_ = 0.0;
};

PolarizationState rotate(PolarizationState state, Rotation r);
Rotation compose(Rotation a, Rotation b);
Rotation inverse(Rotation a);

enum class Basis : std::uint8_t { kHV, kDiagonal };

std::string to_string(Basis basis);

struct MeasurementOutcome {
  std::uint64_t v_count = 0;
  std::uint64_t h_count = 0;
  Basis basis = Basis::kHV;

  std::uint64_t consumed() const { return v_count + h_count; }

  friend bool operator==(const MeasurementOutcome&,
                         const MeasurementOutcome&) = default;
};

// Probability that one photon in `state` is projected onto the "vertical"
// outcome of `basis` (the +45 degree outcome for the diagonal basis).
double vertical_probability(PolarizationState state, Basis basis);

// Projects `photons` independent photons onto `basis`.
MeasurementOutcome measure(PolarizationState state, std::uint64_t photons,
                           Basis basis, Rng& rng);

// Thrown when HV counts fix sin^2 of the angle but no diagonal photons are
// available to choose between theta and pi - theta.
class AmbiguousEstimate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maximum-likelihood polarization angle in [0, pi) from one HV and one
// diagonal measurement. The HV fraction gives sin^2(theta); the diagonal
// counts pick between the two candidates theta and pi - theta.
//
// Throws std::invalid_argument if `hv` is not an HV outcome with at least one
// photon or `diag` is not a diagonal outcome, and AmbiguousEstimate when the
// sign cannot be resolved.
double estimate_angle(const MeasurementOutcome& hv,
                      const MeasurementOutcome& diag);

}  // namespace k06

#endif  // K06_QUANTUM_HPP_
