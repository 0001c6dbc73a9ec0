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

#include <cmath>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <gtest/gtest.h>

namespace k06 {
namespace {

constexpr double kTol = 1e-12;

double rotation_distance(const Rotation& a, const Rotation& b) {
  const double d = wrap_angle(a.theta() - b.theta(), kTwoPi);
  return std::min(d, kTwoPi - d);
}

TEST(PolarizationStateTest, AngleIsReducedModuloPi) {
  Rng rng(1);
  std::uniform_real_distribution<double> wide(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = wide(rng);
    const PolarizationState s(a);
    EXPECT_GE(s.angle(), 0.0);
    EXPECT_LT(s.angle(), kPi);
    EXPECT_LT(polarization_distance(s.angle(), a), 1e-12);
  }
  EXPECT_EQ(PolarizationState(kPi).angle(), 0.0);
  EXPECT_EQ(PolarizationState(-1e-300).angle(), 0.0);
}

TEST(PolarizationStateTest, BitEncodingIsExact) {
  EXPECT_EQ(PolarizationState::from_bit(0).angle(), 0.0);
  EXPECT_EQ(PolarizationState::from_bit(1).angle(), kHalfPi);
  EXPECT_THROW(PolarizationState::from_bit(2), std::invalid_argument);
}

TEST(RotationTest, ThetaIsReducedModuloTwoPi) {
  EXPECT_EQ(Rotation(kTwoPi).theta(), 0.0);
  EXPECT_NEAR(Rotation(-kHalfPi).theta(), 1.5 * kPi, kTol);
}

TEST(RotateTest, Identity) {
  EXPECT_EQ(rotate(PolarizationState(0.0), Rotation(0.0)).angle(), 0.0);
}

TEST(RotateTest, QuarterTurnTakesHorizontalToVertical) {
  EXPECT_NEAR(rotate(PolarizationState::from_bit(0), Rotation(kHalfPi)).angle(),
              kHalfPi, kTol);
}

TEST(RotateTest, RotationsCommute) {
  Rng rng(2);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PolarizationState s(angle(rng));
    const Rotation a = Rotation::random(rng);
    const Rotation b = Rotation::random(rng);
    const double ab = rotate(rotate(s, a), b).angle();
    const double ba = rotate(rotate(s, b), a).angle();
    worst = std::max(worst, polarization_distance(ab, ba));
  }
  EXPECT_LT(worst, kTol);
}

TEST(ComposeTest, Examples) {
  EXPECT_NEAR(compose(Rotation(1.0), Rotation(0.0)).theta(), 1.0, kTol);
  EXPECT_NEAR(compose(Rotation(1.5 * kPi), Rotation(1.5 * kPi)).theta(), kPi, kTol);
}

TEST(ComposeTest, CommutesAndInverseCancels) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Rotation a = Rotation::random(rng);
    const Rotation b = Rotation::random(rng);
    EXPECT_LT(rotation_distance(compose(a, b), compose(b, a)), kTol);
    EXPECT_LT(rotation_distance(compose(a, inverse(a)), Rotation::identity()), kTol);
  }
}

TEST(InverseTest, Examples) {
  EXPECT_EQ(inverse(Rotation(0.0)).theta(), 0.0);
  EXPECT_NEAR(inverse(Rotation(kPi / 3)).theta(), 5 * kPi / 3, kTol);
}

TEST(InverseTest, RoundTripRestoresState) {
  Rng rng(4);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int i = 0; i < 1000; ++i) {
    const PolarizationState s(angle(rng));
    const Rotation a = Rotation::random(rng);
    EXPECT_LT(polarization_distance(rotate(rotate(s, a), inverse(a)).angle(),
                                    s.angle()),
              kTol);
  }
}

TEST(MeasureTest, EigenstatesAreDeterministic) {
  Rng rng(5);
  const auto h = measure(PolarizationState(0.0), 100, Basis::kHV, rng);
  EXPECT_EQ(h.v_count, 0u);
  EXPECT_EQ(h.h_count, 100u);
  const auto v = measure(PolarizationState(kHalfPi), 100, Basis::kHV, rng);
  EXPECT_EQ(v.v_count, 100u);
  EXPECT_EQ(v.h_count, 0u);
}

TEST(MeasureTest, ZeroPhotonsGiveEmptyOutcome) {
  Rng rng(6);
  const auto m = measure(PolarizationState(0.3), 0, Basis::kDiagonal, rng);
  EXPECT_EQ(m.consumed(), 0u);
  EXPECT_EQ(m.basis, Basis::kDiagonal);
}

TEST(MeasureTest, DiagonalStateSplitsEvenlyWithinThreeSigma) {
  // Exact binomial mass of the +-3 sigma band [498500, 501500].
  const boost::math::binomial_distribution<double> law(1e6, 0.5);
  const double band = boost::math::cdf(law, 501500.0) - boost::math::cdf(law, 498499.0);
  ASSERT_GT(band, 0.997);

  Rng rng(7);
  const auto m = measure(PolarizationState(kPi / 4), 1'000'000, Basis::kHV, rng);
  const double frac = static_cast<double>(m.v_count) / 1e6;
  EXPECT_GE(frac, 0.4985);
  EXPECT_LE(frac, 0.5015);
}

TEST(MeasureTest, CountsAlwaysSumToPhotons) {
  Rng rng(8);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::uniform_int_distribution<std::uint64_t> photons(0, 5000);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = photons(rng);
    const Basis b = i % 2 ? Basis::kHV : Basis::kDiagonal;
    EXPECT_EQ(measure(PolarizationState(angle(rng)), n, b, rng).consumed(), n);
  }
}

TEST(MeasureTest, SameSeedSameOutcome) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(measure(PolarizationState(0.4), 777, Basis::kHV, a),
              measure(PolarizationState(0.4), 777, Basis::kHV, b));
  }
}

TEST(VerticalProbabilityTest, DiagonalBasisIsShiftedByQuarterPi) {
  EXPECT_NEAR(vertical_probability(PolarizationState(kPi / 4), Basis::kDiagonal), 0.0, kTol);
  EXPECT_NEAR(vertical_probability(PolarizationState(3 * kPi / 4), Basis::kDiagonal), 1.0, kTol);
  EXPECT_NEAR(vertical_probability(PolarizationState(kPi / 6), Basis::kHV), 0.25, kTol);
}

TEST(EstimateAngleTest, PureStates) {
  const MeasurementOutcome diag{25, 25, Basis::kDiagonal};
  EXPECT_EQ(estimate_angle({0, 50, Basis::kHV}, diag), 0.0);
  EXPECT_NEAR(estimate_angle({50, 0, Basis::kHV}, diag), kHalfPi, kTol);
}

TEST(EstimateAngleTest, DiagonalCountsResolveTheSign) {
  // sin^2 = 1/4 gives pi/6 or 5pi/6; the diagonal basis separates them.
  const MeasurementOutcome hv{25, 75, Basis::kHV};
  EXPECT_NEAR(estimate_angle(hv, {10, 90, Basis::kDiagonal}), kPi / 6, kTol);
  EXPECT_NEAR(estimate_angle(hv, {90, 10, Basis::kDiagonal}), 5 * kPi / 6, kTol);
}

TEST(EstimateAngleTest, SingleBasisIsAmbiguous) {
  EXPECT_THROW(estimate_angle({25, 75, Basis::kHV}, {0, 0, Basis::kDiagonal}),
               AmbiguousEstimate);
  // Unambiguous when HV already pins the angle.
  EXPECT_EQ(estimate_angle({0, 10, Basis::kHV}, {0, 0, Basis::kDiagonal}), 0.0);
}

TEST(EstimateAngleTest, RejectsMissingOrSwappedBases) {
  EXPECT_THROW(estimate_angle({0, 0, Basis::kHV}, {5, 5, Basis::kDiagonal}),
               std::invalid_argument);
  EXPECT_THROW(estimate_angle({5, 5, Basis::kDiagonal}, {5, 5, Basis::kHV}),
               std::invalid_argument);
}

TEST(EstimateAngleTest, RmseAtSixteenthTurnIsSmall) {
  // Delta method: SE = 1 / (2 sqrt(n)) = 0.005 rad at n = 1e4 per basis.
  const std::uint64_t n = 10'000;
  const double truth = kPi / 6;
  Rng rng(10);
  double sq = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto hv = measure(PolarizationState(truth), n, Basis::kHV, rng);
    const auto dg = measure(PolarizationState(truth), n, Basis::kDiagonal, rng);
    const double e = polarization_distance(estimate_angle(hv, dg), truth);
    sq += e * e;
  }
  const double rmse = std::sqrt(sq / 1000);
  EXPECT_LT(rmse, 0.02);
  EXPECT_NEAR(rmse, 0.005, 0.001);
}

}  // namespace
}  // namespace k06
