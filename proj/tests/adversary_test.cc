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

#include "k06/adversary.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "k06/protocol.hpp"
#include "stat_util.hpp"

namespace k06 {
namespace {

constexpr double kTol = 1e-12;

StageEstimate exact(double angle, std::uint64_t n = 10'000) {
  return StageEstimate{wrap_angle(angle, kPi), n, n};
}

PulseTrain s1_train(std::size_t n, std::uint64_t photons, Rng& rng) {
  PulseTrain t;
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back(Pulse{photons, PolarizationState(angle(rng)), Stage::kS1});
  }
  return t;
}

TEST(SiphonSpecTest, ParseAndFormat) {
  EXPECT_EQ(Siphon::parse("n:250"), Siphon::photons(250));
  EXPECT_EQ(Siphon::parse("f:0.25"), Siphon::fraction(0.25));
  EXPECT_EQ(Siphon::photons(8).to_string(), "n:8");
  EXPECT_EQ(Siphon::parse(Siphon::fraction(0.125).to_string()), Siphon::fraction(0.125));
  EXPECT_TRUE(Siphon::photons(0).is_noop());
  EXPECT_TRUE(Siphon::fraction(0.0).is_noop());
  EXPECT_THROW(Siphon::parse("x:1"), std::invalid_argument);
  EXPECT_THROW(Siphon::parse("f:1.5"), std::invalid_argument);
  EXPECT_THROW(Siphon::parse("n:-3"), std::invalid_argument);
  EXPECT_THROW(Siphon::fraction(-0.1), std::invalid_argument);
}

TEST(EveModeTest, Names) {
  for (EveMode m : {EveMode::kNone, EveMode::kSiphon, EveMode::kImpersonate}) {
    EXPECT_EQ(parse_eve_mode(to_string(m)), m);
  }
  EXPECT_FALSE(parse_eve_mode("replay"));
}

TEST(EveInterceptTest, ZeroSiphonIsTransparent) {
  Rng rng(1);
  const auto train = s1_train(20, 1000, rng);
  const auto strat = EveStrategy::siphon_every_hop(Siphon::photons(0));
  const auto r = eve_intercept(train, Stage::kS1, strat, rng);
  EXPECT_EQ(r.forwarded, train);
  for (const auto& c : r.captured) EXPECT_EQ(c.photon_count, 0u);
}

TEST(EveInterceptTest, UnconfiguredHopPassesThrough) {
  Rng rng(2);
  const auto train = s1_train(5, 1000, rng);
  EveStrategy strat;
  strat.mode = EveMode::kSiphon;
  strat.siphon_per_stage.emplace(Stage::kS2, Siphon::photons(10));
  const auto r = eve_intercept(train, Stage::kS1, strat, rng);
  EXPECT_EQ(r.forwarded, train);
  EXPECT_EQ(r.captured.size(), train.size());
}

TEST(EveInterceptTest, CountSiphonLeavesNMinusN) {
  Rng rng(3);
  const auto train = s1_train(10, 1000, rng);
  const auto r = eve_intercept(train, Stage::kS1,
                               EveStrategy::siphon_every_hop(Siphon::photons(250)), rng);
  for (std::size_t i = 0; i < train.size(); ++i) {
    EXPECT_EQ(r.forwarded[i].photon_count, 750u);
    EXPECT_EQ(r.captured[i].photon_count, 250u);
    EXPECT_EQ(r.forwarded[i].polarization, train[i].polarization);
    EXPECT_EQ(r.captured[i].polarization, train[i].polarization);
  }
}

TEST(EveInterceptTest, FractionCaptureFitsThinnedPoisson) {
  Rng rng(4);
  const SourceModel src(1000.0);
  PulseTrain train;
  for (int i = 0; i < 10'000; ++i) train.push_back(emit_pulse(src, PolarizationState(0.2), rng));
  const auto r = eve_intercept(train, Stage::kS1,
                               EveStrategy::siphon_every_hop(Siphon::fraction(0.25)), rng);
  std::vector<std::uint64_t> captured;
  for (const auto& c : r.captured) captured.push_back(c.photon_count);
  const auto gof = testing::poisson_gof(captured, 250.0);
  EXPECT_TRUE(gof.passes()) << gof.statistic << " vs " << gof.critical;
}

TEST(EveInterceptTest, RequiresSiphonMode) {
  Rng rng(5);
  EXPECT_THROW(eve_intercept(s1_train(1, 10, rng), Stage::kS1, EveStrategy::none(), rng),
               std::invalid_argument);
}

TEST(EveKnowledgeTest, ObserveSplitsPhotonsAcrossBases) {
  Rng rng(6);
  PulseTrain captured{Pulse{11, PolarizationState(0.7), Stage::kS1},
                      Pulse{0, PolarizationState(0.7), Stage::kS1},
                      Pulse{1, PolarizationState(0.0), Stage::kS1}};
  EveKnowledge k(3);
  k.observe(captured, Stage::kS1, rng);
  ASSERT_TRUE(k.estimates(0)[0].has_value());
  EXPECT_EQ(k.estimates(0)[0]->hv_photons, 6u);
  EXPECT_EQ(k.estimates(0)[0]->diag_photons, 5u);
  EXPECT_FALSE(k.estimates(1)[0].has_value());
  // A single horizontal photon pins the angle without a diagonal reading.
  ASSERT_TRUE(k.estimates(2)[0].has_value());
  EXPECT_EQ(k.estimates(2)[0]->angle, 0.0);
  EXPECT_FALSE(k.complete(0));
  EXPECT_THROW(eve_correlate(k, 0), InsufficientCapture);
}

TEST(EveCorrelateTest, ExampleRecoversVertical) {
  const double x = kHalfPi, a = 0.7, b = 1.9;
  const auto r = eve_correlate(exact(x + a), exact(x + a + b), exact(x + b));
  EXPECT_LT(polarization_distance(r.angle, kHalfPi), kTol);
  EXPECT_EQ(r.bit, 1);
  EXPECT_GT(r.posterior_one, 0.999);
}

TEST(EveCorrelateTest, ExactInputsAreAnIdentity) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const double x = u(rng) / 2, a = u(rng), b = u(rng);
    const auto r = eve_correlate(exact(x + a), exact(x + a + b), exact(x + b));
    worst = std::max(worst, polarization_distance(r.angle, x));
  }
  EXPECT_LT(worst, kTol);
}

TEST(EveCorrelateTest, PosteriorIsUninformativeAtTheBoundary) {
  const auto r = eve_correlate(exact(kPi / 4, 10), exact(0.0, 10), exact(0.0, 10));
  EXPECT_NEAR(r.posterior_one, 0.5, 1e-9);
}

TEST(EveCorrelateTest, NoisyPipelineRecoversBits) {
  // Protocol angles for random secrets, sampled with 2e4 photons per hop.
  Rng rng(8);
  const SourceModel src(20'000.0, 1.0, Emission::kFixed);
  int correct = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const std::uint8_t bit = static_cast<std::uint8_t>(rng() & 1);
    const Rotation a = Rotation::random(rng), b = Rotation::random(rng);
    const PolarizationState x = PolarizationState::from_bit(bit);
    EveKnowledge k(1);
    const PolarizationState hops[3] = {rotate(x, a), rotate(rotate(x, a), b), rotate(x, b)};
    const Stage tags[3] = {Stage::kS1, Stage::kS2, Stage::kS3};
    for (int h = 0; h < 3; ++h) {
      k.observe({Pulse{20'000, hops[h], tags[h]}}, tags[h], rng);
    }
    ASSERT_TRUE(k.complete(0));
    correct += eve_correlate(k, 0).bit == bit;
  }
  EXPECT_GE(correct, trials - 3);
}

TEST(EveImpersonateTest, ForgesAFullStrengthTrain) {
  Rng rng(9);
  auto strat = EveStrategy::impersonate({1, 0, 1});
  strat.rotation = Rotation(0.4);
  const auto f = eve_impersonate(strat, SourceModel(1000.0, 1.0, Emission::kFixed), rng);
  ASSERT_EQ(f.train.size(), 3u);
  EXPECT_EQ(f.rotation, Rotation(0.4));
  EXPECT_EQ(f.train[0].photon_count, 1000u);
  EXPECT_EQ(f.train[0].stage, Stage::kS1);
  EXPECT_NEAR(f.train[1].polarization.angle(), 0.4, kTol);
  EXPECT_NEAR(f.train[0].polarization.angle(), kHalfPi + 0.4, kTol);
}

TEST(EveImpersonateTest, RejectsWrongModeOrEmptyMessage) {
  Rng rng(10);
  EXPECT_THROW(eve_impersonate(EveStrategy::none(), SourceModel(10.0), rng),
               std::invalid_argument);
  EXPECT_THROW(eve_impersonate(EveStrategy::impersonate({}), SourceModel(10.0), rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace k06
