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

#include "k06/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

namespace k06 {
namespace {

SessionConfig honest(const BitString& message, Rng& rng, double mu = 1000.0) {
  SessionConfig c;
  c.message = message;
  c.source = SourceModel(mu);
  const auto tap = static_cast<std::uint64_t>(std::llround(mu / 4));
  c.alice = PartyConfig{Rotation::random(rng), tap};
  c.bob = PartyConfig{Rotation::random(rng), tap};
  c.rule = DetectionRule::from_ledger(c.source, tap, 5.0);
  return c;
}

std::size_t count_kind(const SessionTranscript& t, EventKind k) {
  return static_cast<std::size_t>(std::count_if(
      t.events.begin(), t.events.end(),
      [k](const TranscriptEvent& e) { return e.kind == k; }));
}

TEST(RunSessionTest, HonestEightBitRun) {
  Rng rng(1);
  const BitString msg{1, 0, 1, 1, 0, 0, 1, 0};
  const auto r = run_session(honest(msg, rng), rng);
  const auto& t = r.transcript;
  EXPECT_FALSE(t.aborted());
  ASSERT_TRUE(t.decoded.has_value());
  EXPECT_EQ(*t.decoded, msg);
  EXPECT_EQ(t.hash_check, HashCheck::kMatch);
  EXPECT_EQ(exit_code(t), 0);
  EXPECT_EQ(count_kind(t, EventKind::kTap), 24u);
  EXPECT_EQ(count_kind(t, EventKind::kDecode), 8u);
  EXPECT_EQ(t.events.front().kind, EventKind::kHashPublished);
  EXPECT_EQ(t.events.back().kind, EventKind::kHashCheck);
}

TEST(RunSessionTest, EmptyMessageThrows) {
  Rng rng(2);
  EXPECT_THROW(run_session(honest({}, rng), rng), std::invalid_argument);
}

TEST(RunSessionTest, HashPublishedAfterWhenConfigured) {
  Rng rng(3);
  auto c = honest({1, 1}, rng);
  c.hash_timing = HashTiming::kAfterTransmission;
  const auto t = run_session(c, rng).transcript;
  EXPECT_EQ(t.events.front().kind, EventKind::kEmit);
  EXPECT_EQ(t.events[t.events.size() - 2].kind, EventKind::kHashPublished);
}

TEST(RunSessionTest, VerifyOffLeavesCheckNotRun) {
  Rng rng(4);
  auto c = honest({1, 0}, rng);
  c.verify_hash = false;
  const auto t = run_session(c, rng).transcript;
  EXPECT_EQ(t.hash_check, HashCheck::kNotRun);
  EXPECT_EQ(exit_code(t), 0);
}

TEST(RunSessionTest, HeavySiphonAbortsAndStopsTheRecord) {
  Rng rng(5);
  auto c = honest({1, 0, 1, 1}, rng);
  c.eve = EveStrategy::siphon_every_hop(Siphon::fraction(0.25));
  const auto t = run_session(c, rng).transcript;
  ASSERT_TRUE(t.aborted());
  EXPECT_EQ(*t.aborted_at, Stage::kS2);
  EXPECT_EQ(t.alarm_stage, t.aborted_at);
  EXPECT_FALSE(t.decoded.has_value());
  EXPECT_EQ(exit_code(t), 2);
  EXPECT_EQ(t.events.back().kind, EventKind::kAbort);
  for (const auto& e : t.events) {
    EXPECT_TRUE(e.stage == Stage::kS1 || e.stage == Stage::kS2);
  }
}

TEST(RunSessionTest, AbortedStageHasNoLaterEvents) {
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    auto c = honest(random_bits(4, rng), rng);
    c.eve = EveStrategy::siphon_every_hop(Siphon::photons(60 + i % 120));
    const auto t = run_session(c, rng).transcript;
    if (!t.aborted()) {
      EXPECT_TRUE(t.decoded || t.decode_failure);
      continue;
    }
    EXPECT_FALSE(t.decoded.has_value());
    for (const auto& e : t.events) {
      EXPECT_LE(static_cast<int>(e.stage), static_cast<int>(*t.aborted_at));
    }
  }
}

TEST(RunSessionTest, ImpersonationDecodesButMismatches) {
  Rng rng(7);
  auto c = honest({1, 0, 1, 0, 0, 1, 0, 1}, rng);
  c.eve = EveStrategy::impersonate({0, 1, 0, 1, 1, 0, 1, 0});
  const auto t = run_session(c, rng).transcript;
  EXPECT_FALSE(t.aborted());
  EXPECT_EQ(t.alarm_count(), 0u);
  ASSERT_TRUE(t.decoded.has_value());
  EXPECT_EQ(*t.decoded, c.eve.substitute_bits);
  EXPECT_EQ(t.hash_check, HashCheck::kMismatch);
  EXPECT_EQ(exit_code(t), 3);
  EXPECT_EQ(count_kind(t, EventKind::kForge), 8u);
}

TEST(RunSessionTest, ImpersonationWithSameBitsMatches) {
  Rng rng(8);
  auto c = honest({1, 1, 0}, rng);
  c.verify_hash = false;
  c.eve = EveStrategy::impersonate(c.message);
  const auto t = run_session(c, rng).transcript;
  EXPECT_EQ(t.hash_check, HashCheck::kMatch);
  EXPECT_EQ(exit_code(t), 0);
}

TEST(RunSessionTest, MonitorOnlyRecordsAlarmAndStillDecodes) {
  Rng rng(9);
  auto c = honest({0, 1, 1}, rng);
  c.abort_on_alarm = false;
  // Exact counts: 800 arrive at S2 (alarm), 40 remain to decode.
  c.source = SourceModel(1000.0, 1.0, Emission::kFixed);
  c.eve.mode = EveMode::kSiphon;
  c.eve.siphon_per_stage.emplace(Stage::kS1, Siphon::photons(200));
  c.eve.siphon_per_stage.emplace(Stage::kS2, Siphon::photons(5));
  c.eve.siphon_per_stage.emplace(Stage::kS3, Siphon::photons(5));
  const auto r = run_session(c, rng);
  const auto& t = r.transcript;
  EXPECT_FALSE(t.aborted());
  EXPECT_EQ(t.alarm_stage, Stage::kS2);
  ASSERT_TRUE(t.decoded.has_value());
  EXPECT_EQ(*t.decoded, c.message);
  for (std::size_t b = 0; b < 3; ++b) EXPECT_TRUE(r.eve.complete(b));
}

TEST(RunSessionTest, AttenuationEventsAppearPerHop) {
  Rng rng(10);
  auto c = honest({1, 0}, rng);
  c.source = SourceModel(1000.0, 0.95);
  c.rule = DetectionRule::from_ledger(c.source, 250, 5.0);
  const auto t = run_session(c, rng).transcript;
  EXPECT_EQ(count_kind(t, EventKind::kAttenuate), 6u);
}

TEST(RunSessionTest, SameSeedSameTranscript) {
  Rng a(11), b(11);
  auto ca = honest(BitString(16, 1), a);
  auto cb = honest(BitString(16, 1), b);
  ca.eve = cb.eve = EveStrategy::siphon_every_hop(Siphon::photons(5));
  EXPECT_EQ(to_csv(run_session(ca, a).transcript),
            to_csv(run_session(cb, b).transcript));
}

TEST(RunSessionTest, ConcurrentSessionsAreOrderIndependent) {
  auto one = [](std::uint64_t i) {
    Rng rng = make_stream(77, i);
    auto c = honest(random_bits(32, rng), rng);
    c.session_id = i;
    return to_csv(run_session(c, rng).transcript);
  };
  std::vector<std::string> serial;
  for (std::uint64_t i = 0; i < 16; ++i) serial.push_back(one(i));
  std::vector<std::future<std::string>> futs;
  for (std::uint64_t i = 16; i-- > 0;) futs.push_back(std::async(std::launch::async, one, i));
  std::vector<std::string> parallel(16);
  for (std::size_t k = 0; k < 16; ++k) parallel[15 - k] = futs[k].get();
  EXPECT_EQ(serial, parallel);
}

TEST(TranscriptTest, HeaderAndColumns) {
  Rng rng(12);
  auto c = honest({1}, rng);
  c.session_id = 42;
  const auto csv = to_csv(run_session(c, rng).transcript);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTranscriptHeader);
  std::getline(in, line);
  EXPECT_EQ(line, "42,,S1,0,0,0,0,hash_published");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("42,0,S1,0,", 0), 0u);
  EXPECT_TRUE(line.ends_with(",0,0,emit"));
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7) << line;
  }
}

TEST(TranscriptTest, NeverContainsSecretAngles) {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    auto c = honest(random_bits(8, rng), rng);
    if (i % 2) c.eve = EveStrategy::siphon_every_hop(Siphon::fraction(0.01));
    const auto csv = to_csv(run_session(c, rng).transcript);
    for (double theta : {c.alice.secret_rotation.theta(), c.bob.secret_rotation.theta()}) {
      for (int digits : {3, 4, 6, 17}) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", digits, theta);
        EXPECT_EQ(csv.find(buf), std::string::npos) << buf;
      }
    }
  }
}

TEST(ExitCodeTest, TotalOverOutcomes) {
  SessionTranscript t;
  EXPECT_EQ(exit_code(t), 4);
  t.decoded = BitString{1};
  EXPECT_EQ(exit_code(t), 0);
  t.hash_check = HashCheck::kMatch;
  EXPECT_EQ(exit_code(t), 0);
  t.hash_check = HashCheck::kMismatch;
  EXPECT_EQ(exit_code(t), 3);
  t.aborted_at = Stage::kS3;
  EXPECT_EQ(exit_code(t), 2);
}

TEST(HashTimingTest, Parse) {
  EXPECT_EQ(parse_hash_timing("before"), HashTiming::kBeforeTransmission);
  EXPECT_EQ(parse_hash_timing("after"), HashTiming::kAfterTransmission);
  EXPECT_FALSE(parse_hash_timing("later"));
}

}  // namespace
}  // namespace k06
