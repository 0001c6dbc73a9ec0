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
#include <charconv>
#include <sstream>

namespace k06 {

std::string_view to_string(HashTiming timing) {
  return timing == HashTiming::kBeforeTransmission ? "before" : "after";
}

std::optional<HashTiming> parse_hash_timing(std::string_view text) {
  if (text == "before") return HashTiming::kBeforeTransmission;
  if (text == "after") return HashTiming::kAfterTransmission;
  return std::nullopt;
}

std::string decision_text(const TranscriptEvent& event) {
  switch (event.kind) {
    case EventKind::kHashPublished:
      return "hash_published";
    case EventKind::kEmit:
      return "emit";
    case EventKind::kForge:
      return "forge";
    case EventKind::kSiphon:
      return "siphon";
    case EventKind::kAttenuate:
      return "attenuate";
    case EventKind::kTap:
      return event.alarm ? "alarm" : "pass";
    case EventKind::kLowPower:
      return "low_power";
    case EventKind::kAbort:
      return "abort";
    case EventKind::kDecode:
      return event.bit ? "decode_1" : "decode_0";
    case EventKind::kDecodeError:
      return "decode_error";
    case EventKind::kHashCheck:
      return event.hash == HashCheck::kMatch ? "hash_match" : "hash_mismatch";
  }
  return "?";
}

std::size_t SessionTranscript::alarm_count() const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const TranscriptEvent& e) {
        return e.kind == EventKind::kTap && e.alarm;
      }));
}

namespace {

class Recorder {
 public:
  explicit Recorder(SessionTranscript& t) : t_(t) {}

  void session_event(Stage stage, EventKind kind) {
    TranscriptEvent e;
    e.stage = stage;
    e.kind = kind;
    t_.events.push_back(e);
  }

  void pulse_event(std::size_t bit, Stage stage, EventKind kind,
                   std::uint64_t consumed, std::uint64_t forwarded) {
    TranscriptEvent e;
    e.bit_index = bit;
    e.stage = stage;
    e.kind = kind;
    e.consumed = consumed;
    e.forwarded = forwarded;
    t_.events.push_back(e);
  }

  void taps(Stage stage, const std::vector<IntensityReading>& readings,
            const PulseTrain& forwarded, const std::vector<bool>& alarms) {
    for (std::size_t i = 0; i < readings.size(); ++i) {
      TranscriptEvent e;
      e.bit_index = i;
      e.stage = stage;
      e.kind = EventKind::kTap;
      e.consumed = readings[i].photons_consumed;
      e.forwarded = forwarded[i].photon_count;
      e.expected = readings[i].expected;
      e.alarm = alarms[i];
      t_.events.push_back(e);
    }
  }

 private:
  SessionTranscript& t_;
};

}  // namespace

SessionResult run_session(const SessionConfig& config, Rng& rng) {
  validate(config.rule);
  if (config.message.empty()) {
    throw std::invalid_argument("message must be nonempty");
  }
  SessionResult result;
  SessionTranscript& t = result.transcript;
  t.session_id = config.session_id;
  Recorder rec(t);

  const MessageAuth auth = publish_hash(config.message, config.digest_algorithm);
  if (config.hash_timing == HashTiming::kBeforeTransmission) {
    rec.session_event(Stage::kS1, EventKind::kHashPublished);
  }

  const bool siphoning = config.eve.mode == EveMode::kSiphon;
  const bool impersonating = config.eve.mode == EveMode::kImpersonate;

  // Eve's interference and benign loss on one hop.
  auto hop = [&](PulseTrain train, Stage stage) {
    if (siphoning && config.eve.siphon_per_stage.contains(stage)) {
      InterceptResult ir = eve_intercept(train, stage, config.eve, rng);
      for (std::size_t i = 0; i < ir.forwarded.size(); ++i) {
        rec.pulse_event(i, stage, EventKind::kSiphon,
                        ir.captured[i].photon_count,
                        ir.forwarded[i].photon_count);
      }
      result.eve.observe(ir.captured, stage, rng);
      train = std::move(ir.forwarded);
    }
    if (config.source.attenuation() < 1.0) {
      for (std::size_t i = 0; i < train.size(); ++i) {
        const std::uint64_t before = train[i].photon_count;
        train[i] = attenuate(train[i], config.source, rng);
        rec.pulse_event(i, stage, EventKind::kAttenuate,
                        before - train[i].photon_count, train[i].photon_count);
      }
    }
    return train;
  };

  // Returns true when the session must stop at `stage`.
  auto settle = [&](Stage stage, bool alarm) {
    if (!alarm) return false;
    if (!t.alarm_stage) t.alarm_stage = stage;
    if (!config.abort_on_alarm) return false;
    t.aborted_at = stage;
    rec.session_event(stage, EventKind::kAbort);
    return true;
  };

  // Stage 1.
  PulseTrain train = alice_stage1(config.message, config.alice, config.source, rng);
  for (std::size_t i = 0; i < train.size(); ++i) {
    rec.pulse_event(i, Stage::kS1, EventKind::kEmit, 0, train[i].photon_count);
  }
  PartyConfig stage3_party = config.alice;
  if (impersonating) {
    Forgery forged = eve_impersonate(config.eve, config.source, rng);
    for (std::size_t i = 0; i < forged.train.size(); ++i) {
      rec.pulse_event(i, Stage::kS1, EventKind::kForge, 0,
                      forged.train[i].photon_count);
    }
    train = std::move(forged.train);
    // Eve plays Alice's part for the rest of the exchange, honest taps
    // included.
    stage3_party.secret_rotation = forged.rotation;
  }
  if (siphoning) result.eve = EveKnowledge(train.size());
  train = hop(std::move(train), Stage::kS1);

  // Stage 2.
  StageOutcome s2 = bob_stage2(train, config.bob, config.rule);
  rec.taps(Stage::kS2, s2.readings, s2.train, s2.pulse_alarms);
  if (settle(Stage::kS2, s2.alarm)) return result;
  train = hop(std::move(s2.train), Stage::kS2);

  // Stage 3.
  StageOutcome s3 = alice_stage3(train, stage3_party, config.rule, config.low_power);
  rec.taps(Stage::kS3, s3.readings, s3.train, s3.pulse_alarms);
  for (std::size_t i = 0; i < s3.low_power.size(); ++i) {
    if (s3.low_power[i]) {
      rec.pulse_event(i, Stage::kS3, EventKind::kLowPower, 0,
                      s3.train[i].photon_count);
    }
  }
  if (settle(Stage::kS3, s3.aborted())) return result;
  train = hop(std::move(s3.train), Stage::kS3);

  // Final reading and decode.
  FinalOutcome fin = bob_finalize(train, config.bob, config.rule, rng);
  {
    PulseTrain after_tap = train;
    for (std::size_t i = 0; i < after_tap.size(); ++i) {
      after_tap[i].photon_count -= fin.readings[i].photons_consumed;
    }
    rec.taps(Stage::kFinal, fin.readings, after_tap, fin.pulse_alarms);
  }
  if (settle(Stage::kFinal, fin.alarm)) return result;
  if (fin.alarm) {
    // Monitoring-only run: decode anyway so the outcome is still observable.
    PulseTrain relaxed = train;
    DetectionRule silent = config.rule;
    silent.expected_by_stage.clear();
    fin = bob_finalize(relaxed, config.bob, silent, rng);
  }
  for (std::size_t i = 0; i < fin.measurements.size(); ++i) {
    const auto& m = fin.measurements[i];
    if (fin.decode_failure && *fin.decode_failure == i) {
      rec.pulse_event(i, Stage::kFinal, EventKind::kDecodeError, m.consumed(), 0);
      break;
    }
    TranscriptEvent e;
    e.bit_index = i;
    e.stage = Stage::kFinal;
    e.kind = EventKind::kDecode;
    e.consumed = m.consumed();
    e.bit = fin.decoded.empty() ? 0 : fin.decoded[i];
    t.events.push_back(e);
  }
  if (fin.decode_failure) {
    t.decode_failure = fin.decode_failure;
  } else {
    t.decoded = fin.decoded;
  }

  if (config.hash_timing == HashTiming::kAfterTransmission) {
    rec.session_event(Stage::kFinal, EventKind::kHashPublished);
  }
  if (t.decoded && (config.verify_hash || impersonating)) {
    t.hash_check = verify_hash(*t.decoded, auth);
    TranscriptEvent e;
    e.stage = Stage::kFinal;
    e.kind = EventKind::kHashCheck;
    e.hash = t.hash_check;
    t.events.push_back(e);
  }
  return result;
}

int exit_code(const SessionTranscript& transcript) {
  if (transcript.aborted()) return 2;
  if (!transcript.decoded) return 4;
  if (transcript.hash_check == HashCheck::kMismatch) return 3;
  return 0;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void write_transcript(std::ostream& os, const SessionTranscript& transcript,
                      bool header) {
  if (header) os << kTranscriptHeader << '\n';
  for (const auto& e : transcript.events) {
    os << transcript.session_id << ',';
    if (e.bit_index) os << *e.bit_index;
    os << ',' << to_string(e.stage) << ',' << e.consumed << ',' << e.forwarded
       << ',' << format_double(e.expected) << ',' << (e.alarm ? 1 : 0) << ','
       << decision_text(e) << '\n';
  }
}

std::string to_csv(const SessionTranscript& transcript) {
  std::ostringstream os;
  write_transcript(os, transcript);
  return os.str();
}

}  // namespace k06
