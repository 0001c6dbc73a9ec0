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

#ifndef K06_SESSION_HPP_
#define K06_SESSION_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "k06/adversary.hpp"
#include "k06/bits.hpp"
#include "k06/channel.hpp"
#include "k06/hash.hpp"
#include "k06/protocol.hpp"
#include "k06/random.hpp"

namespace k06 {

enum class HashTiming : std::uint8_t { kBeforeTransmission, kAfterTransmission };

std::string_view to_string(HashTiming timing);
std::optional<HashTiming> parse_hash_timing(std::string_view text);

struct SessionConfig {
  std::uint64_t session_id = 0;
  BitString message;
  SourceModel source{1000.0};
  PartyConfig alice;
  PartyConfig bob;
  DetectionRule rule;
  LowPowerPolicy low_power;
  EveStrategy eve;
  // Verify Alice's published digest against Bob's decode. Impersonation
  // sessions always verify.
  bool verify_hash = true;
  HashTiming hash_timing = HashTiming::kBeforeTransmission;
  std::string digest_algorithm{kDefaultDigest};
  // When false, alarms are recorded but the session runs to the end; the
  // analysis module uses this to measure leakage and detection together.
  bool abort_on_alarm = true;
};

enum class EventKind : std::uint8_t {
  kHashPublished,
  kEmit,
  kForge,
  kSiphon,
  kAttenuate,
  kTap,
  kLowPower,
  kAbort,
  kDecode,
  kDecodeError,
  kHashCheck,
};

struct TranscriptEvent {
  // Empty for session-level events.
  std::optional<std::size_t> bit_index;
  Stage stage = Stage::kS1;
  EventKind kind = EventKind::kEmit;
  std::uint64_t consumed = 0;
  std::uint64_t forwarded = 0;
  double expected = 0.0;
  bool alarm = false;
  // Decoded bit for kDecode, check result for kHashCheck.
  std::uint8_t bit = 0;
  HashCheck hash = HashCheck::kNotRun;
};

// Text of the `decision` column for an event.
std::string decision_text(const TranscriptEvent& event);

struct SessionTranscript {
  std::uint64_t session_id = 0;
  std::vector<TranscriptEvent> events;
  // Stage whose alarms met the quorum first, whether or not it aborted.
  std::optional<Stage> alarm_stage;
  std::optional<Stage> aborted_at;
  std::optional<BitString> decoded;
  std::optional<std::size_t> decode_failure;
  HashCheck hash_check = HashCheck::kNotRun;

  bool aborted() const { return aborted_at.has_value(); }
  std::size_t alarm_count() const;
};

struct SessionResult {
  SessionTranscript transcript;
  // Eve's per-hop estimates; empty unless she siphoned.
  EveKnowledge eve;
};

// Runs S1 -> S2 -> S3 -> FINAL with Eve's interference injected on each hop.
// Throws std::invalid_argument on an empty message.
SessionResult run_session(const SessionConfig& config, Rng& rng);

// Exit status of `k06 run` for a finished session:
// 0 decoded and hash matched (or was not checked), 2 aborted,
// 3 hash mismatch, 4 decode failure.
int exit_code(const SessionTranscript& transcript);

inline constexpr std::string_view kTranscriptHeader =
    "session_id,bit_index,stage,consumed,forwarded,expected,alarm,decision";

// One CSV line per event in the fixed column order of kTranscriptHeader.
void write_transcript(std::ostream& os, const SessionTranscript& transcript,
                      bool header = true);

std::string to_csv(const SessionTranscript& transcript);

}  // namespace k06

#endif  // K06_SESSION_HPP_
