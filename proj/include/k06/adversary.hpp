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

#ifndef K06_ADVERSARY_HPP_
#define K06_ADVERSARY_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "k06/bits.hpp"
#include "k06/channel.hpp"
#include "k06/quantum.hpp"
#include "k06/random.hpp"

namespace k06 {

// How many photons Eve diverts from each pulse on one hop: an exact count,
// or a beam-splitter fraction.
class Siphon {
 public:
  enum class Kind : std::uint8_t { kCount, kFraction };

  static Siphon photons(std::uint64_t n) { return Siphon(Kind::kCount, n, 0.0); }
  // Throws std::invalid_argument outside [0, 1].
  static Siphon fraction(double f);
  // "n:<count>" or "f:<fraction>".
  static Siphon parse(std::string_view text);

  Kind kind() const { return kind_; }
  std::uint64_t count() const { return count_; }
  double fraction_value() const { return fraction_; }
  bool is_noop() const {
    return kind_ == Kind::kCount ? count_ == 0 : fraction_ == 0.0;
  }
  // Numeric magnitude, count or fraction, for tables.
  double magnitude() const {
    return kind_ == Kind::kCount ? static_cast<double>(count_) : fraction_;
  }

  std::string to_string() const;

  friend bool operator==(const Siphon&, const Siphon&) = default;

 private:
  Siphon(Kind kind, std::uint64_t count, double fraction)
      : kind_(kind), count_(count), fraction_(fraction) {}

  Kind kind_;
  std::uint64_t count_;
  double fraction_;
};

// Applies `siphon` to one pulse.
Split apply_siphon(const Pulse& pulse, const Siphon& siphon, Rng& rng);

enum class EveMode : std::uint8_t { kNone, kSiphon, kImpersonate };

std::string_view to_string(EveMode mode);
std::optional<EveMode> parse_eve_mode(std::string_view text);

// Siphon keys name the hop by the tag of the pulses on it: S1 is Alice to Bob,
// S2 Bob to Alice, S3 Alice to Bob.
struct EveStrategy {
  EveMode mode = EveMode::kNone;
  std::map<Stage, Siphon> siphon_per_stage;
  BitString substitute_bits;
  // Eve's own rotation when impersonating; drawn from the stream if unset.
  std::optional<Rotation> rotation;

  static EveStrategy none() { return {}; }
  static EveStrategy siphon_every_hop(const Siphon& s);
  static EveStrategy impersonate(BitString bits);
};

struct InterceptResult {
  PulseTrain forwarded;
  // Parallel to `forwarded`: the photons Eve kept from each pulse.
  PulseTrain captured;
};

// Passive siphoning of one hop. Forwarded polarizations are untouched. Hops
// without a configured siphon pass through with empty captures. Throws
// std::invalid_argument unless strategy.mode is kSiphon.
InterceptResult eve_intercept(const PulseTrain& train, Stage hop,
                              const EveStrategy& strategy, Rng& rng);

struct StageEstimate {
  double angle = 0.0;
  std::uint64_t hv_photons = 0;
  std::uint64_t diag_photons = 0;

  std::uint64_t photons_used() const { return hv_photons + diag_photons; }
};

class InsufficientCapture : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// What Eve has learned from her captures, per bit and per hop. An estimate
// exists only for hops where she held photons in both bases, or where the HV
// counts alone were unambiguous.
class EveKnowledge {
 public:
  using BitEstimates = std::array<std::optional<StageEstimate>, 3>;

  EveKnowledge() = default;
  explicit EveKnowledge(std::size_t bits) : estimates_(bits) {}

  // Splits each captured pulse's photons evenly between the HV and diagonal
  // bases (HV takes the odd photon) and records the angle estimate.
  void observe(const PulseTrain& captured, Stage hop, Rng& rng);

  void set(std::size_t bit, Stage hop, StageEstimate estimate);

  std::size_t bits() const { return estimates_.size(); }
  const BitEstimates& estimates(std::size_t bit) const {
    return estimates_.at(bit);
  }
  bool complete(std::size_t bit) const;

 private:
  std::vector<BitEstimates> estimates_;
};

struct AngleRecovery {
  double angle = 0.0;
  std::uint8_t bit = 0;
  // Posterior P(bit = 1) under a wrapped-normal error model with a uniform
  // prior on the bit.
  double posterior_one = 0.5;
};

// Each hop reveals the message angle offset by the secrets:
//   S1: x + a,   S2: x + a + b,   S3: x + b,
// so x = est(S1) + est(S3) - est(S2) mod pi, whatever a and b were.
AngleRecovery eve_correlate(const StageEstimate& s1, const StageEstimate& s2,
                            const StageEstimate& s3);

// Throws InsufficientCapture if any hop estimate for `bit` is missing.
AngleRecovery eve_correlate(const EveKnowledge& knowledge, std::size_t bit);

struct Forgery {
  PulseTrain train;
  Rotation rotation;
};

// Fresh S1 train encoding strategy.substitute_bits under Eve's rotation.
// Throws std::invalid_argument unless the mode is kImpersonate with a
// nonempty substitute message.
Forgery eve_impersonate(const EveStrategy& strategy, const SourceModel& source,
                        Rng& rng);

}  // namespace k06

#endif  // K06_ADVERSARY_HPP_
