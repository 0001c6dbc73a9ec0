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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "k06/protocol.hpp"

namespace k06 {

Siphon Siphon::fraction(double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw std::invalid_argument("siphon fraction must lie in [0, 1]");
  }
  return Siphon(Kind::kFraction, 0, f);
}

Siphon Siphon::parse(std::string_view text) {
  const auto bad = [&] {
    return std::invalid_argument("siphon must be 'n:<count>' or 'f:<fraction>', got '" +
                                 std::string(text) + "'");
  };
  if (text.size() < 3 || text[1] != ':') throw bad();
  const char* first = text.data() + 2;
  const char* last = text.data() + text.size();
  if (text[0] == 'n') {
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last) throw bad();
    return photons(n);
  }
  if (text[0] == 'f') {
    double f = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, f);
    if (ec != std::errc() || ptr != last) throw bad();
    return fraction(f);
  }
  throw bad();
}

std::string Siphon::to_string() const {
  if (kind_ == Kind::kCount) return "n:" + std::to_string(count_);
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, fraction_);
  (void)ec;
  return "f:" + std::string(buf, ptr);
}

Split apply_siphon(const Pulse& pulse, const Siphon& siphon, Rng& rng) {
  if (siphon.kind() == Siphon::Kind::kCount) {
    return k06::siphon(pulse, siphon.count());
  }
  return siphon_fraction(pulse, siphon.fraction_value(), rng);
}

std::string_view to_string(EveMode mode) {
  switch (mode) {
    case EveMode::kNone:
      return "none";
    case EveMode::kSiphon:
      return "siphon";
    case EveMode::kImpersonate:
      return "impersonate";
  }
  return "?";
}

std::optional<EveMode> parse_eve_mode(std::string_view text) {
  for (EveMode m : {EveMode::kNone, EveMode::kSiphon, EveMode::kImpersonate}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

EveStrategy EveStrategy::siphon_every_hop(const Siphon& s) {
  EveStrategy e;
  e.mode = EveMode::kSiphon;
  for (Stage hop : {Stage::kS1, Stage::kS2, Stage::kS3}) {
    e.siphon_per_stage.emplace(hop, s);
  }
  return e;
}

EveStrategy EveStrategy::impersonate(BitString bits) {
  EveStrategy e;
  e.mode = EveMode::kImpersonate;
  e.substitute_bits = std::move(bits);
  return e;
}

InterceptResult eve_intercept(const PulseTrain& train, Stage hop,
                              const EveStrategy& strategy, Rng& rng) {
  if (strategy.mode != EveMode::kSiphon) {
    throw std::invalid_argument("eve_intercept requires siphon mode");
  }
  InterceptResult out;
  out.forwarded.reserve(train.size());
  out.captured.reserve(train.size());
  const auto it = strategy.siphon_per_stage.find(hop);
  for (const auto& pulse : train) {
    if (it == strategy.siphon_per_stage.end()) {
      out.forwarded.push_back(pulse);
      Pulse empty = pulse;
      empty.photon_count = 0;
      out.captured.push_back(empty);
      continue;
    }
    Split s = apply_siphon(pulse, it->second, rng);
    out.forwarded.push_back(s.forwarded);
    out.captured.push_back(s.taken);
  }
  return out;
}

namespace {

std::size_t hop_index(Stage hop) {
  switch (hop) {
    case Stage::kS1:
      return 0;
    case Stage::kS2:
      return 1;
    case Stage::kS3:
      return 2;
    case Stage::kFinal:
      break;
  }
  throw std::invalid_argument("Eve only intercepts the S1, S2 and S3 hops");
}

// log(exp(a) + exp(b))
double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double wrapped_normal_log_likelihood(double distance, double sigma) {
  double acc = -std::numeric_limits<double>::infinity();
  for (int k = -3; k <= 3; ++k) {
    const double d = distance + k * kPi;
    acc = log_add(acc, -d * d / (2.0 * sigma * sigma));
  }
  return acc;
}

}  // namespace

void EveKnowledge::observe(const PulseTrain& captured, Stage hop, Rng& rng) {
  const std::size_t idx = hop_index(hop);
  if (estimates_.size() < captured.size()) estimates_.resize(captured.size());
  for (std::size_t i = 0; i < captured.size(); ++i) {
    const Pulse& p = captured[i];
    const std::uint64_t hv_n = (p.photon_count + 1) / 2;
    const std::uint64_t diag_n = p.photon_count / 2;
    if (hv_n == 0) continue;
    const auto hv = measure(p.polarization, hv_n, Basis::kHV, rng);
    const auto diag = measure(p.polarization, diag_n, Basis::kDiagonal, rng);
    try {
      estimates_[i][idx] = StageEstimate{estimate_angle(hv, diag), hv_n, diag_n};
    } catch (const AmbiguousEstimate&) {
      // No estimate for this hop.
    }
  }
}

void EveKnowledge::set(std::size_t bit, Stage hop, StageEstimate estimate) {
  if (estimates_.size() <= bit) estimates_.resize(bit + 1);
  estimates_[bit][hop_index(hop)] = estimate;
}

bool EveKnowledge::complete(std::size_t bit) const {
  const auto& e = estimates_.at(bit);
  return std::all_of(e.begin(), e.end(), [](const auto& s) { return s.has_value(); });
}

AngleRecovery eve_correlate(const StageEstimate& s1, const StageEstimate& s2,
                            const StageEstimate& s3) {
  AngleRecovery r;
  r.angle = wrap_angle(s1.angle + s3.angle - s2.angle, kPi);
  const double d0 = polarization_distance(r.angle, 0.0);
  const double d1 = polarization_distance(r.angle, kHalfPi);
  r.bit = d1 < d0 ? 1 : 0;

  // Delta-method variance of each estimate is 1 / (4 * hv photons).
  double var = 0.0;
  for (const auto* s : {&s1, &s2, &s3}) {
    var += 1.0 / (4.0 * static_cast<double>(std::max<std::uint64_t>(s->hv_photons, 1)));
  }
  const double sigma = std::sqrt(var);
  const double l0 = wrapped_normal_log_likelihood(d0, sigma);
  const double l1 = wrapped_normal_log_likelihood(d1, sigma);
  r.posterior_one = 1.0 / (1.0 + std::exp(l0 - l1));
  return r;
}

AngleRecovery eve_correlate(const EveKnowledge& knowledge, std::size_t bit) {
  const auto& e = knowledge.estimates(bit);
  if (!e[0] || !e[1] || !e[2]) {
    throw InsufficientCapture("bit " + std::to_string(bit) +
                              " lacks an estimate for at least one hop");
  }
  return eve_correlate(*e[0], *e[1], *e[2]);
}

Forgery eve_impersonate(const EveStrategy& strategy, const SourceModel& source,
                        Rng& rng) {
  if (strategy.mode != EveMode::kImpersonate) {
    throw std::invalid_argument("eve_impersonate requires impersonate mode");
  }
  if (strategy.substitute_bits.empty()) {
    throw std::invalid_argument("impersonation needs a nonempty substitute message");
  }
  Forgery f;
  f.rotation = strategy.rotation ? *strategy.rotation : Rotation::random(rng);
  f.train = alice_stage1(strategy.substitute_bits, PartyConfig{f.rotation, 0},
                         source, rng);
  return f;
}

}  // namespace k06
