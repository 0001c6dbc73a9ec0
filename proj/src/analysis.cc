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

#include "k06/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "k06/random.hpp"
#include "k06/session.hpp"

namespace k06::analysis {

Proportion wilson_interval(std::size_t successes, std::size_t trials,
                           double confidence) {
  if (trials == 0) throw std::invalid_argument("wilson_interval needs trials > 0");
  if (successes > trials) {
    throw std::invalid_argument("successes cannot exceed trials");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  const double z = boost::math::quantile(boost::math::normal(),
                                         1.0 - 0.5 * (1.0 - confidence));
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  Proportion r;
  r.successes = successes;
  r.trials = trials;
  r.point = p;
  r.lo = std::min(p, std::max(0.0, center - half));
  r.hi = std::max(p, std::min(1.0, center + half));
  return r;
}

ChannelScenario ChannelScenario::nominal(double mu, const Siphon& siphon,
                                         double z_threshold) {
  ChannelScenario s;
  s.source = SourceModel(mu);
  s.tap_budget = static_cast<std::uint64_t>(std::llround(mu / 4.0));
  s.rule = DetectionRule::from_ledger(s.source, s.tap_budget, z_threshold);
  if (!siphon.is_noop()) {
    for (Stage hop : {Stage::kS1, Stage::kS2, Stage::kS3}) {
      s.eve_siphon.emplace(hop, siphon);
    }
  }
  return s;
}

namespace {

// Photon-count pmf indexed by count.
using Pmf = std::vector<double>;

double total_mass(const Pmf& p) {
  // Kahan summation; the truncation checks compare against 1 - 1e-12.
  double sum = 0.0;
  double c = 0.0;
  for (double v : p) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

Pmf source_pmf(const SourceModel& source) {
  const double mu = source.mean_photons();
  if (source.emission() == Emission::kFixed) {
    Pmf p(static_cast<std::size_t>(std::llround(mu)) + 1, 0.0);
    p.back() = 1.0;
    return p;
  }
  const auto cap = static_cast<std::size_t>(mu + 60.0 * std::sqrt(mu) + 200.0);
  Pmf p;
  p.reserve(cap + 1);
  const double log_mu = std::log(mu);
  double mass = 0.0;
  double c = 0.0;
  for (std::size_t k = 0; k <= cap; ++k) {
    const double kd = static_cast<double>(k);
    const double v = std::exp(kd * log_mu - mu - std::lgamma(kd + 1.0));
    p.push_back(v);
    const double y = v - c;
    const double t = mass + y;
    c = (t - mass) - y;
    mass = t;
    if (kd > mu && mass >= 1.0 - kOracleTailMass) return p;
  }
  throw TruncationError("Poisson pmf tail mass above 1e-12 after " +
                        std::to_string(cap) + " terms");
}

// Binomial thinning: each photon survives with probability q.
Pmf thin(const Pmf& in, double q) {
  if (q >= 1.0) return in;
  Pmf out(in.size(), 0.0);
  if (q <= 0.0) {
    out[0] = total_mass(in);
    return out;
  }
  const double ratio_up = q / (1.0 - q);
  const double ratio_down = (1.0 - q) / q;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  constexpr double kRelCut = 1e-18;
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double w = in[k];
    if (w == 0.0) continue;
    if (k == 0) {
      out[0] += w;
      continue;
    }
    const double kd = static_cast<double>(k);
    const auto mode =
        std::min<std::size_t>(k, static_cast<std::size_t>((kd + 1.0) * q));
    const double md = static_cast<double>(mode);
    const double peak =
        std::exp(std::lgamma(kd + 1.0) - std::lgamma(md + 1.0) -
                 std::lgamma(kd - md + 1.0) + md * log_q + (kd - md) * log_1mq);
    out[mode] += w * peak;
    double v = peak;
    for (std::size_t j = mode; j < k; ++j) {
      v *= static_cast<double>(k - j) / static_cast<double>(j + 1) * ratio_up;
      if (v < peak * kRelCut) break;
      out[j + 1] += w * v;
    }
    v = peak;
    for (std::size_t j = mode; j > 0; --j) {
      v *= static_cast<double>(j) / static_cast<double>(k - j + 1) * ratio_down;
      if (v < peak * kRelCut) break;
      out[j - 1] += w * v;
    }
  }
  return out;
}

// Removes exactly `n` photons, clamping at zero.
Pmf shift_down(const Pmf& in, std::uint64_t n) {
  if (n == 0) return in;
  Pmf out(in.size(), 0.0);
  for (std::size_t k = 0; k < in.size(); ++k) {
    out[k > n ? k - n : 0] += in[k];
  }
  return out;
}

// Moves the mass strictly below the stage cutoff into `alarm_mass`.
void check(Pmf& p, const DetectionRule& rule, Stage stage, double& alarm_mass) {
  if (!rule.checks(stage)) return;
  const double cutoff = rule.cutoff(stage);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (static_cast<double>(k) >= cutoff) break;
    alarm_mass += p[k];
    p[k] = 0.0;
  }
}

}  // namespace

double exact_detection_oracle(const ChannelScenario& scenario) {
  validate(scenario.rule);
  if (scenario.rule.alarm_quorum != 1) {
    throw std::invalid_argument("exact oracle models alarm_quorum == 1 only");
  }
  if (scenario.source.mean_photons() > kOracleMaxMean) {
    throw std::domain_error("mean photon number above the oracle's enumeration "
                            "bound of 1e5");
  }
  Pmf p = source_pmf(scenario.source);
  const double attenuation = scenario.source.attenuation();
  double alarm_mass = 0.0;
  const std::pair<Stage, Stage> legs[] = {{Stage::kS1, Stage::kS2},
                                          {Stage::kS2, Stage::kS3},
                                          {Stage::kS3, Stage::kFinal}};
  for (const auto& [hop, checked_at] : legs) {
    double keep = attenuation;
    if (auto it = scenario.eve_siphon.find(hop); it != scenario.eve_siphon.end()) {
      if (it->second.kind() == Siphon::Kind::kCount) {
        p = shift_down(p, it->second.count());
      } else {
        keep *= 1.0 - it->second.fraction_value();
      }
    }
    p = thin(p, keep);
    check(p, scenario.rule, checked_at, alarm_mass);
    p = shift_down(p, scenario.tap_budget);
    if (alarm_mass + total_mass(p) < 1.0 - 1e-10) {
      throw TruncationError("probability mass lost while propagating the pmf");
    }
  }
  // Condition on the enumerated (untruncated) part of the source law.
  const double survivors = total_mass(p);
  return alarm_mass / (alarm_mass + survivors);
}

double exact_detection_oracle(double mu, double f, double z_threshold) {
  return exact_detection_oracle(
      ChannelScenario::nominal(mu, Siphon::fraction(f), z_threshold));
}

double session_detection_oracle(const ChannelScenario& scenario) {
  const double p = exact_detection_oracle(scenario);
  return 1.0 - std::pow(1.0 - p, static_cast<double>(scenario.message_bits));
}

namespace {

SessionConfig session_for(const ChannelScenario& scenario, Rng& rng) {
  SessionConfig cfg;
  cfg.message = random_bits(scenario.message_bits, rng);
  cfg.source = scenario.source;
  cfg.alice = {Rotation::random(rng), scenario.tap_budget};
  cfg.bob = {Rotation::random(rng), scenario.tap_budget};
  cfg.rule = scenario.rule;
  cfg.verify_hash = false;
  if (!scenario.eve_siphon.empty()) {
    cfg.eve.mode = EveMode::kSiphon;
    cfg.eve.siphon_per_stage = scenario.eve_siphon;
  }
  return cfg;
}

}  // namespace

Proportion detection_probability(const ChannelScenario& scenario,
                                 std::size_t trials, std::uint64_t seed,
                                 double confidence) {
  if (trials < 100) {
    throw std::invalid_argument("detection_probability needs >= 100 trials");
  }
  std::size_t aborted = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, t);
    SessionConfig cfg = session_for(scenario, rng);
    cfg.session_id = t;
    if (run_session(cfg, rng).transcript.aborted()) ++aborted;
  }
  return wilson_interval(aborted, trials, confidence);
}

std::vector<RocPoint> roc_sweep(const ChannelScenario& attacked,
                                std::span<const double> z_grid) {
  if (z_grid.empty()) throw std::invalid_argument("z grid must be nonempty");
  ChannelScenario honest = attacked;
  honest.eve_siphon.clear();
  std::vector<RocPoint> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) {
    ChannelScenario a = attacked;
    ChannelScenario h = honest;
    a.rule.z_threshold = z;
    h.rule.z_threshold = z;
    out.push_back({z, exact_detection_oracle(h), exact_detection_oracle(a)});
  }
  return out;
}

std::vector<RocPoint> roc_sweep(double mu, double f,
                                std::span<const double> z_grid) {
  const double z0 = z_grid.empty() ? 0.0 : z_grid.front();
  return roc_sweep(ChannelScenario::nominal(mu, Siphon::fraction(f), z0), z_grid);
}

std::vector<RmsePoint> leakage_vs_n(std::span<const std::uint64_t> n_grid,
                                    std::size_t trials, std::uint64_t seed,
                                    std::optional<double> true_angle) {
  if (trials == 0) throw std::invalid_argument("leakage_vs_n needs trials > 0");
  std::vector<RmsePoint> out;
  out.reserve(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const std::uint64_t n = n_grid[i];
    if (n == 0) {
      out.push_back({0, std::numeric_limits<double>::quiet_NaN()});
      continue;
    }
    Rng rng = make_stream(seed, i);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    double sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const PolarizationState truth(true_angle ? *true_angle : angle(rng));
      const auto hv = measure(truth, (n + 1) / 2, Basis::kHV, rng);
      const auto diag = measure(truth, n / 2, Basis::kDiagonal, rng);
      const double e = polarization_distance(estimate_angle(hv, diag), truth.angle());
      sq += e * e;
    }
    out.push_back({n, std::sqrt(sq / static_cast<double>(trials))});
  }
  return out;
}

double log_log_slope(std::span<const RmsePoint> points) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double m = 0.0;
  for (const auto& p : points) {
    if (p.photons == 0 || !(p.rmse > 0.0)) continue;
    const double x = std::log(static_cast<double>(p.photons));
    const double y = std::log(p.rmse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1.0;
  }
  if (m < 2.0) throw std::invalid_argument("log_log_slope needs two usable points");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::uint64_t read_floor_for_rmse(double target_rmse, std::size_t trials,
                                  std::uint64_t seed) {
  if (!(target_rmse > 0.0)) throw std::invalid_argument("target RMSE must be > 0");
  constexpr std::uint64_t kMaxPhotons = 1u << 22;
  for (std::uint64_t n = 1; n <= kMaxPhotons; ++n) {
    const std::uint64_t grid[] = {n};
    if (leakage_vs_n(grid, trials, seed).front().rmse <= target_rmse) return n;
  }
  throw std::domain_error("target RMSE not reached below 2^22 photons");
}

void validate(const ExperimentPlan& plan) {
  if (plan.mu.empty() || plan.siphon.empty() || plan.z.empty()) {
    throw std::invalid_argument("experiment grid must be nonempty");
  }
  if (plan.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (plan.message_bits == 0) throw std::invalid_argument("message_bits must be >= 1");
  for (double mu : plan.mu) SourceModel(mu, plan.attenuation);
  for (double z : plan.z) {
    if (std::isnan(z) || z < 0.0) throw std::invalid_argument("z must be >= 0");
  }
  if (!(plan.target_accuracy > 0.0 && plan.target_accuracy <= 1.0)) {
    throw std::invalid_argument("target_accuracy must lie in (0, 1]");
  }
  if (!(plan.tap_fraction >= 0.0 && plan.tap_fraction <= 1.0)) {
    throw std::invalid_argument("tap_fraction must lie in [0, 1]");
  }
}

namespace {

struct Cell {
  double mu;
  Siphon siphon;
  double z;
};

TradeoffPoint run_cell(const ExperimentPlan& plan, const Cell& cell,
                       std::uint64_t cell_seed) {
  ChannelScenario scenario;
  scenario.source = SourceModel(cell.mu, plan.attenuation);
  scenario.tap_budget =
      static_cast<std::uint64_t>(std::llround(plan.tap_fraction * cell.mu));
  scenario.rule = DetectionRule::from_ledger(scenario.source, scenario.tap_budget,
                                             cell.z, plan.checked_stages);
  for (Stage hop : {Stage::kS1, Stage::kS2, Stage::kS3}) {
    scenario.eve_siphon.emplace(hop, cell.siphon);
  }
  scenario.message_bits = plan.message_bits;

  std::size_t detected = 0;
  std::size_t correct = 0;
  std::size_t bits_seen = 0;
  std::size_t estimated = 0;
  double sq = 0.0;
  for (std::size_t t = 0; t < plan.trials; ++t) {
    Rng rng = make_stream(cell_seed, t);
    SessionConfig cfg = session_for(scenario, rng);
    cfg.session_id = t;
    cfg.abort_on_alarm = false;
    const SessionResult r = run_session(cfg, rng);
    if (r.transcript.alarm_stage) ++detected;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t b = 0; b < cfg.message.size(); ++b) {
      ++bits_seen;
      std::uint8_t guess;
      if (b < r.eve.bits() && r.eve.complete(b)) {
        const AngleRecovery rec = eve_correlate(r.eve, b);
        guess = rec.bit;
        const double e = polarization_distance(
            rec.angle, PolarizationState::from_bit(cfg.message[b]).angle());
        sq += e * e;
        ++estimated;
      } else {
        guess = coin(rng) ? 1 : 0;
      }
      if (guess == cfg.message[b]) ++correct;
    }
  }

  TradeoffPoint out;
  out.mu = cell.mu;
  out.siphon = cell.siphon;
  out.z = cell.z;
  out.trials = plan.trials;
  out.detection = wilson_interval(detected, plan.trials);
  out.eve_accuracy = wilson_interval(correct, bits_seen);
  out.rmse = estimated ? std::sqrt(sq / static_cast<double>(estimated))
                       : std::numeric_limits<double>::quiet_NaN();
  try {
    out.oracle_value = session_detection_oracle(scenario);
  } catch (const std::exception&) {
    out.oracle_value = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace

std::vector<TradeoffPoint> eve_accuracy_sweep(const ExperimentPlan& plan) {
  validate(plan);
  std::vector<Cell> cells;
  for (double mu : plan.mu) {
    for (const Siphon& s : plan.siphon) {
      for (double z : plan.z) cells.push_back({mu, s, z});
    }
  }
  std::vector<TradeoffPoint> results(cells.size());
  unsigned workers = plan.threads ? plan.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(cells.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned id) {
    try {
      for (std::size_t c; (c = next.fetch_add(1)) < cells.size();) {
        results[c] = run_cell(plan, cells[c], derive_seed(plan.master_seed, c));
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work, i);
    work(0);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::optional<Siphon> accuracy_threshold(std::span<const TradeoffPoint> cells,
                                         double mu, double z, double target) {
  for (const auto& c : cells) {
    if (c.mu == mu && c.z == z && c.eve_accuracy.point >= target) return c.siphon;
  }
  return std::nullopt;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void write_sweep_csv(std::ostream& os, std::span<const TradeoffPoint> cells) {
  os << kSweepCsvHeader << '\n';
  for (const auto& c : cells) {
    os << num(c.mu) << ',' << c.siphon.to_string() << ',' << num(c.z) << ','
       << c.trials << ',' << num(c.detection.point) << ',' << num(c.detection.lo)
       << ',' << num(c.detection.hi) << ',' << num(c.eve_accuracy.point) << ','
       << num(c.eve_accuracy.lo) << ',' << num(c.eve_accuracy.hi) << ','
       << num(c.rmse) << ',' << num(c.oracle_value) << '\n';
  }
}

}  // namespace k06::analysis
