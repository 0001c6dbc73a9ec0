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

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "k06/adversary.hpp"
#include "k06/analysis.hpp"
#include "k06/bits.hpp"
#include "k06/config.hpp"
#include "k06/hash.hpp"
#include "k06/random.hpp"
#include "k06/session.hpp"

namespace py = pybind11;

namespace {

struct PySession {
  int exit_code = 0;
  std::string transcript;
  std::optional<std::string> decoded;
  std::optional<std::string> aborted_at;
  std::string hash_check;
  std::size_t alarms = 0;
};

PySession run_scenario(const std::string& text, std::optional<std::uint64_t> seed) {
  k06::ScenarioConfig config = k06::parse_scenario(text);
  if (seed) config.seed = *seed;
  const k06::SessionConfig session = k06::to_session(config);
  // Same stream as `k06 run`, so a scenario reproduces across both.
  k06::Rng rng = k06::make_stream(config.seed, 0);
  const auto t = k06::run_session(session, rng).transcript;
  PySession out;
  out.exit_code = k06::exit_code(t);
  out.transcript = k06::to_csv(t);
  if (t.decoded) out.decoded = k06::format_message(*t.decoded);
  if (t.aborted_at) out.aborted_at = std::string(k06::to_string(*t.aborted_at));
  out.hash_check = std::string(k06::to_string(t.hash_check));
  out.alarms = t.alarm_count();
  return out;
}

std::string sweep(const std::string& text, std::optional<std::uint64_t> seed,
                  std::optional<std::size_t> trials) {
  k06::SweepConfig config = k06::parse_sweep(text);
  if (seed) config.plan.master_seed = *seed;
  if (trials) config.plan.trials = *trials;
  k06::analysis::validate(config.plan);
  std::ostringstream os;
  k06::analysis::write_sweep_csv(os, k06::analysis::eve_accuracy_sweep(config.plan));
  return os.str();
}

double oracle(double mu, double f, double z, std::optional<std::uint64_t> tap,
              double attenuation) {
  k06::analysis::ChannelScenario s;
  s.source = k06::SourceModel(mu, attenuation);
  s.tap_budget = tap ? *tap : static_cast<std::uint64_t>(std::llround(mu / 4.0));
  s.rule = k06::DetectionRule::from_ledger(s.source, s.tap_budget, z);
  const auto siphon = k06::Siphon::fraction(f);
  if (!siphon.is_noop()) {
    for (k06::Stage hop : {k06::Stage::kS1, k06::Stage::kS2, k06::Stage::kS3}) {
      s.eve_siphon.emplace(hop, siphon);
    }
  }
  return k06::analysis::exact_detection_oracle(s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Three-stage rotation protocol simulator";

  py::register_exception<k06::ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);
  py::register_exception<k06::ConfigDomainError>(m, "ConfigDomainError", PyExc_ValueError);
  py::register_exception<k06::analysis::TruncationError>(m, "TruncationError",
                                                         PyExc_ArithmeticError);

  py::class_<PySession>(m, "Session")
      .def_readonly("exit_code", &PySession::exit_code)
      .def_readonly("transcript", &PySession::transcript)
      .def_readonly("decoded", &PySession::decoded)
      .def_readonly("aborted_at", &PySession::aborted_at)
      .def_readonly("hash_check", &PySession::hash_check)
      .def_readonly("alarms", &PySession::alarms);

  m.def("run_scenario", &run_scenario, py::arg("text"), py::arg("seed") = py::none(),
        "Run one session from scenario-file text.");
  m.def("sweep", &sweep, py::arg("text"), py::arg("seed") = py::none(),
        py::arg("trials") = py::none(), "Run an experiment plan; returns the CSV.");
  m.def("oracle", &oracle, py::arg("mu"), py::arg("f"), py::arg("z"),
        py::arg("tap") = py::none(), py::arg("attenuation") = 1.0,
        "Exact per-pulse detection probability, Eve siphoning f on every hop.");

  m.def(
      "wilson_interval",
      [](std::size_t k, std::size_t n, double confidence) {
        const auto p = k06::analysis::wilson_interval(k, n, confidence);
        return py::make_tuple(p.point, p.lo, p.hi);
      },
      py::arg("successes"), py::arg("trials"), py::arg("confidence") = 0.95);

  m.def(
      "leakage_vs_n",
      [](const std::vector<std::uint64_t>& n, std::size_t trials, std::uint64_t seed) {
        std::vector<std::pair<std::uint64_t, double>> out;
        for (const auto& p : k06::analysis::leakage_vs_n(n, trials, seed)) {
          out.emplace_back(p.photons, p.rmse);
        }
        return out;
      },
      py::arg("n"), py::arg("trials"), py::arg("seed"));

  m.def(
      "correlate",
      [](double a1, double a2, double a3) {
        auto est = [](double a) { return k06::StageEstimate{k06::wrap_angle(a, k06::kPi), 1, 1}; };
        const auto r = k06::eve_correlate(est(a1), est(a2), est(a3));
        return py::make_tuple(r.angle, static_cast<int>(r.bit));
      },
      py::arg("s1"), py::arg("s2"), py::arg("s3"),
      "Message angle and bit from three exact hop angles.");

  m.def(
      "digest",
      [](const std::string& message, const std::string& algorithm) {
        return k06::to_hex(k06::publish_hash(k06::parse_message(message), algorithm).digest);
      },
      py::arg("message"), py::arg("algorithm") = std::string(k06::kDefaultDigest));
}
