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

#include "k06/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "k06/hash.hpp"
#include "k06/random.hpp"

namespace k06 {

namespace {

namespace pt = boost::property_tree;

using Schema = std::map<std::string, std::set<std::string>>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Key lookup plus typed conversion with section-qualified error messages.
class Reader {
 public:
  Reader(const pt::ptree& tree, const Schema& schema) : tree_(tree) {
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigDomainError("key '" + section + "' must be inside a section");
      }
      const auto it = schema.find(section);
      if (it == schema.end()) {
        throw ConfigDomainError("unknown section [" + section + "]");
      }
      for (const auto& [key, value] : body) {
        if (!it->second.contains(key)) {
          throw ConfigDomainError("unknown key '" + key + "' in [" + section + "]");
        }
      }
    }
  }

  std::optional<std::string> raw(const std::string& section,
                                 const std::string& key) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <typename T>
  std::optional<T> number(const std::string& section, const std::string& key) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    return parse_number<T>(*v, where(section, key));
  }

  std::optional<bool> flag(const std::string& section, const std::string& key) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigParseError(where(section, key) + ": expected true or false, got '" +
                           *v + "'");
  }

  template <typename T>
  static T parse_number(const std::string& text, const std::string& where) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
      throw ConfigParseError(where + ": '" + text + "' is not a valid number");
    }
    return value;
  }

  static std::string where(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
  }

 private:
  const pt::ptree& tree_;
};

pt::ptree read_tree(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigParseError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

std::vector<Stage> parse_stages(const std::string& text, const std::string& where) {
  std::vector<Stage> out;
  for (const auto& item : split_list(text)) {
    const auto s = parse_stage(item);
    if (!s || *s == Stage::kS1) {
      throw ConfigDomainError(where + ": '" + item +
                              "' is not a checkable stage (S2, S3, FINAL)");
    }
    if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string join_stages(const std::vector<Stage>& stages) {
  std::string s;
  for (Stage st : stages) {
    if (!s.empty()) s += ",";
    s += to_string(st);
  }
  return s;
}

BitString parse_bits(const std::string& text, const std::string& where) {
  try {
    return parse_message(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigParseError(where + ": " + e.what());
  }
}

Siphon parse_siphon(const std::string& text, const std::string& where) {
  try {
    return Siphon::parse(text);
  } catch (const std::invalid_argument& e) {
    // A fraction outside [0, 1] is well-formed but out of range.
    if (text.starts_with("f:")) {
      double f = 0.0;
      const char* first = text.data() + 2;
      const char* last = text.data() + text.size();
      auto [ptr, ec] = std::from_chars(first, last, f);
      if (ec == std::errc() && ptr == last) {
        throw ConfigDomainError(where + ": " + e.what());
      }
    }
    throw ConfigParseError(where + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

template <typename Fn>
void domain_check(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigDomainError(e.what());
  }
}

const Schema kScenarioSchema = {
    {"session", {"message", "seed", "hash_timing", "verify_hash", "digest"}},
    {"source", {"mu", "attenuation", "emission"}},
    {"protocol",
     {"tap_budget", "z_threshold", "checked_stages", "alarm_quorum",
      "eve_read_floor", "continue_below_floor"}},
    {"eve",
     {"mode", "siphon", "siphon_s1", "siphon_s2", "siphon_s3", "substitute",
      "theta"}},
    {"secrets", {"alice_theta", "bob_theta"}},
    {"output", {"transcript"}},
};

const Schema kSweepSchema = {
    {"plan",
     {"mu", "siphon", "z", "message_bits", "trials", "master_seed",
      "target_accuracy", "tap_fraction", "attenuation", "checked_stages",
      "threads"}},
    {"output", {"csv"}},
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  const pt::ptree tree = read_tree(text);
  const Reader r(tree, kScenarioSchema);
  ScenarioConfig c;

  const auto message = r.raw("session", "message");
  if (!message) throw ConfigDomainError("[session] message is required");
  c.message = parse_bits(*message, Reader::where("session", "message"));
  if (auto v = r.number<std::uint64_t>("session", "seed")) c.seed = *v;
  if (auto v = r.raw("session", "hash_timing")) {
    const auto t = parse_hash_timing(*v);
    if (!t) throw ConfigParseError("[session] hash_timing: expected before or after");
    c.hash_timing = *t;
  }
  if (auto v = r.flag("session", "verify_hash")) c.verify_hash = *v;
  if (auto v = r.raw("session", "digest")) c.digest = *v;

  if (auto v = r.number<double>("source", "mu")) c.mu = *v;
  if (auto v = r.number<double>("source", "attenuation")) c.attenuation = *v;
  if (auto v = r.raw("source", "emission")) {
    if (*v == "poisson") {
      c.emission = Emission::kPoisson;
    } else if (*v == "fixed") {
      c.emission = Emission::kFixed;
    } else {
      throw ConfigParseError("[source] emission: expected poisson or fixed");
    }
  }

  c.tap_budget = r.number<std::uint64_t>("protocol", "tap_budget");
  if (auto v = r.number<double>("protocol", "z_threshold")) c.z_threshold = *v;
  if (auto v = r.raw("protocol", "checked_stages")) {
    c.checked_stages = parse_stages(*v, Reader::where("protocol", "checked_stages"));
  }
  if (auto v = r.number<std::size_t>("protocol", "alarm_quorum")) c.alarm_quorum = *v;
  if (auto v = r.number<std::uint64_t>("protocol", "eve_read_floor")) {
    c.eve_read_floor = *v;
  }
  if (auto v = r.flag("protocol", "continue_below_floor")) c.continue_below_floor = *v;

  if (auto v = r.raw("eve", "mode")) {
    const auto m = parse_eve_mode(*v);
    if (!m) throw ConfigParseError("[eve] mode: expected none, siphon or impersonate");
    c.eve_mode = *m;
  }
  if (auto v = r.raw("eve", "siphon")) {
    const Siphon s = parse_siphon(*v, Reader::where("eve", "siphon"));
    for (Stage hop : {Stage::kS1, Stage::kS2, Stage::kS3}) c.eve_siphon.insert_or_assign(hop, s);
  }
  const std::pair<const char*, Stage> per_hop[] = {
      {"siphon_s1", Stage::kS1}, {"siphon_s2", Stage::kS2}, {"siphon_s3", Stage::kS3}};
  for (const auto& [key, hop] : per_hop) {
    if (auto v = r.raw("eve", key)) {
      c.eve_siphon.insert_or_assign(hop, parse_siphon(*v, Reader::where("eve", key)));
    }
  }
  if (auto v = r.raw("eve", "substitute")) {
    c.substitute_bits = parse_bits(*v, Reader::where("eve", "substitute"));
  }
  c.eve_theta = r.number<double>("eve", "theta");
  c.alice_theta = r.number<double>("secrets", "alice_theta");
  c.bob_theta = r.number<double>("secrets", "bob_theta");
  if (auto v = r.raw("output", "transcript")) c.transcript_path = *v;

  // Domain bounds.
  if (c.message.empty()) throw ConfigDomainError("[session] message must be nonempty");
  if (!is_supported_digest(c.digest)) {
    throw ConfigDomainError("[session] digest: unsupported algorithm '" + c.digest + "'");
  }
  domain_check([&] { SourceModel(c.mu, c.attenuation, c.emission); });
  if (std::isnan(c.z_threshold) || c.z_threshold < 0.0) {
    throw ConfigDomainError("[protocol] z_threshold must be >= 0");
  }
  if (c.alarm_quorum == 0) throw ConfigDomainError("[protocol] alarm_quorum must be >= 1");
  if (c.eve_mode == EveMode::kSiphon && c.eve_siphon.empty()) {
    throw ConfigDomainError("[eve] siphon mode needs siphon or siphon_s1..s3");
  }
  if (c.eve_mode != EveMode::kSiphon && !c.eve_siphon.empty()) {
    throw ConfigDomainError("[eve] siphon settings require mode = siphon");
  }
  if (c.eve_mode == EveMode::kImpersonate && c.substitute_bits.empty()) {
    throw ConfigDomainError("[eve] impersonate mode needs a nonempty substitute");
  }
  if (c.eve_mode != EveMode::kImpersonate &&
      (!c.substitute_bits.empty() || c.eve_theta)) {
    throw ConfigDomainError("[eve] substitute/theta require mode = impersonate");
  }
  for (const auto* theta : {&c.eve_theta, &c.alice_theta, &c.bob_theta}) {
    if (*theta && !std::isfinite(**theta)) {
      throw ConfigDomainError("rotation angles must be finite");
    }
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(read_file(path));
}

std::string serialize(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[session]\n"
     << "message = " << format_message(c.message) << '\n'
     << "seed = " << c.seed << '\n'
     << "hash_timing = " << to_string(c.hash_timing) << '\n'
     << "verify_hash = " << (c.verify_hash ? "true" : "false") << '\n'
     << "digest = " << c.digest << '\n'
     << "\n[source]\n"
     << "mu = " << fmt(c.mu) << '\n'
     << "attenuation = " << fmt(c.attenuation) << '\n'
     << "emission = " << (c.emission == Emission::kFixed ? "fixed" : "poisson") << '\n'
     << "\n[protocol]\n";
  if (c.tap_budget) os << "tap_budget = " << *c.tap_budget << '\n';
  os << "z_threshold = " << fmt(c.z_threshold) << '\n'
     << "checked_stages = " << join_stages(c.checked_stages) << '\n'
     << "alarm_quorum = " << c.alarm_quorum << '\n'
     << "eve_read_floor = " << c.eve_read_floor << '\n'
     << "continue_below_floor = " << (c.continue_below_floor ? "true" : "false") << '\n'
     << "\n[eve]\n"
     << "mode = " << to_string(c.eve_mode) << '\n';
  for (const auto& [hop, s] : c.eve_siphon) {
    os << (hop == Stage::kS1 ? "siphon_s1" : hop == Stage::kS2 ? "siphon_s2" : "siphon_s3")
       << " = " << s.to_string() << '\n';
  }
  if (!c.substitute_bits.empty()) {
    os << "substitute = " << format_message(c.substitute_bits) << '\n';
  }
  if (c.eve_theta) os << "theta = " << fmt(*c.eve_theta) << '\n';
  if (c.alice_theta || c.bob_theta) {
    os << "\n[secrets]\n";
    if (c.alice_theta) os << "alice_theta = " << fmt(*c.alice_theta) << '\n';
    if (c.bob_theta) os << "bob_theta = " << fmt(*c.bob_theta) << '\n';
  }
  if (!c.transcript_path.empty()) {
    os << "\n[output]\ntranscript = " << c.transcript_path << '\n';
  }
  return os.str();
}

namespace {

// Independent child streams of the scenario seed.
constexpr std::uint64_t kAliceSecretStream = 1;
constexpr std::uint64_t kBobSecretStream = 2;
constexpr std::uint64_t kEveSecretStream = 3;

}  // namespace

SessionConfig to_session(const ScenarioConfig& c) {
  SessionConfig s;
  s.session_id = c.seed;
  s.message = c.message;
  s.source = SourceModel(c.mu, c.attenuation, c.emission);
  const std::uint64_t tap =
      c.tap_budget ? *c.tap_budget : static_cast<std::uint64_t>(std::llround(c.mu / 4.0));
  auto secret = [&](const std::optional<double>& override_theta, std::uint64_t stream) {
    if (override_theta) return Rotation(*override_theta);
    Rng rng = make_stream(c.seed, stream);
    return Rotation::random(rng);
  };
  s.alice = {secret(c.alice_theta, kAliceSecretStream), tap};
  s.bob = {secret(c.bob_theta, kBobSecretStream), tap};
  s.rule = DetectionRule::from_ledger(s.source, tap, c.z_threshold, c.checked_stages);
  s.rule.alarm_quorum = c.alarm_quorum;
  s.low_power = {c.eve_read_floor, c.continue_below_floor};
  s.eve.mode = c.eve_mode;
  s.eve.siphon_per_stage = c.eve_siphon;
  s.eve.substitute_bits = c.substitute_bits;
  if (c.eve_mode == EveMode::kImpersonate) {
    s.eve.rotation = secret(c.eve_theta, kEveSecretStream);
  }
  s.verify_hash = c.verify_hash;
  s.hash_timing = c.hash_timing;
  s.digest_algorithm = c.digest;
  return s;
}

SweepConfig parse_sweep(std::string_view text) {
  const pt::ptree tree = read_tree(text);
  const Reader r(tree, kSweepSchema);
  SweepConfig c;
  auto& p = c.plan;

  auto doubles = [&](const char* key) {
    std::vector<double> out;
    if (auto v = r.raw("plan", key)) {
      for (const auto& item : split_list(*v)) {
        out.push_back(Reader::parse_number<double>(item, Reader::where("plan", key)));
      }
    }
    return out;
  };
  p.mu = doubles("mu");
  p.z = doubles("z");
  if (auto v = r.raw("plan", "siphon")) {
    for (const auto& item : split_list(*v)) {
      p.siphon.push_back(parse_siphon(item, Reader::where("plan", "siphon")));
    }
  }
  if (auto v = r.number<std::size_t>("plan", "message_bits")) p.message_bits = *v;
  if (auto v = r.number<std::size_t>("plan", "trials")) p.trials = *v;
  if (auto v = r.number<std::uint64_t>("plan", "master_seed")) p.master_seed = *v;
  if (auto v = r.number<double>("plan", "target_accuracy")) p.target_accuracy = *v;
  if (auto v = r.number<double>("plan", "tap_fraction")) p.tap_fraction = *v;
  if (auto v = r.number<double>("plan", "attenuation")) p.attenuation = *v;
  if (auto v = r.raw("plan", "checked_stages")) {
    p.checked_stages = parse_stages(*v, Reader::where("plan", "checked_stages"));
  }
  if (auto v = r.number<unsigned>("plan", "threads")) p.threads = *v;
  if (auto v = r.raw("output", "csv")) c.csv_path = *v;

  domain_check([&] { analysis::validate(p); });
  return c;
}

SweepConfig load_sweep(const std::string& path) { return parse_sweep(read_file(path)); }

std::string serialize(const SweepConfig& c) {
  const auto& p = c.plan;
  auto join = [](const auto& items, auto&& to_text) {
    std::string s;
    for (const auto& it : items) {
      if (!s.empty()) s += ", ";
      s += to_text(it);
    }
    return s;
  };
  std::ostringstream os;
  os << "[plan]\n"
     << "mu = " << join(p.mu, fmt) << '\n'
     << "siphon = " << join(p.siphon, [](const Siphon& s) { return s.to_string(); }) << '\n'
     << "z = " << join(p.z, fmt) << '\n'
     << "message_bits = " << p.message_bits << '\n'
     << "trials = " << p.trials << '\n'
     << "master_seed = " << p.master_seed << '\n'
     << "target_accuracy = " << fmt(p.target_accuracy) << '\n'
     << "tap_fraction = " << fmt(p.tap_fraction) << '\n'
     << "attenuation = " << fmt(p.attenuation) << '\n'
     << "checked_stages = " << join_stages(p.checked_stages) << '\n'
     << "threads = " << p.threads << '\n';
  if (!c.csv_path.empty()) os << "\n[output]\ncsv = " << c.csv_path << '\n';
  return os.str();
}

}  // namespace k06
