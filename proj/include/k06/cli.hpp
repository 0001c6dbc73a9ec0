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

#ifndef K06_CLI_HPP_
#define K06_CLI_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace k06::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAborted = 2;
inline constexpr int kExitHashMismatch = 3;
inline constexpr int kExitDecodeFailure = 4;

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct SweepOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> trials;
};

struct OracleOptions {
  double mu = 1000.0;
  double f = 0.0;
  double z = 5.0;
  std::optional<std::uint64_t> tap_budget;
  double attenuation = 1.0;
};

// `out` receives the primary output (transcript or CSV when no file is
// configured, otherwise a summary); `err` receives diagnostics.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err);

// Writes `content` to `path` via a temporary file in the same directory and
// a rename, so readers never observe a partial file.
void write_atomically(const std::string& path, const std::string& content);

// Parses argv (subcommands run, sweep, oracle) and dispatches. K06_SEED is
// used when --seed is absent.
int main(int argc, char** argv);

}  // namespace k06::cli

#endif  // K06_CLI_HPP_
