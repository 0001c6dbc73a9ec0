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

#ifndef K06_HASH_HPP_
#define K06_HASH_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "k06/bits.hpp"

namespace k06 {

inline constexpr std::string_view kDefaultDigest = "sha256";

// A digest Alice publishes so Bob can detect a substituted message.
struct MessageAuth {
  std::vector<std::uint8_t> digest;
  std::string algorithm_id;

  friend bool operator==(const MessageAuth&, const MessageAuth&) = default;
};

enum class HashCheck : std::uint8_t { kNotRun, kMatch, kMismatch };

std::string_view to_string(HashCheck check);

class UnknownAlgorithm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_supported_digest(std::string_view algorithm_id);

// The digest input is the 64-bit big-endian bit length followed by the bits
// packed MSB first, so messages of different lengths never share an input.
MessageAuth publish_hash(const BitString& bits,
                         std::string_view algorithm_id = kDefaultDigest);

// Recomputes the digest of `bits` under auth.algorithm_id.
HashCheck verify_hash(const BitString& bits, const MessageAuth& auth);

std::string to_hex(const std::vector<std::uint8_t>& bytes);

}  // namespace k06

#endif  // K06_HASH_HPP_
