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

#ifndef K06_BITS_HPP_
#define K06_BITS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "k06/random.hpp"

namespace k06 {

// One element per message bit, each 0 or 1.
using BitString = std::vector<std::uint8_t>;

// Accepts "bits:0110", "hex:9f" (MSB first, 4 bits per digit) or a bare
// string of 0/1 characters. Throws std::invalid_argument on anything else.
BitString parse_message(std::string_view text);

// "bits:" followed by the 0/1 characters.
std::string format_message(const BitString& bits);

std::string to_bit_text(const BitString& bits);

BitString random_bits(std::size_t length, Rng& rng);

}  // namespace k06

#endif  // K06_BITS_HPP_
