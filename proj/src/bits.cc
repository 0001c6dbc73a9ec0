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

#include "k06/bits.hpp"

#include <cctype>
#include <stdexcept>

namespace k06 {

namespace {

BitString parse_binary(std::string_view text) {
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("message bits must be 0 or 1, got '" +
                                  std::string(1, c) + "'");
    }
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

BitString parse_hex(std::string_view text) {
  BitString out;
  out.reserve(4 * text.size());
  for (char c : text) {
    const int lower = std::tolower(static_cast<unsigned char>(c));
    int nibble;
    if (lower >= '0' && lower <= '9') {
      nibble = lower - '0';
    } else if (lower >= 'a' && lower <= 'f') {
      nibble = lower - 'a' + 10;
    } else {
      throw std::invalid_argument("invalid hex digit '" + std::string(1, c) +
                                  "'");
    }
    for (int shift = 3; shift >= 0; --shift) {
      out.push_back(static_cast<std::uint8_t>((nibble >> shift) & 1));
    }
  }
  return out;
}

}  // namespace

BitString parse_message(std::string_view text) {
  if (text.starts_with("hex:")) return parse_hex(text.substr(4));
  if (text.starts_with("bits:")) return parse_binary(text.substr(5));
  return parse_binary(text);
}

std::string to_bit_text(const BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::string format_message(const BitString& bits) {
  return "bits:" + to_bit_text(bits);
}

BitString random_bits(std::size_t length, Rng& rng) {
  BitString out(length);
  std::bernoulli_distribution coin(0.5);
  for (auto& b : out) b = coin(rng) ? 1 : 0;
  return out;
}

}  // namespace k06
