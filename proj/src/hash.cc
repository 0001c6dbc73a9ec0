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

#include "k06/hash.hpp"

#include <openssl/evp.h>

#include <memory>

namespace k06 {

namespace {

const EVP_MD* lookup(std::string_view algorithm_id) {
  if (algorithm_id == "sha256") return EVP_sha256();
  if (algorithm_id == "sha512") return EVP_sha512();
  if (algorithm_id == "sha3-256") return EVP_sha3_256();
  return nullptr;
}

std::vector<std::uint8_t> encode(const BitString& bits) {
  std::vector<std::uint8_t> buf(8 + (bits.size() + 7) / 8, 0);
  const std::uint64_t n = bits.size();
  for (int i = 0; i < 8; ++i) {
    buf[i] = static_cast<std::uint8_t>(n >> (56 - 8 * i));
  }
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) buf[8 + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return buf;
}

std::vector<std::uint8_t> digest_of(const BitString& bits, const EVP_MD* md) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  const auto input = encode(bits);
  std::vector<std::uint8_t> out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) {
    throw std::runtime_error("digest computation failed");
  }
  out.resize(len);
  return out;
}

}  // namespace

std::string_view to_string(HashCheck check) {
  switch (check) {
    case HashCheck::kNotRun:
      return "NOT_RUN";
    case HashCheck::kMatch:
      return "MATCH";
    case HashCheck::kMismatch:
      return "MISMATCH";
  }
  return "?";
}

bool is_supported_digest(std::string_view algorithm_id) {
  return lookup(algorithm_id) != nullptr;
}

MessageAuth publish_hash(const BitString& bits, std::string_view algorithm_id) {
  const EVP_MD* md = lookup(algorithm_id);
  if (md == nullptr) {
    throw UnknownAlgorithm("unknown digest algorithm: " +
                           std::string(algorithm_id));
  }
  return {digest_of(bits, md), std::string(algorithm_id)};
}

HashCheck verify_hash(const BitString& bits, const MessageAuth& auth) {
  const EVP_MD* md = lookup(auth.algorithm_id);
  if (md == nullptr) {
    throw UnknownAlgorithm("unknown digest algorithm: " + auth.algorithm_id);
  }
  return digest_of(bits, md) == auth.digest ? HashCheck::kMatch
                                            : HashCheck::kMismatch;
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 * bytes.size());
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

}  // namespace k06
