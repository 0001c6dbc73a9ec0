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

#include <gtest/gtest.h>

#include "k06/bits.hpp"

namespace k06 {
namespace {

TEST(BitsTest, ParsesEveryForm) {
  EXPECT_EQ(parse_message("bits:0110"), (BitString{0, 1, 1, 0}));
  EXPECT_EQ(parse_message("101"), (BitString{1, 0, 1}));
  EXPECT_EQ(parse_message("hex:a5"), (BitString{1, 0, 1, 0, 0, 1, 0, 1}));
  EXPECT_EQ(parse_message("hex:F"), (BitString{1, 1, 1, 1}));
}

TEST(BitsTest, RejectsGarbage) {
  EXPECT_THROW(parse_message("bits:012"), std::invalid_argument);
  EXPECT_THROW(parse_message("hex:zz"), std::invalid_argument);
  EXPECT_THROW(parse_message("abc"), std::invalid_argument);
}

TEST(BitsTest, FormatRoundTrips) {
  Rng rng(1);
  for (std::size_t len : {1u, 7u, 64u, 1024u}) {
    const BitString b = random_bits(len, rng);
    EXPECT_EQ(parse_message(format_message(b)), b);
  }
}

TEST(HashTest, FrozenDigests) {
  EXPECT_EQ(to_hex(publish_hash({}).digest),
            "af5570f5a1810b7af78caf4bc70a660f0df51e42baf91d4de5b2328de0e83dfc");
  EXPECT_EQ(to_hex(publish_hash({1, 0, 1, 1, 0}).digest),
            "8ced89f2ef4f3320a7ff70628095f804053c7dd9667f7a49b845a31fce17aa5c");
}

TEST(HashTest, EmptyMessageMatchesItself) {
  EXPECT_EQ(verify_hash({}, publish_hash({})), HashCheck::kMatch);
}

TEST(HashTest, VerifyMatchesOwnDigest) {
  Rng rng(2);
  for (const char* alg : {"sha256", "sha512", "sha3-256"}) {
    for (int i = 0; i < 200; ++i) {
      const BitString b = random_bits(1 + i, rng);
      const auto auth = publish_hash(b, alg);
      EXPECT_EQ(auth.algorithm_id, alg);
      EXPECT_EQ(verify_hash(b, auth), HashCheck::kMatch);
    }
  }
}

TEST(HashTest, EverySingleBitFlipMismatches) {
  Rng rng(3);
  const BitString msg = random_bits(64, rng);
  const auto auth = publish_hash(msg);
  for (std::size_t i = 0; i < 64; ++i) {
    BitString flipped = msg;
    flipped[i] ^= 1;
    EXPECT_EQ(verify_hash(flipped, auth), HashCheck::kMismatch) << i;
  }
}

TEST(HashTest, LengthIsPartOfTheInput) {
  // Same packed bytes, different lengths.
  EXPECT_NE(publish_hash({1}).digest, publish_hash({1, 0}).digest);
  EXPECT_NE(publish_hash({}).digest, publish_hash({0}).digest);
}

TEST(HashTest, UnknownAlgorithmThrows) {
  EXPECT_THROW(publish_hash({1}, "md42"), UnknownAlgorithm);
  MessageAuth bogus{{0x00}, "crc"};
  EXPECT_THROW(verify_hash({1}, bogus), UnknownAlgorithm);
  EXPECT_FALSE(is_supported_digest("md42"));
  EXPECT_TRUE(is_supported_digest("sha256"));
}

TEST(HashTest, CheckNames) {
  EXPECT_EQ(to_string(HashCheck::kNotRun), "NOT_RUN");
  EXPECT_EQ(to_string(HashCheck::kMatch), "MATCH");
  EXPECT_EQ(to_string(HashCheck::kMismatch), "MISMATCH");
}

}  // namespace
}  // namespace k06
