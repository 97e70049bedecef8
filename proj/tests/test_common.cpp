// Copyright 2026 The framekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <set>

#include "framekit/common.hpp"

using namespace framekit;

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Utf8, BoundariesCountCodePoints) {
  std::string s = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80";  // a é € 😀
  auto b = utf8::boundaries(s);
  ASSERT_EQ(b.size(), 5u);
  EXPECT_EQ(b, (std::vector<std::size_t>{0, 1, 3, 6, 10}));
  EXPECT_EQ(utf8::length(s), 4u);
  EXPECT_EQ(utf8::substr(s, 1, 3), "\xC3\xA9\xE2\x82\xAC");
  EXPECT_EQ(utf8::to_codepoint(s, 6), 3u);
}

TEST(Utf8, InvalidBytesAreSingleCodePoints) {
  std::string s = "x\xFFy";
  EXPECT_EQ(utf8::length(s), 3u);
}

TEST(Text, NormalizeWhitespace) {
  EXPECT_EQ(normalize_whitespace("  to \t Goodwill\n "), "to Goodwill");
  EXPECT_EQ(normalize_whitespace(""), "");
  EXPECT_EQ(trim("  a b  "), "a b");
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42), c(43);
  std::vector<std::uint64_t> va, vb, vc;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next());
    vb.push_back(b.next());
    vc.push_back(c.next());
  }
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
}

TEST(Rng, UniformStaysInRangeAndCoversIt) {
  Rng r(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = r.uniform(10);
    ASSERT_LT(v, 10u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 10u);
  for (int i = 0; i < 1000; ++i) {
    double u = r.unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, ShuffleIsPermutation) {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Rng r(3);
  auto w = v;
  r.shuffle(w);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(Rng, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(0, 0), derive_seed(0, 1));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(Error, CarriesKind) {
  try {
    throw Error(ErrorKind::ReplayMiss, "abc");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ReplayMiss);
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
    EXPECT_STREQ(to_string(e.kind()), "ReplayMiss");
  }
}

TEST(Files, ReadMissingFileThrowsIoError) {
  try {
    read_file("/nonexistent/framekit/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}
