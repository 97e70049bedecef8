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

// Shared error type, UTF-8 offset helpers and a portable seeded RNG.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace framekit {

inline constexpr const char* kVersion = "0.3.0";

enum class ErrorKind {
  MissingDirectory,
  MalformedXml,
  UnknownCoreness,
  OffsetOutOfBounds,
  OverlappingSplit,
  MalformedRecord,
  OverlappingTarget,
  DuplicateFeInJson,
  NestedSpans,
  AuthError,
  RateLimitedExhausted,
  ReplayMiss,
  TransportError,
  EmptyScoreList,
  DegenerateVariance,
  InvalidConfig,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

// All toolkit failures are reported through this exception. The kind is
// stable and meant for programmatic dispatch; what() carries file/line
// context for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

namespace utf8 {

// Byte offset of every code point boundary in `text`, plus text.size() at
// the end. Entry i is the byte position of code point i. Invalid bytes are
// treated as single-byte code points.
std::vector<std::size_t> boundaries(std::string_view text);

std::size_t length(std::string_view text);

// Substring by code point range [start, end).
std::string substr(std::string_view text, std::size_t start, std::size_t end);

// Converts a byte offset that lies on a boundary into a code point index.
std::size_t to_codepoint(std::string_view text, std::size_t byte_offset);

}  // namespace utf8

// Collapse whitespace runs to a single space and trim both ends.
std::string normalize_whitespace(std::string_view text);

std::string trim(std::string_view text);

// splitmix64-seeded xoshiro256** generator. The output sequence is fixed by
// the algorithm, unlike std:: distributions whose results vary between
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);

  // Uniform real in [0, 1).
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_[4];
};

// Mixes a base seed with a stream index into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace framekit
