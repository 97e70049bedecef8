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

#include "framekit/common.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <sstream>

namespace framekit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingDirectory: return "MissingDirectory";
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::UnknownCoreness: return "UnknownCoreness";
    case ErrorKind::OffsetOutOfBounds: return "OffsetOutOfBounds";
    case ErrorKind::OverlappingSplit: return "OverlappingSplit";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::OverlappingTarget: return "OverlappingTarget";
    case ErrorKind::DuplicateFeInJson: return "DuplicateFeInJson";
    case ErrorKind::NestedSpans: return "NestedSpans";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimitedExhausted: return "RateLimitedExhausted";
    case ErrorKind::ReplayMiss: return "ReplayMiss";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::EmptyScoreList: return "EmptyScoreList";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace utf8 {

namespace {

std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

std::vector<std::size_t> boundaries(std::string_view text) {
  std::vector<std::size_t> out;
  out.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    out.push_back(i);
    std::size_t len = sequence_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    i += len;
  }
  out.push_back(text.size());
  return out;
}

std::size_t length(std::string_view text) { return boundaries(text).size() - 1; }

std::string substr(std::string_view text, std::size_t start, std::size_t end) {
  auto b = boundaries(text);
  std::size_t n = b.size() - 1;
  if (start > n) start = n;
  if (end > n) end = n;
  if (end < start) end = start;
  return std::string(text.substr(b[start], b[end] - b[start]));
}

std::size_t to_codepoint(std::string_view text, std::size_t byte_offset) {
  auto b = boundaries(text);
  std::size_t idx = 0;
  while (idx + 1 < b.size() && b[idx] < byte_offset) ++idx;
  return idx;
}

}  // namespace utf8

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& s : state_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::InvalidArgument, "Rng::uniform bound 0");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % bound;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0xD1B54A32D192ED03ULL);
  splitmix64(x);
  return splitmix64(x);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::IoError, "sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path);
}

}  // namespace framekit
