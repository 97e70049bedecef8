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

// Chat-completion backends (OpenAI-compatible HTTP, cache replay, gold
// oracle), a digest-keyed completion cache and a bounded-concurrency batch
// driver.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "framekit/prompting.hpp"

namespace framekit {

struct ChatMessage {
  std::string role;
  std::string content;
};

// System message (when nonempty) followed by the user message.
std::vector<ChatMessage> to_messages(const PromptRecord& prompt);

// Lowercase hex SHA-256 over the canonical JSON of model, temperature and
// messages. Latency, timestamps and prompt metadata do not contribute.
std::string request_digest(const std::string& model_name, double temperature,
                           const std::vector<ChatMessage>& messages);

struct ModelEndpoint {
  std::string base_url;
  std::string model_name;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::string api_key_env = "OPENAI_API_KEY";  // empty: send no Authorization header
  double timeout_seconds = 120.0;
};

// Throws Error(InvalidConfig) for a negative temperature, an empty model name
// or a base_url that is not http(s)://host[:port][/path].
void validate_endpoint(const ModelEndpoint& endpoint);

struct RetryPolicy {
  int max_attempts = 6;
  double base_delay_seconds = 1.0;
  double jitter = 0.2;
  std::uint64_t jitter_seed = 0;
};

// Delay before retry number `attempt` (0-based): base * 2^attempt, scaled by
// a factor drawn from [1 - jitter, 1 + jitter].
double backoff_delay(const RetryPolicy& policy, int attempt, Rng& rng);

struct Completion {
  std::string text;
  std::string finish_reason;
  std::string digest;
  int attempt_count = 0;  // 0 when served from cache
  double latency_ms = 0;
  bool from_cache = false;
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Throws Error with AuthError, RateLimitedExhausted, ReplayMiss or
  // TransportError on failure.
  virtual Completion complete(const PromptRecord& prompt, const std::string& digest) = 0;

  virtual std::string model_name() const = 0;
  virtual double temperature() const { return 0.0; }
};

class HttpBackend : public Backend {
 public:
  using Sleeper = std::function<void(double seconds)>;

  explicit HttpBackend(ModelEndpoint endpoint, RetryPolicy retry = {}, Sleeper sleeper = {});

  Completion complete(const PromptRecord& prompt, const std::string& digest) override;
  std::string model_name() const override { return endpoint_.model_name; }
  double temperature() const override { return endpoint_.temperature; }

 private:
  ModelEndpoint endpoint_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  std::mutex rng_mu_;
  Rng jitter_rng_;
};

struct CompletionRecord {
  std::string digest;
  std::string model;
  double temperature = 0.0;
  PromptMeta prompt_meta;
  std::string response_text;
  std::string finish_reason;
  double latency_ms = 0;
  int attempt_count = 0;
};

std::string completion_record_to_json(const CompletionRecord& record);
CompletionRecord completion_record_from_json(const std::string& line);

// Append-only JSONL store of completion records keyed by digest. Safe for
// concurrent use; writes are serialized.
class CacheStore {
 public:
  // Loads existing records from `path` if the file exists. An empty path
  // keeps the store in memory only.
  explicit CacheStore(std::string path);

  std::optional<CompletionRecord> lookup(const std::string& digest) const;
  void append(const CompletionRecord& record);
  std::size_t size() const;
  std::vector<CompletionRecord> snapshot() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, CompletionRecord> records_;
};

// Serves responses recorded in a cache file; never touches the network.
class ReplayBackend : public Backend {
 public:
  // Model name and temperature default to the single pair recorded in the
  // file; pass them explicitly when the file mixes several models.
  explicit ReplayBackend(const std::string& path, std::optional<std::string> model = std::nullopt,
                         std::optional<double> temperature = std::nullopt);

  Completion complete(const PromptRecord& prompt, const std::string& digest) override;
  std::string model_name() const override { return model_; }
  double temperature() const override { return temperature_; }

 private:
  CacheStore store_;
  std::string model_;
  double temperature_ = 0.0;
};

enum class OracleMode { Perfect, Empty, Corrupt, WrongFrame, AllFrames, GoldSupport };

std::optional<OracleMode> parse_oracle_mode(std::string_view name);
const char* oracle_mode_name(OracleMode mode);

// Scripted stand-in for a model, answering from gold annotations:
//   perfect     gold encoding for the gold frame, nothing for other frames
//   empty       nothing for every prompt
//   corrupt     gold encoding with its last FE dropped
//   wrong-frame nothing for the gold frame, one FE for every other frame
//   all-frames  gold encoding for the gold frame, one FE for other frames
//   gold-support  like perfect, but a gold instance without FEs still gets one
//               FE on its target, so the gold frame is always supported
// Prompts are matched to gold by PromptMeta::instance_id.
class OracleBackend : public Backend {
 public:
  OracleBackend(OracleMode mode, std::shared_ptr<const Lexicon> lexicon,
                const std::vector<FrameInstance>& gold);

  Completion complete(const PromptRecord& prompt, const std::string& digest) override;
  std::string model_name() const override;

  // The response text the oracle gives for `prompt`.
  std::string respond(const PromptRecord& prompt) const;

 private:
  OracleMode mode_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::unordered_map<std::string, FrameInstance> gold_;
};

// Backend driven by a callable; used for tests and custom adapters.
class FunctionBackend : public Backend {
 public:
  using Fn = std::function<std::string(const PromptRecord&)>;
  FunctionBackend(std::string model, Fn fn) : model_(std::move(model)), fn_(std::move(fn)) {}

  Completion complete(const PromptRecord& prompt, const std::string& digest) override;
  std::string model_name() const override { return model_; }

 private:
  std::string model_;
  Fn fn_;
};

// Wraps a response in a fenced block labeled for `format`.
std::string fenced(RepresentationFormat format, const std::string& body);

struct BatchItem {
  std::optional<Completion> completion;
  std::optional<ErrorKind> error_kind;
  std::string error_message;

  bool ok() const { return completion.has_value(); }
};

class LlmClient {
 public:
  explicit LlmClient(std::shared_ptr<Backend> backend, std::shared_ptr<CacheStore> cache = nullptr);

  std::string digest_for(const PromptRecord& prompt) const;

  // Cache hit: attempt_count 0. Miss: calls the backend and appends the
  // result to the cache.
  Completion complete(const PromptRecord& prompt);

  // Results in input order. At most max_in_flight backend calls run at once.
  // Per-item failures land in the item; the batch itself never throws.
  // With a cache, repeated prompts are sent once and the repeats are served
  // from the cache.
  std::vector<BatchItem> complete_batch(const std::vector<PromptRecord>& prompts,
                                        std::size_t max_in_flight);

  Backend& backend() { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<CacheStore> cache_;
};

}  // namespace framekit
