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

#include "framekit/llm_client.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace framekit {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<ChatMessage> to_messages(const PromptRecord& prompt) {
  std::vector<ChatMessage> out;
  if (!prompt.system.empty()) out.push_back({"system", prompt.system});
  out.push_back({"user", prompt.user});
  return out;
}

std::string request_digest(const std::string& model_name, double temperature,
                           const std::vector<ChatMessage>& messages) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  json canonical = {{"model", model_name}, {"temperature", temperature}, {"messages", msgs}};
  return sha256_hex(canonical.dump());
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path_prefix;
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/:\s]+(:[0-9]+)?)(/[^\s]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) return std::nullopt;
  ParsedUrl out{m[1].str(), m[3].matched ? m[3].str() : ""};
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

}  // namespace

void validate_endpoint(const ModelEndpoint& endpoint) {
  if (endpoint.model_name.empty()) throw Error(ErrorKind::InvalidConfig, "model name is empty");
  if (!(endpoint.temperature >= 0.0)) throw Error(ErrorKind::InvalidConfig, "temperature must be >= 0");
  if (!parse_url(endpoint.base_url))
    throw Error(ErrorKind::InvalidConfig, "base_url must look like http(s)://host[:port][/path]: " +
                                              endpoint.base_url);
  if (endpoint.max_output_tokens <= 0)
    throw Error(ErrorKind::InvalidConfig, "max_output_tokens must be positive");
}

double backoff_delay(const RetryPolicy& policy, int attempt, Rng& rng) {
  double factor = 1.0 + policy.jitter * (2.0 * rng.unit() - 1.0);
  return policy.base_delay_seconds * std::ldexp(1.0, attempt) * factor;
}

// --- http -------------------------------------------------------------------

HttpBackend::HttpBackend(ModelEndpoint endpoint, RetryPolicy retry, Sleeper sleeper)
    : endpoint_(std::move(endpoint)), retry_(retry), sleeper_(std::move(sleeper)),
      jitter_rng_(retry.jitter_seed) {
  validate_endpoint(endpoint_);
  if (retry_.max_attempts < 1) throw Error(ErrorKind::InvalidConfig, "max_attempts must be >= 1");
  if (!sleeper_) {
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
}

Completion HttpBackend::complete(const PromptRecord& prompt, const std::string& digest) {
  const ParsedUrl url = *parse_url(endpoint_.base_url);

  httplib::Headers headers;
  if (!endpoint_.api_key_env.empty()) {
    const char* key = std::getenv(endpoint_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw Error(ErrorKind::AuthError, "environment variable " + endpoint_.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json msgs = json::array();
  for (const auto& m : to_messages(prompt)) msgs.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", endpoint_.model_name},
               {"temperature", endpoint_.temperature},
               {"max_tokens", endpoint_.max_output_tokens},
               {"messages", msgs}};
  const std::string payload = body.dump();
  const std::string path = url.path_prefix + "/chat/completions";

  const auto started = std::chrono::steady_clock::now();
  std::string last_failure;
  bool last_was_rate_limit = false;

  for (int attempt = 0; attempt < retry_.max_attempts; ++attempt) {
    if (attempt > 0) {
      double delay;
      {
        std::lock_guard<std::mutex> lock(rng_mu_);
        delay = backoff_delay(retry_, attempt - 1, jitter_rng_);
      }
      sleeper_(delay);
    }

    httplib::Client client(url.origin);
    auto secs = std::chrono::duration<double>(endpoint_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));

    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport: " + httplib::to_string(res.error());
      last_was_rate_limit = false;
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403)
      throw Error(ErrorKind::AuthError, "HTTP " + std::to_string(status) + ": " + res->body);
    if (status == 429 || status >= 500) {
      last_failure = "HTTP " + std::to_string(status);
      last_was_rate_limit = status == 429;
      continue;
    }
    if (status != 200)
      throw Error(ErrorKind::TransportError, "HTTP " + std::to_string(status) + ": " + res->body);

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty())
      throw Error(ErrorKind::TransportError, "malformed completion response");
    const json& choice = reply["choices"][0];
    Completion out;
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string())
      out.text = choice["message"]["content"].get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
      out.finish_reason = choice["finish_reason"].get<std::string>();
    out.digest = digest;
    out.attempt_count = attempt + 1;
    out.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return out;
  }

  if (last_was_rate_limit)
    throw Error(ErrorKind::RateLimitedExhausted,
                "rate limited after " + std::to_string(retry_.max_attempts) + " attempts");
  throw Error(ErrorKind::TransportError,
              "giving up after " + std::to_string(retry_.max_attempts) + " attempts: " + last_failure);
}

// --- cache ------------------------------------------------------------------

std::string completion_record_to_json(const CompletionRecord& r) {
  ordered_json j;
  j["digest"] = r.digest;
  j["model"] = r.model;
  j["temperature"] = r.temperature;
  j["prompt_meta"] = {{"instance_id", r.prompt_meta.instance_id},
                      {"sentence_id", r.prompt_meta.sentence_id},
                      {"frame_name", r.prompt_meta.frame_name},
                      {"format", format_name(r.prompt_meta.format)}};
  j["response_text"] = r.response_text;
  j["finish_reason"] = r.finish_reason;
  j["latency_ms"] = r.latency_ms;
  j["attempt_count"] = r.attempt_count;
  return j.dump();
}

CompletionRecord completion_record_from_json(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("digest") || !j["digest"].is_string() ||
      !j.contains("response_text") || !j["response_text"].is_string())
    throw Error(ErrorKind::MalformedRecord, "malformed completion record");
  CompletionRecord r;
  r.digest = j["digest"].get<std::string>();
  r.model = j.value("model", "");
  r.temperature = j.value("temperature", 0.0);
  r.response_text = j["response_text"].get<std::string>();
  r.finish_reason = j.value("finish_reason", "");
  r.latency_ms = j.value("latency_ms", 0.0);
  r.attempt_count = j.value("attempt_count", 0);
  if (j.contains("prompt_meta") && j["prompt_meta"].is_object()) {
    const json& m = j["prompt_meta"];
    r.prompt_meta.instance_id = m.value("instance_id", "");
    r.prompt_meta.sentence_id = m.value("sentence_id", "");
    r.prompt_meta.frame_name = m.value("frame_name", "");
    if (auto f = parse_format(m.value("format", ""))) r.prompt_meta.format = *f;
  }
  return r;
}

CacheStore::CacheStore(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      CompletionRecord r = completion_record_from_json(line);
      records_.emplace(r.digest, std::move(r));
    } catch (const Error&) {
      // a torn trailing line from an interrupted run
    }
  }
}

std::optional<CompletionRecord> CacheStore::lookup(const std::string& digest) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = records_.find(digest);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void CacheStore::append(const CompletionRecord& record) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!records_.emplace(record.digest, record).second) return;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot append to " + path_);
  out << completion_record_to_json(record) << '\n';
  out.flush();
}

std::size_t CacheStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

std::vector<CompletionRecord> CacheStore::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<CompletionRecord> out;
  out.reserve(records_.size());
  for (const auto& [_, r] : records_) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const CompletionRecord& a, const CompletionRecord& b) { return a.digest < b.digest; });
  return out;
}

// --- replay -----------------------------------------------------------------

ReplayBackend::ReplayBackend(const std::string& path, std::optional<std::string> model,
                             std::optional<double> temperature)
    : store_(path) {
  std::ifstream probe(path);
  if (!probe) throw Error(ErrorKind::IoError, "replay cache not found: " + path);
  std::set<std::pair<std::string, double>> seen;
  for (const auto& r : store_.snapshot()) seen.emplace(r.model, r.temperature);
  if (!model || !temperature) {
    std::set<std::string> models;
    std::set<double> temps;
    for (const auto& [m, t] : seen) {
      if (!model || m == *model) {
        models.insert(m);
        temps.insert(t);
      }
    }
    if (!model) {
      if (models.size() > 1)
        throw Error(ErrorKind::InvalidConfig, "replay cache holds several models; pass one explicitly");
      model = models.empty() ? std::string() : *models.begin();
    }
    if (!temperature) {
      if (temps.size() > 1)
        throw Error(ErrorKind::InvalidConfig, "replay cache holds several temperatures; pass one explicitly");
      temperature = temps.empty() ? 0.0 : *temps.begin();
    }
  }
  model_ = *model;
  temperature_ = *temperature;
}

Completion ReplayBackend::complete(const PromptRecord& prompt, const std::string& digest) {
  auto hit = store_.lookup(digest);
  if (!hit)
    throw Error(ErrorKind::ReplayMiss, "no recorded response for " + prompt.meta.instance_id + " / " +
                                           prompt.meta.frame_name + " (" + digest.substr(0, 12) + ")");
  Completion out;
  out.text = hit->response_text;
  out.finish_reason = hit->finish_reason;
  out.digest = digest;
  out.attempt_count = 0;
  out.from_cache = true;
  return out;
}

// --- oracle -----------------------------------------------------------------

std::optional<OracleMode> parse_oracle_mode(std::string_view name) {
  if (name == "perfect") return OracleMode::Perfect;
  if (name == "empty") return OracleMode::Empty;
  if (name == "corrupt") return OracleMode::Corrupt;
  if (name == "wrong-frame" || name == "wrong") return OracleMode::WrongFrame;
  if (name == "all-frames" || name == "all") return OracleMode::AllFrames;
  if (name == "gold-support") return OracleMode::GoldSupport;
  return std::nullopt;
}

const char* oracle_mode_name(OracleMode mode) {
  switch (mode) {
    case OracleMode::Perfect: return "perfect";
    case OracleMode::Empty: return "empty";
    case OracleMode::Corrupt: return "corrupt";
    case OracleMode::WrongFrame: return "wrong-frame";
    case OracleMode::AllFrames: return "all-frames";
    case OracleMode::GoldSupport: return "gold-support";
  }
  return "?";
}

std::string fenced(RepresentationFormat format, const std::string& body) {
  return std::string("```") + fence_label(format) + "\n" + body + "\n```";
}

OracleBackend::OracleBackend(OracleMode mode, std::shared_ptr<const Lexicon> lexicon,
                             const std::vector<FrameInstance>& gold)
    : mode_(mode), lexicon_(std::move(lexicon)) {
  if (!lexicon_) throw Error(ErrorKind::InvalidArgument, "oracle backend needs a lexicon");
  for (const auto& inst : gold) gold_.emplace(inst.instance_id, inst);
}

std::string OracleBackend::model_name() const { return std::string("oracle:") + oracle_mode_name(mode_); }

std::string OracleBackend::respond(const PromptRecord& prompt) const {
  const RepresentationFormat format = prompt.meta.format;
  const FrameDef* frame = lexicon_->find_frame(prompt.meta.frame_name);
  auto it = gold_.find(prompt.meta.instance_id);
  if (frame == nullptr || it == gold_.end()) return "";
  const FrameInstance& gold = it->second;
  const bool is_gold_frame = gold.frame_name == frame->name;

  auto nothing = [&] { return fenced(format, encode_fes(format, gold.sentence_text, {}, *frame)); };
  auto gold_answer = [&](bool drop_last) {
    FrameInstance copy = gold;
    std::erase_if(copy.fes, [](const FeAnnotation& fe) { return fe.undefined_fe; });
    if (drop_last && !copy.fes.empty()) copy.fes.pop_back();
    return fenced(format, encode(format, copy, *frame));
  };
  auto decoy = [&] {
    if (frame->fe_defs.empty() || gold.target.empty()) return nothing();
    std::vector<FeSpan> fes{{frame->fe_defs.front().name, gold.target.front()}};
    return fenced(format, encode_fes(format, gold.sentence_text, fes, *frame));
  };

  switch (mode_) {
    case OracleMode::Perfect: return is_gold_frame ? gold_answer(false) : nothing();
    case OracleMode::Empty: return nothing();
    case OracleMode::Corrupt: return is_gold_frame ? gold_answer(true) : nothing();
    case OracleMode::WrongFrame: return is_gold_frame ? nothing() : decoy();
    case OracleMode::AllFrames: return is_gold_frame ? gold_answer(false) : decoy();
    case OracleMode::GoldSupport:
      if (!is_gold_frame) return nothing();
      return gold.fes.empty() ? decoy() : gold_answer(false);
  }
  return "";
}

Completion OracleBackend::complete(const PromptRecord& prompt, const std::string& digest) {
  Completion out;
  out.text = respond(prompt);
  out.finish_reason = "stop";
  out.digest = digest;
  out.attempt_count = 1;
  return out;
}

Completion FunctionBackend::complete(const PromptRecord& prompt, const std::string& digest) {
  Completion out;
  out.text = fn_(prompt);
  out.finish_reason = "stop";
  out.digest = digest;
  out.attempt_count = 1;
  return out;
}

// --- client -----------------------------------------------------------------

LlmClient::LlmClient(std::shared_ptr<Backend> backend, std::shared_ptr<CacheStore> cache)
    : backend_(std::move(backend)), cache_(std::move(cache)) {
  if (!backend_) throw Error(ErrorKind::InvalidArgument, "client needs a backend");
}

std::string LlmClient::digest_for(const PromptRecord& prompt) const {
  return request_digest(backend_->model_name(), backend_->temperature(), to_messages(prompt));
}

Completion LlmClient::complete(const PromptRecord& prompt) {
  const std::string digest = digest_for(prompt);
  if (cache_) {
    if (auto hit = cache_->lookup(digest)) {
      Completion out;
      out.text = hit->response_text;
      out.finish_reason = hit->finish_reason;
      out.digest = digest;
      out.attempt_count = 0;
      out.from_cache = true;
      return out;
    }
  }
  Completion out = backend_->complete(prompt, digest);
  out.digest = digest;
  if (cache_) {
    CompletionRecord rec;
    rec.digest = digest;
    rec.model = backend_->model_name();
    rec.temperature = backend_->temperature();
    rec.prompt_meta = prompt.meta;
    rec.response_text = out.text;
    rec.finish_reason = out.finish_reason;
    rec.latency_ms = out.latency_ms;
    rec.attempt_count = out.attempt_count;
    cache_->append(rec);
  }
  return out;
}

std::vector<BatchItem> LlmClient::complete_batch(const std::vector<PromptRecord>& prompts,
                                                 std::size_t max_in_flight) {
  std::vector<BatchItem> results(prompts.size());
  if (prompts.empty()) return results;
  if (max_in_flight == 0) max_in_flight = 1;

  // With a cache, only the first occurrence of each digest goes out.
  std::vector<std::size_t> work;
  std::vector<std::pair<std::size_t, std::size_t>> repeats;  // (index, first index)
  if (cache_) {
    std::unordered_map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      auto [it, fresh] = first.emplace(digest_for(prompts[i]), i);
      if (fresh) work.push_back(i);
      else repeats.emplace_back(i, it->second);
    }
  } else {
    for (std::size_t i = 0; i < prompts.size(); ++i) work.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t w = next.fetch_add(1);
      if (w >= work.size()) return;
      const std::size_t i = work[w];
      try {
        results[i].completion = complete(prompts[i]);
      } catch (const Error& e) {
        results[i].error_kind = e.kind();
        results[i].error_message = e.what();
      } catch (const std::exception& e) {
        results[i].error_kind = ErrorKind::TransportError;
        results[i].error_message = e.what();
      }
    }
  };

  const std::size_t threads = std::min(max_in_flight, work.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& [i, src] : repeats) {
    if (results[src].ok()) {
      Completion c = *results[src].completion;
      c.attempt_count = 0;
      c.latency_ms = 0;
      c.from_cache = true;
      results[i].completion = std::move(c);
    } else {
      results[i].error_kind = results[src].error_kind;
      results[i].error_message = results[src].error_message;
    }
  }
  return results;
}

}  // namespace framekit
