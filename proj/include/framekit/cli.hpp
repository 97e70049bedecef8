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

// Command-line driver and the run-level operations behind it: corpus cache
// ingestion, argument-identification evaluation runs and frame-ID runs.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "framekit/corpus.hpp"
#include "framekit/evaluation.hpp"
#include "framekit/frame_id.hpp"
#include "framekit/llm_client.hpp"
#include "framekit/prompting.hpp"

namespace framekit {

struct RunConfig {
  std::string framenet_dir;
  std::string split_config;
  std::string corpus_cache;
  std::string eval_file;  // optional interchange JSONL evaluated instead of the test split
  RepresentationFormat format = RepresentationFormat::JsonExisting;
  std::string backend = "oracle:perfect";  // http | replay | oracle:<mode>
  std::string replay_path;
  ModelEndpoint endpoint;
  RetryPolicy retry;
  ExemplarPolicy exemplars;
  std::string templates_dir;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t max_in_flight = 8;
  std::string tie_break = "random";
  std::size_t limit = 0;  // 0: all instances

  static RunConfig from_json(std::string_view text);
  static RunConfig load(const std::string& path);
  std::string to_json() const;

  // Throws Error(InvalidConfig) naming the first bad field.
  void validate() const;
};

struct CorpusCache {
  std::shared_ptr<const Lexicon> lexicon;
  CorpusPart train;
  CorpusPart test;
  std::string checksum;  // SHA-256 over lexicon.json, train.jsonl and test.jsonl
};

struct IngestSummary {
  CorpusStats train;
  CorpusStats test;
  LoadReport report;
  std::vector<std::string> excluded_documents;
  std::vector<std::string> missing_documents;
  std::string checksum;
  double seconds = 0;
};

// Loads FrameNet, splits it and writes lexicon.json, train.jsonl, test.jsonl,
// split.json and stats.json into cache_dir.
IngestSummary ingest_corpus(const std::string& framenet_dir, const std::string& split_config,
                            const std::string& cache_dir);

CorpusCache load_corpus_cache(const std::string& cache_dir);

std::string ingest_summary_json(const IngestSummary& summary);

// Builds the backend named by config.backend. Oracle backends answer from
// `gold`.
std::shared_ptr<Backend> make_backend(const RunConfig& config, std::shared_ptr<const Lexicon> lexicon,
                                      const std::vector<FrameInstance>& gold);

struct EvalRun {
  EvalReport headline;
  std::map<std::string, EvalReport> splits;
  std::size_t failed_requests = 0;
  std::map<std::string, std::size_t> failures_by_kind;
  std::string report_json;
  std::string per_frame_csv;
};

// Prompts every evaluated instance with its gold frame, decodes, scores and
// writes run_config.json, completions.jsonl, predictions.jsonl, report.json
// and per_frame.csv into config.out_dir. Failed requests score as empty
// predictions and are counted in the report.
EvalRun run_eval(const RunConfig& config, std::shared_ptr<Backend> backend = nullptr);

struct FrameIdRun {
  FrameIdSummary without_filter;
  FrameIdSummary with_filter;
  std::vector<FrameIdResult> results_without_filter;
  std::vector<FrameIdResult> results_with_filter;
  std::vector<std::string> gold_frames;
  std::size_t skipped_no_candidates = 0;
  std::string summary_json;
};

// Candidate lookup, one extraction per candidate frame and tie-breaking,
// summarized with and without lexicon filtering. Writes run_config.json,
// completions.jsonl, results.jsonl, results_lf.jsonl and summary.json.
FrameIdRun run_frame_id(const RunConfig& config, std::shared_ptr<Backend> backend = nullptr);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace framekit
