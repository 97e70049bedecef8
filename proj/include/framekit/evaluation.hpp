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

// Exact-match scoring of predicted frame elements, micro-averaged reports,
// per-frame summaries and partial correlation against model size.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "framekit/codecs.hpp"
#include "framekit/corpus.hpp"

namespace framekit {

struct MatchingPolicy {
  bool case_fold = false;
};

struct InstanceScore {
  std::string instance_id;
  std::string sentence_id;
  std::string frame_name;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool exact = false;  // fp == 0 && fn == 0
  std::map<std::string, std::size_t> warnings;  // decode warning name -> count
};

// tp is the size of the multiset intersection of gold and predicted
// (fe_name, normalized text) pairs. Predictions of undefined FEs are always
// false positives.
InstanceScore score_instance(const FrameInstance& gold, const PredictionSet& pred,
                             const MatchingPolicy& policy = {});

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t n = 0;
  std::size_t exact = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  double accuracy() const;

  Counts& operator+=(const Counts& other);
};

struct EvalReport {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double accuracy = 0;
  std::size_t n_instances = 0;
  Counts totals;
  std::map<std::string, Counts> per_frame;
  std::map<std::string, std::size_t> warnings;
};

// Micro-averaged report. Throws Error(EmptyScoreList) on an empty list.
EvalReport aggregate(const std::vector<InstanceScore>& scores);

// One report per distinct label plus "All". labels[i] belongs to scores[i].
std::map<std::string, EvalReport> split_report(const std::vector<InstanceScore>& scores,
                                               const std::vector<std::string>& labels);

struct FrameRow {
  std::string frame;
  std::size_t n = 0;
  double f1 = 0;
};

// Per-frame rows sorted by F1, then frame name.
std::vector<FrameRow> per_frame_distribution(const EvalReport& report);

struct Quartiles {
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
};

// Linear-interpolation quartiles. Throws Error(EmptyScoreList) when empty.
Quartiles quartiles(std::vector<double> values);
Quartiles f1_quartiles(const std::vector<FrameRow>& rows);

// JSON object with headline metrics, counts, per-frame table and warnings.
std::string report_json_text(const EvalReport& report, int indent = 2);

// frame,n,tp,fp,fn,precision,recall,f1
std::string per_frame_csv(const EvalReport& report);

// --- partial correlation ----------------------------------------------------

struct CorrelationRow {
  std::string model;
  double size_b = 0;
  double f1 = 0;
  std::map<std::string, double> benchmarks;
};

struct CorrelationInput {
  std::vector<CorrelationRow> rows;
};

inline constexpr const char* kBenchmarkColumns[] = {"ifeval", "bbh", "gpqa", "musr", "mmlu_pro"};

// Parses CSV with header model,size_b,f1,ifeval,bbh,gpqa,musr,mmlu_pro.
// Extra columns become benchmarks too. Throws Error(MalformedRecord).
CorrelationInput parse_correlation_csv(std::string_view text);
CorrelationInput load_correlation_csv(const std::string& path);

// Pearson correlation of the residuals of x and y after least-squares
// regression (with intercept) on z. Throws Error(DegenerateVariance) when
// any residual or control variance vanishes and Error(InvalidArgument) for
// fewer than 4 rows or mismatched lengths.
double partial_correlation(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z);

// Partial correlation between `benchmark` and f1, controlling for size_b.
double partial_correlation(const CorrelationInput& input, const std::string& benchmark);

}  // namespace framekit
