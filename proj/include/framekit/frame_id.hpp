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

// Frame identification from frame-element predictions: run the extractor for
// every candidate frame of a target and keep the frames that produce FEs.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "framekit/codecs.hpp"
#include "framekit/corpus.hpp"

namespace framekit {

struct CandidateSet {
  std::vector<Span> target;
  std::string lemma;
  std::string pos;
  std::vector<std::string> candidates;  // lexicon order, no duplicates
  bool ambiguous = false;               // candidates.size() > 1
};

// Frames owning a lexical unit (lemma, pos). An unknown pair gives an empty
// candidate list.
CandidateSet candidates_for_target(const Lexicon& lexicon, std::string_view lemma, std::string_view pos,
                                   const std::vector<Span>& target = {});

// Candidate set for the target of a corpus instance, using its lu_name.
CandidateSet candidates_for_instance(const Lexicon& lexicon, const FrameInstance& instance);

enum class TieBreak { Random, MostFes, First, Arbiter };

std::optional<TieBreak> parse_tie_break(std::string_view name);
const char* tie_break_name(TieBreak tie_break);

enum class DecidedBy { OnlySupported, RandomTieBreak, StrategyTieBreak, LexiconFilter, NoSupport };

const char* decided_by_name(DecidedBy decided_by);

// Predictions for the target under a candidate frame. May throw; a throwing
// extractor counts as an empty prediction with a warning.
using FeExtractor = std::function<PredictionSet(const std::string& frame_name)>;

// Picks one of the supported frames; used with TieBreak::Arbiter.
using FrameArbiter = std::function<std::string(const std::vector<std::string>& supported)>;

struct FrameIdOptions {
  TieBreak tie_break = TieBreak::Random;
  FrameArbiter arbiter;
  bool lexicon_filter = false;
};

struct FrameIdResult {
  std::string target_ref;
  std::vector<std::string> candidates;
  bool ambiguous = false;
  std::optional<std::string> predicted_frame;
  std::vector<std::pair<std::string, PredictionSet>> supporting;
  DecidedBy decided_by = DecidedBy::NoSupport;
  std::vector<std::string> warnings;
};

// Sole candidate of an unambiguous set; nullopt otherwise.
std::optional<std::string> lexicon_filter(const CandidateSet& candidates);

// Calls the extractor once per candidate (in candidate order) and decides.
// Ties among several supported frames are broken with an Rng seeded from
// rng_seed unless options pick another strategy. With lexicon_filter set,
// unambiguous targets are assigned directly without calling the extractor.
FrameIdResult identify_frame(const CandidateSet& candidates, const FeExtractor& extractor,
                             std::uint64_t rng_seed, const FrameIdOptions& options = {},
                             std::string target_ref = {});

struct FrameIdSummary {
  double acc_all = 0;
  double acc_ambiguous = 0;
  double coverage = 0;
  std::size_t n = 0;
  std::size_t n_ambiguous = 0;
  std::size_t n_no_candidates = 0;
  std::size_t n_no_support = 0;
};

// NoSupport and empty candidate sets count as wrong. gold_frames[i] is the
// gold frame for results[i].
FrameIdSummary evaluate_frame_id(const std::vector<FrameIdResult>& results,
                                 const std::vector<std::string>& gold_frames);

std::string frame_id_result_json(const FrameIdResult& result, const std::string& gold_frame);
std::string frame_id_summary_json(const FrameIdSummary& summary);

}  // namespace framekit
