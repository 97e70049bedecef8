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

#include "framekit/frame_id.hpp"

#include <algorithm>

#include "json.hpp"

namespace framekit {

using nlohmann::ordered_json;

CandidateSet candidates_for_target(const Lexicon& lexicon, std::string_view lemma, std::string_view pos,
                                   const std::vector<Span>& target) {
  CandidateSet cs;
  cs.target = target;
  cs.lemma = std::string(lemma);
  cs.pos = std::string(pos);
  for (auto& name : lexicon.frames_for(lemma, pos)) {
    if (std::find(cs.candidates.begin(), cs.candidates.end(), name) == cs.candidates.end())
      cs.candidates.push_back(std::move(name));
  }
  cs.ambiguous = cs.candidates.size() > 1;
  return cs;
}

CandidateSet candidates_for_instance(const Lexicon& lexicon, const FrameInstance& instance) {
  auto parts = split_lu_name(instance.lu_name);
  if (!parts) {
    CandidateSet cs;
    cs.target = instance.target;
    return cs;
  }
  return candidates_for_target(lexicon, parts->first, parts->second, instance.target);
}

std::optional<TieBreak> parse_tie_break(std::string_view name) {
  if (name == "random") return TieBreak::Random;
  if (name == "most-fes") return TieBreak::MostFes;
  if (name == "first") return TieBreak::First;
  if (name == "arbiter") return TieBreak::Arbiter;
  return std::nullopt;
}

const char* tie_break_name(TieBreak t) {
  switch (t) {
    case TieBreak::Random: return "random";
    case TieBreak::MostFes: return "most-fes";
    case TieBreak::First: return "first";
    case TieBreak::Arbiter: return "arbiter";
  }
  return "?";
}

const char* decided_by_name(DecidedBy d) {
  switch (d) {
    case DecidedBy::OnlySupported: return "OnlySupported";
    case DecidedBy::RandomTieBreak: return "RandomTieBreak";
    case DecidedBy::StrategyTieBreak: return "StrategyTieBreak";
    case DecidedBy::LexiconFilter: return "LexiconFilter";
    case DecidedBy::NoSupport: return "NoSupport";
  }
  return "?";
}

std::optional<std::string> lexicon_filter(const CandidateSet& candidates) {
  if (candidates.candidates.size() == 1) return candidates.candidates.front();
  return std::nullopt;
}

FrameIdResult identify_frame(const CandidateSet& cs, const FeExtractor& extractor, std::uint64_t rng_seed,
                             const FrameIdOptions& options, std::string target_ref) {
  FrameIdResult result;
  result.target_ref = std::move(target_ref);
  result.candidates = cs.candidates;
  result.ambiguous = cs.ambiguous;

  if (options.lexicon_filter) {
    if (auto sole = lexicon_filter(cs)) {
      result.predicted_frame = *sole;
      result.decided_by = DecidedBy::LexiconFilter;
      return result;
    }
  }

  for (const auto& frame : cs.candidates) {
    PredictionSet pred;
    try {
      pred = extractor(frame);
    } catch (const std::exception& e) {
      result.warnings.push_back(std::string(warning_name(WarningKind::ExtractorFailed)) + ": " + frame +
                                ": " + e.what());
      continue;
    }
    if (!pred.entries.empty()) result.supporting.emplace_back(frame, std::move(pred));
  }

  const auto& sup = result.supporting;
  if (sup.empty()) {
    result.decided_by = DecidedBy::NoSupport;
    return result;
  }
  if (sup.size() == 1) {
    result.predicted_frame = sup.front().first;
    result.decided_by = DecidedBy::OnlySupported;
    return result;
  }

  switch (options.tie_break) {
    case TieBreak::Random: {
      Rng rng(rng_seed);
      result.predicted_frame = sup[rng.uniform(sup.size())].first;
      result.decided_by = DecidedBy::RandomTieBreak;
      return result;
    }
    case TieBreak::MostFes: {
      auto best = std::max_element(sup.begin(), sup.end(), [](const auto& a, const auto& b) {
        return a.second.entries.size() < b.second.entries.size();
      });
      result.predicted_frame = best->first;
      break;
    }
    case TieBreak::First:
      result.predicted_frame = sup.front().first;
      break;
    case TieBreak::Arbiter: {
      if (!options.arbiter) throw Error(ErrorKind::InvalidConfig, "arbiter tie-break needs an arbiter");
      std::vector<std::string> names;
      for (const auto& [name, _] : sup) names.push_back(name);
      std::string pick = options.arbiter(names);
      if (std::find(names.begin(), names.end(), pick) == names.end()) {
        result.warnings.push_back("arbiter picked an unsupported frame: " + pick);
        pick = names.front();
      }
      result.predicted_frame = pick;
      break;
    }
  }
  result.decided_by = DecidedBy::StrategyTieBreak;
  return result;
}

FrameIdSummary evaluate_frame_id(const std::vector<FrameIdResult>& results,
                                 const std::vector<std::string>& gold_frames) {
  if (results.size() != gold_frames.size())
    throw Error(ErrorKind::InvalidArgument, "every result needs a gold frame");
  FrameIdSummary s;
  std::size_t correct = 0, correct_amb = 0, covered = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FrameIdResult& r = results[i];
    const bool ok = r.predicted_frame && *r.predicted_frame == gold_frames[i];
    ++s.n;
    if (r.candidates.empty()) {
      ++s.n_no_candidates;
    } else {
      ++covered;
      if (r.decided_by == DecidedBy::NoSupport) ++s.n_no_support;
    }
    if (ok) ++correct;
    if (r.ambiguous) {
      ++s.n_ambiguous;
      if (ok) ++correct_amb;
    }
  }
  auto frac = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; };
  s.acc_all = frac(correct, s.n);
  s.acc_ambiguous = frac(correct_amb, s.n_ambiguous);
  s.coverage = frac(covered, s.n);
  return s;
}

std::string frame_id_result_json(const FrameIdResult& r, const std::string& gold_frame) {
  ordered_json j;
  j["target_ref"] = r.target_ref;
  j["gold_frame"] = gold_frame;
  j["predicted_frame"] = r.predicted_frame ? ordered_json(*r.predicted_frame) : ordered_json(nullptr);
  j["decided_by"] = decided_by_name(r.decided_by);
  j["ambiguous"] = r.ambiguous;
  j["candidates"] = r.candidates;
  ordered_json sup = ordered_json::array();
  for (const auto& [frame, pred] : r.supporting) {
    ordered_json fes = ordered_json::array();
    for (const auto& e : pred.entries) fes.push_back({{"fe", e.fe_name}, {"text", e.text}});
    sup.push_back({{"frame", frame}, {"fes", std::move(fes)}});
  }
  j["supporting"] = std::move(sup);
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j.dump();
}

std::string frame_id_summary_json(const FrameIdSummary& s) {
  ordered_json j;
  j["acc_all"] = s.acc_all;
  j["acc_ambiguous"] = s.acc_ambiguous;
  j["coverage"] = s.coverage;
  j["n"] = s.n;
  j["n_ambiguous"] = s.n_ambiguous;
  j["n_no_candidates"] = s.n_no_candidates;
  j["n_no_support"] = s.n_no_support;
  return j.dump();
}

}  // namespace framekit
