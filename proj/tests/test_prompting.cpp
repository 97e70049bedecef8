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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "framekit/prompting.hpp"
#include "json.hpp"

using namespace framekit;

namespace {

FrameDef awareness_frame() {
  FrameDef f;
  f.name = "Awareness";
  f.definition = "A Cognizer has a piece of Content in their model of the world.";
  std::string ex = "Your boss is aware of your commitment.";
  Exemplar fe_ex{ex, {make_span(ex, 13, 18)}, {{"Cognizer", make_span(ex, 0, 9)}, {"Content", make_span(ex, 19, 37)}}};
  f.fe_defs = {
      {"Cognizer", "Cog", Coreness::Core,
       "The Cognizer is the person whose awareness of phenomena is at question.", {fe_ex}},
      {"Content", "Cont", Coreness::Core, "The Content is the object of the Cognizer's awareness.", {}},
      {"Explanation", "Exp", Coreness::ExtraThematic,
       "The reason why or how it came to be that the Cognizer has awareness of the Topic or Content.", {}}};
  f.exemplars = {fe_ex};
  return f;
}

FrameInstance awareness_instance() {
  FrameInstance inst;
  inst.instance_id = "aw1";
  inst.sentence_id = "9";
  inst.document_id = "d";
  inst.sentence_text = "Everyone knows the rules.";
  inst.frame_name = "Awareness";
  inst.target = {make_span(inst.sentence_text, 9, 14)};
  inst.fes = {{"Cognizer", make_span(inst.sentence_text, 0, 8), false},
              {"Content", make_span(inst.sentence_text, 15, 24), false}};
  return inst;
}

FrameDef law_frame() {
  FrameDef f;
  f.name = "Law";
  f.definition = "A Law regulates activities or states of affairs within a Jurisdiction.";
  f.fe_defs = {{"Law", "Law", Coreness::Core, "This FE identifies the rule designed to guide activities.", {}},
               {"Forbidden", "Forb", Coreness::Core, "What the law forbids.", {}},
               {"Jurisdiction", "Jur", Coreness::Core, "Where the law holds.", {}}};
  return f;
}

FrameInstance law_instance() {
  FrameInstance inst;
  inst.instance_id = "law1";
  inst.sentence_id = "12";
  inst.document_id = "NTI";
  inst.sentence_text =
      "Since the early 1990s , China has improved its export controls , including the promulgation of "
      "regulations on nuclear and nuclear dual - use exports and has pledged to halt exports of nuclear "
      "technology to un - safeguarded facilities.";
  inst.frame_name = "Law";
  std::size_t start = utf8::to_codepoint(inst.sentence_text, inst.sentence_text.find("regulations"));
  std::size_t fstart = utf8::to_codepoint(inst.sentence_text, inst.sentence_text.find("on nuclear"));
  inst.target = {make_span(inst.sentence_text, start, start + 11)};
  inst.fes = {{"Law", make_span(inst.sentence_text, start, start + 11), false},
              {"Forbidden", make_span(inst.sentence_text, fstart,
                                      fstart + utf8::length("on nuclear and nuclear dual - use exports")),
               false}};
  return inst;
}

FrameInstance with_fes(const std::string& frame, const std::string& id, const std::vector<std::string>& fes) {
  FrameInstance inst;
  inst.instance_id = id;
  inst.sentence_id = id;
  inst.frame_name = frame;
  std::string text;
  for (const auto& n : fes) text += n + " ";
  text += "end";
  inst.sentence_text = text;
  std::size_t pos = 0;
  for (const auto& n : fes) {
    inst.fes.push_back({n, make_span(text, pos, pos + n.size()), false});
    pos += n.size() + 1;
  }
  inst.target = {make_span(text, pos, pos + 3)};
  return inst;
}

std::map<std::string, std::set<std::string>> coverage(const std::vector<FrameInstance>& items) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& inst : items) {
    auto& s = out[inst.frame_name];
    for (const auto& fe : inst.fes) s.insert(fe.name);
  }
  return out;
}

}  // namespace

TEST(InferencePrompt, AwarenessListingShape) {
  FrameDef f = awareness_frame();
  FrameInstance inst = awareness_instance();
  PromptRecord p = build_inference_prompt_for(inst, f, RepresentationFormat::JsonExisting, ExemplarPolicy::unlimited());
  std::string all = p.system + p.user;
  EXPECT_NE(all.find("Cognizer (Core): The Cognizer is the person whose awareness"), std::string::npos);
  EXPECT_NE(all.find("Explanation (Extra-Thematic): The reason why"), std::string::npos);
  EXPECT_NE(all.find("  - Your boss is **aware** of your commitment. -> {\"Cognizer\": \"Your boss\"}"),
            std::string::npos);
  EXPECT_NE(all.find("Texts must not overlap."), std::string::npos);
  EXPECT_NE(all.find("```json ``` code block"), std::string::npos);
  EXPECT_NE(all.find("Frame Name: Awareness"), std::string::npos);
  EXPECT_FALSE(p.gold_assistant.has_value());
  EXPECT_EQ(p.meta.instance_id, "aw1");
  // Section order: task, frame information, frame elements, notes, then the marked sentence last.
  std::size_t task = all.find("### Task:"), info = all.find("### Frame Information"),
              fes = all.find("Frame Elements:"), notes = all.find("### Notes:");
  EXPECT_LT(task, info);
  EXPECT_LT(info, fes);
  EXPECT_LT(fes, notes);
  const std::string tail = "Everyone **knows** the rules.";
  EXPECT_EQ(p.user.substr(p.user.size() - tail.size()), tail);
}

TEST(InferencePrompt, ExemplarLimitsApply) {
  FrameDef f = awareness_frame();
  PromptRecord none = build_inference_prompt_for(awareness_instance(), f, RepresentationFormat::JsonExisting,
                                                 ExemplarPolicy{0, 0, false});
  EXPECT_EQ(none.user.find("Your boss"), std::string::npos);
  PromptRecord one = build_inference_prompt_for(awareness_instance(), f, RepresentationFormat::JsonExisting,
                                                ExemplarPolicy{1, 0, true});
  EXPECT_NE(one.user.find("Examples:"), std::string::npos);
  EXPECT_EQ(one.user.find("**aware**"), std::string::npos);
}

TEST(InferencePrompt, ContainsFrameFesAndSentenceForEveryFrame) {
  const auto& s = fixtures::synthetic();
  std::set<std::string> done;
  for (const auto& inst : s.cache.test.instances) {
    if (!done.insert(inst.frame_name).second) continue;
    const FrameDef* f = s.cache.lexicon->find_frame(inst.frame_name);
    for (auto fmt : kAllFormats) {
      PromptRecord p = build_inference_prompt_for(inst, *f, fmt, ExemplarPolicy{});
      std::string all = p.system + p.user;
      ASSERT_NE(all.find(f->name), std::string::npos);
      for (const auto& fe : f->fe_defs) ASSERT_NE(all.find(fe.name), std::string::npos) << fe.name;
      ASSERT_NE(all.find(mark_target(inst.sentence_text, inst.target).marked), std::string::npos);
    }
  }
}

TEST(FinetuneRecord, LawListing) {
  PromptRecord r = build_finetune_record(law_instance(), law_frame(), RepresentationFormat::JsonExisting);
  ASSERT_TRUE(r.gold_assistant.has_value());
  EXPECT_NE(r.gold_assistant->find(R"({"Law": "regulations", "Forbidden": "on nuclear and nuclear dual - use exports"})"),
            std::string::npos);
  EXPECT_EQ(r.gold_assistant->rfind("### Output:", 0), 0u);
  EXPECT_NE(r.gold_assistant->find("```json"), std::string::npos);
  EXPECT_NE(r.system.find("### Task:"), std::string::npos);
  EXPECT_NE(r.system.find("### Notes:"), std::string::npos);
  EXPECT_NE(r.user.find("### Input:\n"), std::string::npos);
  EXPECT_NE(r.user.find("promulgation of **regulations** on nuclear"), std::string::npos);
  EXPECT_EQ(r.user.find("### Task:"), std::string::npos);
}

TEST(FinetuneRecord, ZeroFesGiveEmptyObject) {
  FrameInstance inst = law_instance();
  inst.fes.clear();
  PromptRecord r = build_finetune_record(inst, law_frame(), RepresentationFormat::JsonExisting);
  EXPECT_NE(r.gold_assistant->find("```json\n{}\n```"), std::string::npos);
  PromptRecord neg = build_negative_record(law_instance(), awareness_frame(), RepresentationFormat::JsonExisting);
  EXPECT_NE(neg.gold_assistant->find("```json\n{}\n```"), std::string::npos);
  EXPECT_NE(neg.user.find("Frame Name: Awareness"), std::string::npos);
}

TEST(FinetuneRecord, JsonCompleteListsAllFes) {
  PromptRecord r = build_finetune_record(law_instance(), law_frame(), RepresentationFormat::JsonComplete);
  EXPECT_NE(r.gold_assistant->find("\"Jurisdiction\": \"\""), std::string::npos);
}

TEST(ChatJsonl, ThreeMessagesInOrder) {
  PromptRecord r = build_finetune_record(law_instance(), law_frame(), RepresentationFormat::JsonExisting);
  auto j = nlohmann::json::parse(chat_jsonl_line(r));
  ASSERT_EQ(j["messages"].size(), 3u);
  EXPECT_EQ(j["messages"][0]["role"], "system");
  EXPECT_EQ(j["messages"][1]["role"], "user");
  EXPECT_EQ(j["messages"][2]["role"], "assistant");
  EXPECT_EQ(j["messages"][2]["content"], *r.gold_assistant);
}

TEST(Export, DeterministicAndCounted) {
  const auto& s = fixtures::synthetic();
  std::string dir = fixtures::scratch_dir("export");
  FineTuneExportConfig cfg;
  cfg.output_path = dir + "/a.jsonl";
  ExportManifest m1 = export_finetune_jsonl(s.cache.train.instances, *s.cache.lexicon, cfg);
  EXPECT_EQ(m1.record_count, s.cache.train.instances.size());
  cfg.output_path = dir + "/b.jsonl";
  ExportManifest m2 = export_finetune_jsonl(s.cache.train.instances, *s.cache.lexicon, cfg);
  EXPECT_EQ(m1.sha256, m2.sha256);
  EXPECT_EQ(read_file(dir + "/a.jsonl"), read_file(dir + "/b.jsonl"));
  std::string text = read_file(dir + "/a.jsonl");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), m1.record_count);
  EXPECT_TRUE(std::filesystem::exists(dir + "/a.jsonl.manifest.json"));
}

TEST(Export, EmptyListGivesEmptyFile) {
  std::string dir = fixtures::scratch_dir("export_empty");
  FineTuneExportConfig cfg;
  cfg.output_path = dir + "/e.jsonl";
  ExportManifest m = export_finetune_jsonl({}, Lexicon{}, cfg);
  EXPECT_EQ(m.record_count, 0u);
  EXPECT_EQ(read_file(cfg.output_path), "");
}

TEST(Export, NegativesForAmbiguousTargets) {
  const auto& s = fixtures::synthetic();
  std::vector<FrameInstance> some;
  for (const auto& inst : s.cache.train.instances)
    if (inst.lu_name == "begin.v" && some.size() < 5) some.push_back(inst);
  ASSERT_FALSE(some.empty());
  std::string dir = fixtures::scratch_dir("export_neg");
  FineTuneExportConfig cfg;
  cfg.output_path = dir + "/n.jsonl";
  cfg.include_negatives = true;
  ExportManifest m = export_finetune_jsonl(some, *s.cache.lexicon, cfg);
  EXPECT_GE(m.negative_count, some.size());
  EXPECT_EQ(m.record_count, some.size() + m.negative_count);
}

TEST(Export, OrderIsNumericWithinDocument) {
  auto a = with_fes("F", "10", {"A"});
  auto b = with_fes("F", "9", {"A"});
  auto out = export_order({a, b});
  EXPECT_EQ(out[0].sentence_id, "9");
}

TEST(Subsample, SmallFramesFullyKept) {
  std::vector<FrameInstance> items = {with_fes("F", "1", {"A"}), with_fes("F", "2", {"B"}), with_fes("F", "3", {})};
  for (auto kind : {SubsampleKind::MostFe, SubsampleKind::Random, SubsampleKind::Diverse})
    EXPECT_EQ(subsample(items, {kind, 5, 1}).size(), 3u);
}

TEST(Subsample, DiverseGreedyTrace) {
  std::vector<FrameInstance> items = {with_fes("F", "1", {"A", "B"}), with_fes("F", "2", {"A"}),
                                      with_fes("F", "3", {"C"})};
  auto idx = subsample_indices(items, {SubsampleKind::Diverse, 2, 0});
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 2}));
}

TEST(Subsample, MostFeKeepsLargestAndStableOrder) {
  std::vector<FrameInstance> items = {with_fes("F", "1", {"A"}), with_fes("F", "2", {"A", "B", "C"}),
                                      with_fes("F", "3", {"A", "B"}), with_fes("F", "4", {"B", "C"}),
                                      with_fes("G", "5", {"X"})};
  auto idx = subsample_indices(items, {SubsampleKind::MostFe, 2, 0});
  EXPECT_EQ(idx, (std::vector<std::size_t>{1, 2, 4}));
}

TEST(Subsample, PropertiesOnSyntheticTrain) {
  const auto& train = fixtures::synthetic().cache.train.instances;
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    for (std::size_t k : {1u, 2u, 5u}) {
      auto most = subsample_indices(train, {SubsampleKind::MostFe, k, seed});
      auto rnd = subsample(train, {SubsampleKind::Random, k, seed});
      auto div = subsample(train, {SubsampleKind::Diverse, k, seed});
      EXPECT_EQ(rnd, subsample(train, {SubsampleKind::Random, k, seed}));
      EXPECT_EQ(div, subsample(train, {SubsampleKind::Diverse, k, seed}));
      // Per frame: at most k, and Diverse covers at least as many FE names as Random.
      std::map<std::string, std::size_t> per_frame;
      for (const auto& inst : div) ++per_frame[inst.frame_name];
      for (const auto& [f, n] : per_frame) ASSERT_LE(n, k);
      auto cd = coverage(div), cr = coverage(rnd);
      for (const auto& [f, names] : cr) ASSERT_GE(cd[f].size(), names.size()) << f;
      // MostFE: selected FE counts dominate unselected ones within each frame.
      std::map<std::string, std::size_t> min_selected, max_rest;
      std::set<std::size_t> chosen(most.begin(), most.end());
      for (std::size_t i = 0; i < train.size(); ++i) {
        const auto& inst = train[i];
        std::size_t c = inst.fes.size();
        if (chosen.count(i)) {
          auto it = min_selected.find(inst.frame_name);
          if (it == min_selected.end() || c < it->second) min_selected[inst.frame_name] = c;
        } else {
          max_rest[inst.frame_name] = std::max(max_rest[inst.frame_name], c);
        }
      }
      for (const auto& [f, c] : max_rest) ASSERT_GE(min_selected.at(f), c) << f;
    }
  }
}

TEST(Subsample, KindNames) {
  for (auto kind : {SubsampleKind::MostFe, SubsampleKind::Random, SubsampleKind::Diverse})
    EXPECT_EQ(parse_subsample_kind(subsample_kind_name(kind)), kind);
  EXPECT_FALSE(parse_subsample_kind("best"));
}

TEST(Saturation, NestedPrefixesOfCeilSize) {
  const auto& train = fixtures::synthetic().cache.train.instances;
  std::vector<double> fr = {0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.00};
  auto subsets = saturation_subsets(train, fr, 0);
  ASSERT_EQ(subsets.size(), 7u);
  for (std::size_t i = 0; i < fr.size(); ++i) {
    std::size_t want = static_cast<std::size_t>(std::ceil(fr[i] * static_cast<double>(train.size()) - 1e-9));
    EXPECT_EQ(subsets[i].size(), want);
    if (i) {
      ASSERT_LT(subsets[i - 1].size(), subsets[i].size());
      ASSERT_TRUE(std::equal(subsets[i - 1].begin(), subsets[i - 1].end(), subsets[i].begin()));
    }
  }
  EXPECT_EQ(subsets, saturation_subsets(train, fr, 0));
  EXPECT_NE(subsets[0], saturation_subsets(train, fr, 1)[0]);
}

TEST(Saturation, RejectsBadFractions) {
  std::vector<FrameInstance> items = {with_fes("F", "1", {"A"})};
  EXPECT_THROW(saturation_subsets(items, {0.5, 0.25}, 0), Error);
  EXPECT_THROW(saturation_subsets(items, {0.0}, 0), Error);
  EXPECT_THROW(saturation_subsets(items, {1.5}, 0), Error);
}

TEST(Templates, LoadDirOverridesAndKeepsDefaults) {
  std::string dir = fixtures::scratch_dir("tpl");
  write_file(dir + "/inference_system.txt", "SYSTEM {frame_name}");
  PromptTemplates t = PromptTemplates::load_dir(dir);
  EXPECT_EQ(t.inference_system, "SYSTEM {frame_name}");
  EXPECT_EQ(t.inference_user, PromptTemplates::defaults().inference_user);
  PromptRecord p = build_inference_prompt_for(awareness_instance(), awareness_frame(),
                                              RepresentationFormat::JsonExisting, ExemplarPolicy{}, t);
  EXPECT_EQ(p.system, "SYSTEM Awareness");
  EXPECT_EQ(render_template("{a} {b} {unknown}", {{"a", "1"}, {"b", "2"}}), "1 2 {unknown}");
}
