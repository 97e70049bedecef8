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

#include "framekit/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace framekit {

namespace {

constexpr const char* kTask =
    "### Task:\n"
    "You are given a sentence and a frame with its associated frame elements and sometimes "
    "examples. Your task is to label the frame elements in the sentence using "
    "{format_instruction} Do not make up your own frame elements, and do not remove or change "
    "the input in any way. Identify the frame elements based on the highlighted target word.\n";

constexpr const char* kNotes =
    "### Notes:\n"
    "- Return the tagged sentence in a ```{fence_label} ``` code block.\n"
    "- Texts must not overlap.\n";

constexpr const char* kInferenceUser =
    "### Frame Information:\n"
    "Frame Name: {frame_name}\n"
    "Frame Definition: {frame_definition}\n"
    "{exemplar_block}"
    "\n"
    "Frame Elements:\n"
    "{fe_block}"
    "\n";

constexpr const char* kFinetuneUser =
    "### Frame Information\n"
    "Frame Name: {frame_name}\n"
    "Frame Definition: {frame_definition}\n"
    "\n"
    "Frame Elements:\n"
    "{fe_block}"
    "\n"
    "### Input:\n"
    "{marked_sentence}";

constexpr const char* kAssistant = "### Output:\n```{fence_label}\n{output}\n```";

const char* const kTemplateFiles[] = {"inference_system.txt", "inference_user.txt",
                                      "finetune_system.txt", "finetune_user.txt",
                                      "assistant.txt"};

std::string* template_slot(PromptTemplates& t, std::size_t i) {
  switch (i) {
    case 0: return &t.inference_system;
    case 1: return &t.inference_user;
    case 2: return &t.finetune_system;
    case 3: return &t.finetune_user;
    default: return &t.assistant;
  }
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.inference_system = kTask;
  t.inference_user = std::string(kInferenceUser) + kNotes + "\n### Input:\n{marked_sentence}";
  t.finetune_system = std::string(kTask) + "\n" + kNotes;
  t.finetune_user = kFinetuneUser;
  t.assistant = kAssistant;
  return t;
}

PromptTemplates PromptTemplates::load_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::MissingDirectory, dir);
  PromptTemplates t = defaults();
  for (std::size_t i = 0; i < std::size(kTemplateFiles); ++i) {
    fs::path p = fs::path(dir) / kTemplateFiles[i];
    if (fs::is_regular_file(p)) *template_slot(t, i) = read_file(p.string());
  }
  return t;
}

void PromptTemplates::save_dir(const std::string& dir) const {
  fs::create_directories(dir);
  PromptTemplates copy = *this;
  for (std::size_t i = 0; i < std::size(kTemplateFiles); ++i) {
    write_file((fs::path(dir) / kTemplateFiles[i]).string(), *template_slot(copy, i));
  }
}

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size() * 2);
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      std::size_t close = tpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tpl[i++]);
  }
  return out;
}

std::string format_instruction(RepresentationFormat format) {
  switch (format) {
    case RepresentationFormat::JsonExisting:
      return "JSON. Keys should only be one of the defined frame elements.";
    case RepresentationFormat::JsonComplete:
      return "JSON. Keys should only be one of the defined frame elements. Include every defined "
             "frame element as a key, using an empty string for frame elements that are not "
             "present.";
    case RepresentationFormat::Markdown:
      return "a Markdown list with one \"- Frame_Element: text\" item per frame element. Names "
             "should only be one of the defined frame elements.";
    case RepresentationFormat::XmlTags:
      return "XML tags that wrap each frame element's text in the sentence, as in "
             "<Frame_Element>text</Frame_Element>. Tag names should only be one of the defined "
             "frame elements.";
  }
  return {};
}

namespace {

std::vector<FeSpan> only_fe(const std::vector<FeSpan>& fes, const std::string& name) {
  std::vector<FeSpan> out;
  for (const auto& fe : fes) {
    if (fe.name == name) out.push_back(fe);
  }
  return out;
}

std::string exemplar_line(const Exemplar& ex, const std::vector<FeSpan>& fes, const FrameDef& frame,
                          bool mark) {
  std::string sentence = ex.sentence;
  if (mark && !ex.target.empty()) {
    try {
      sentence = mark_target(ex.sentence, ex.target).marked;
    } catch (const Error&) {
      // Keep the unmarked sentence for malformed exemplar targets.
    }
  }
  return "  - " + sentence + " -> " +
         encode_fes(RepresentationFormat::JsonExisting, ex.sentence, fes, frame);
}

std::string exemplar_block(const FrameDef& frame, const ExemplarPolicy& policy) {
  if (!policy.include_exemplars || policy.max_frame_exemplars == 0 || frame.exemplars.empty()) {
    return {};
  }
  std::string out = "Examples:\n";
  std::size_t n = std::min(policy.max_frame_exemplars, frame.exemplars.size());
  for (std::size_t i = 0; i < n; ++i) {
    out += exemplar_line(frame.exemplars[i], frame.exemplars[i].fes, frame, false) + "\n";
  }
  return out;
}

std::string fe_block(const FrameDef& frame, const ExemplarPolicy& policy) {
  std::string out;
  for (std::size_t i = 0; i < frame.fe_defs.size(); ++i) {
    const auto& fe = frame.fe_defs[i];
    if (i) out += "\n";
    out += fe.name + " (" + coreness_label(fe.coreness) + "): " + fe.definition + "\n";
    if (!policy.include_exemplars) continue;
    std::size_t shown = 0;
    for (const auto& ex : fe.examples) {
      if (shown >= policy.max_fe_examples) break;
      auto fes = only_fe(ex.fes, fe.name);
      if (fes.empty()) continue;
      out += exemplar_line(ex, fes, frame, true) + "\n";
      ++shown;
    }
  }
  return out;
}

std::map<std::string, std::string> base_values(const FrameDef& frame, RepresentationFormat format) {
  return {
      {"frame_name", frame.name},
      {"frame_definition", frame.definition},
      {"format_instruction", format_instruction(format)},
      {"fence_label", fence_label(format)},
  };
}

PromptMeta meta_for(const FrameInstance* instance, const FrameDef& frame,
                    RepresentationFormat format) {
  PromptMeta meta;
  if (instance) {
    meta.instance_id = instance->instance_id;
    meta.sentence_id = instance->sentence_id;
  }
  meta.frame_name = frame.name;
  meta.format = format;
  return meta;
}

std::vector<FeSpan> fe_spans(const FrameInstance& instance) {
  std::vector<FeSpan> out;
  for (const auto& fe : instance.fes) out.push_back(FeSpan{fe.name, fe.span});
  return out;
}

PromptRecord finetune_with_output(const FrameInstance& instance, const FrameDef& frame,
                                  RepresentationFormat format, const PromptTemplates& templates,
                                  const std::vector<FeSpan>& fes) {
  MarkedSentence marked = mark_target(instance.sentence_text, instance.target);
  auto values = base_values(frame, format);
  ExemplarPolicy no_examples{0, 0, false};
  values["fe_block"] = fe_block(frame, no_examples);
  values["exemplar_block"] = "";
  values["marked_sentence"] = marked.marked;
  values["output"] = encode_fes(format, instance.sentence_text, fes, frame);
  PromptRecord rec;
  rec.system = render_template(templates.finetune_system, values);
  rec.user = render_template(templates.finetune_user, values);
  rec.gold_assistant = render_template(templates.assistant, values);
  rec.meta = meta_for(&instance, frame, format);
  return rec;
}

}  // namespace

PromptRecord build_inference_prompt(const FrameDef& frame, const MarkedSentence& marked,
                                    RepresentationFormat format, const ExemplarPolicy& policy,
                                    const PromptTemplates& templates) {
  auto values = base_values(frame, format);
  values["exemplar_block"] = exemplar_block(frame, policy);
  values["fe_block"] = fe_block(frame, policy);
  values["marked_sentence"] = marked.marked;
  PromptRecord rec;
  rec.system = render_template(templates.inference_system, values);
  rec.user = render_template(templates.inference_user, values);
  rec.meta = meta_for(nullptr, frame, format);
  return rec;
}

PromptRecord build_inference_prompt_for(const FrameInstance& instance, const FrameDef& frame,
                                        RepresentationFormat format, const ExemplarPolicy& policy,
                                        const PromptTemplates& templates) {
  PromptRecord rec = build_inference_prompt(
      frame, mark_target(instance.sentence_text, instance.target), format, policy, templates);
  rec.meta = meta_for(&instance, frame, format);
  return rec;
}

PromptRecord build_finetune_record(const FrameInstance& instance, const FrameDef& frame,
                                   RepresentationFormat format, const PromptTemplates& templates) {
  return finetune_with_output(instance, frame, format, templates, fe_spans(instance));
}

PromptRecord build_negative_record(const FrameInstance& instance, const FrameDef& candidate,
                                   RepresentationFormat format, const PromptTemplates& templates) {
  return finetune_with_output(instance, candidate, format, templates, {});
}

std::string chat_jsonl_line(const PromptRecord& record) {
  ordered_json messages = ordered_json::array();
  auto add = [&](const char* role, const std::string& content) {
    ordered_json m;
    m["role"] = role;
    m["content"] = content;
    messages.push_back(m);
  };
  add("system", record.system);
  add("user", record.user);
  if (record.gold_assistant) add("assistant", *record.gold_assistant);
  ordered_json root;
  root["messages"] = messages;
  return root.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool id_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b) && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::vector<FrameInstance> export_order(std::vector<FrameInstance> instances) {
  std::stable_sort(instances.begin(), instances.end(),
                   [](const FrameInstance& a, const FrameInstance& b) {
                     if (a.document_id != b.document_id) return id_less(a.document_id, b.document_id);
                     if (a.sentence_id != b.sentence_id) return id_less(a.sentence_id, b.sentence_id);
                     std::size_t sa = a.target.empty() ? 0 : a.target.front().start;
                     std::size_t sb = b.target.empty() ? 0 : b.target.front().start;
                     return sa < sb;
                   });
  return instances;
}

ExportManifest export_finetune_jsonl(const std::vector<FrameInstance>& instances,
                                     const Lexicon& lexicon, const FineTuneExportConfig& config,
                                     const PromptTemplates& templates) {
  if (config.output_path.empty()) throw Error(ErrorKind::InvalidConfig, "output_path is empty");
  ExportManifest manifest;
  std::string out;
  std::size_t chars = 0;
  auto emit = [&](const PromptRecord& rec) {
    out += chat_jsonl_line(rec);
    out += '\n';
    chars += utf8::length(rec.system) + utf8::length(rec.user) +
             (rec.gold_assistant ? utf8::length(*rec.gold_assistant) : 0);
    ++manifest.record_count;
  };
  for (const auto& inst : export_order(instances)) {
    const FrameDef* frame = lexicon.find_frame(inst.frame_name);
    if (!frame) {
      throw Error(ErrorKind::InvalidArgument,
                  "instance " + inst.instance_id + ": unknown frame " + inst.frame_name);
    }
    emit(build_finetune_record(inst, *frame, config.format, templates));
    if (!config.include_negatives) continue;
    auto lu = split_lu_name(inst.lu_name);
    if (!lu) continue;
    for (const auto& name : lexicon.frames_for(lu->first, lu->second)) {
      if (name == inst.frame_name) continue;
      emit(build_negative_record(inst, *lexicon.find_frame(name), config.format, templates));
      ++manifest.negative_count;
    }
  }
  manifest.token_estimate = (chars + 3) / 4;
  manifest.sha256 = sha256_hex(out);
  write_file(config.output_path, out);

  ordered_json m;
  m["record_count"] = manifest.record_count;
  m["negative_count"] = manifest.negative_count;
  m["token_estimate"] = manifest.token_estimate;
  m["token_estimate_method"] = "approximate: characters / 4";
  m["format"] = format_name(config.format);
  m["lora_rank_note"] = config.lora_rank_note;
  m["sha256"] = manifest.sha256;
  write_file(config.output_path + ".manifest.json", m.dump(2) + "\n");
  return manifest;
}

// --- subsampling ------------------------------------------------------------------

std::optional<SubsampleKind> parse_subsample_kind(std::string_view name) {
  if (name == "most-fe" || name == "mostfe" || name == "most_fe") return SubsampleKind::MostFe;
  if (name == "random") return SubsampleKind::Random;
  if (name == "diverse") return SubsampleKind::Diverse;
  return std::nullopt;
}

const char* subsample_kind_name(SubsampleKind kind) {
  switch (kind) {
    case SubsampleKind::MostFe: return "most-fe";
    case SubsampleKind::Random: return "random";
    case SubsampleKind::Diverse: return "diverse";
  }
  return "most-fe";
}

namespace {

// Instance indices grouped by frame, groups in order of first appearance.
std::vector<std::vector<std::size_t>> group_by_frame(const std::vector<FrameInstance>& instances) {
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto [it, inserted] = slot.emplace(instances[i].frame_name, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

std::vector<std::size_t> most_fe(const std::vector<FrameInstance>& instances,
                                 std::vector<std::size_t> group, std::size_t k) {
  std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
    return instances[a].fes.size() > instances[b].fes.size();
  });
  if (group.size() > k) group.resize(k);
  return group;
}

using NameSet = std::vector<int>;  // sorted FE-name ids

std::size_t coverage(const std::vector<NameSet>& names, const std::vector<std::size_t>& chosen) {
  std::set<int> all;
  for (std::size_t c : chosen) all.insert(names[c].begin(), names[c].end());
  return all.size();
}

std::size_t total_fes(const std::vector<FrameInstance>& instances, const std::vector<std::size_t>& group,
                      const std::vector<std::size_t>& chosen) {
  std::size_t n = 0;
  for (std::size_t c : chosen) n += instances[group[c]].fes.size();
  return n;
}

// Exhaustive search over k-subsets when small enough: maximal coverage, then
// maximal FE count, then lexicographically first positions.
std::optional<std::vector<std::size_t>> exact_diverse(const std::vector<FrameInstance>& instances,
                                                      const std::vector<std::size_t>& group,
                                                      const std::vector<NameSet>& names,
                                                      std::size_t k) {
  const std::size_t n = group.size();
  double combos = 1;
  for (std::size_t i = 0; i < k; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
  if (combos > 20000) return std::nullopt;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::vector<std::size_t> best;
  std::size_t best_cov = 0, best_fes = 0;
  while (true) {
    std::size_t cov = coverage(names, pick);
    std::size_t fes = total_fes(instances, group, pick);
    if (best.empty() || cov > best_cov || (cov == best_cov && fes > best_fes)) {
      best = pick;
      best_cov = cov;
      best_fes = fes;
    }
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

// Greedy max-coverage followed by single-swap improvement. Positions index
// into `group`.
std::vector<std::size_t> greedy_diverse(const std::vector<FrameInstance>& instances,
                                        const std::vector<std::size_t>& group,
                                        const std::vector<NameSet>& names, std::size_t k) {
  const std::size_t n = group.size();
  std::vector<bool> taken(n, false);
  std::set<int> covered;
  std::vector<std::size_t> chosen;
  while (chosen.size() < k) {
    std::size_t best = n, best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      std::size_t gain = 0;
      for (int id : names[i]) gain += covered.count(id) ? 0 : 1;
      if (best == n || gain > best_gain ||
          (gain == best_gain && instances[group[i]].fes.size() > instances[group[best]].fes.size())) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == n || best_gain == 0) break;
    taken[best] = true;
    chosen.push_back(best);
    covered.insert(names[best].begin(), names[best].end());
  }
  // Swap in an outside instance whenever that strictly raises coverage.
  bool improved = true;
  while (improved && !chosen.empty()) {
    improved = false;
    std::size_t current = coverage(names, chosen);
    for (std::size_t slot = 0; slot < chosen.size() && !improved; ++slot) {
      for (std::size_t cand = 0; cand < n && !improved; ++cand) {
        if (taken[cand]) continue;
        std::vector<std::size_t> trial = chosen;
        trial[slot] = cand;
        if (coverage(names, trial) > current) {
          taken[chosen[slot]] = false;
          taken[cand] = true;
          chosen = std::move(trial);
          improved = true;
        }
      }
    }
  }
  // Pad with the instances carrying the most FEs.
  if (chosen.size() < k) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) rest.push_back(i);
    }
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
      return instances[group[a]].fes.size() > instances[group[b]].fes.size();
    });
    for (std::size_t i = 0; i < rest.size() && chosen.size() < k; ++i) chosen.push_back(rest[i]);
  }
  return chosen;
}

std::vector<std::size_t> diverse(const std::vector<FrameInstance>& instances,
                                 const std::vector<std::size_t>& group, std::size_t k) {
  if (group.size() <= k) return group;
  std::unordered_map<std::string, int> ids;
  std::vector<NameSet> names(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const auto& fe : instances[group[i]].fes) {
      names[i].push_back(ids.emplace(fe.name, static_cast<int>(ids.size())).first->second);
    }
    std::sort(names[i].begin(), names[i].end());
    names[i].erase(std::unique(names[i].begin(), names[i].end()), names[i].end());
  }
  auto positions = exact_diverse(instances, group, names, k);
  if (!positions) positions = greedy_diverse(instances, group, names, k);
  std::vector<std::size_t> out;
  for (std::size_t p : *positions) out.push_back(group[p]);
  return out;
}

}  // namespace

std::vector<std::size_t> subsample_indices(const std::vector<FrameInstance>& instances,
                                           const SubsampleStrategy& strategy) {
  if (strategy.k == 0) throw Error(ErrorKind::InvalidArgument, "subsample k must be >= 1");
  Rng rng(strategy.seed);
  std::vector<std::size_t> picked;
  for (auto& group : group_by_frame(instances)) {
    std::vector<std::size_t> chosen;
    switch (strategy.kind) {
      case SubsampleKind::MostFe: chosen = most_fe(instances, group, strategy.k); break;
      case SubsampleKind::Diverse: chosen = diverse(instances, group, strategy.k); break;
      case SubsampleKind::Random: {
        // Partial Fisher-Yates: the first k slots become the sample.
        std::size_t take = std::min(strategy.k, group.size());
        for (std::size_t i = 0; i < take; ++i) {
          std::size_t j = i + static_cast<std::size_t>(rng.uniform(group.size() - i));
          std::swap(group[i], group[j]);
        }
        chosen.assign(group.begin(), group.begin() + static_cast<std::ptrdiff_t>(take));
        break;
      }
    }
    picked.insert(picked.end(), chosen.begin(), chosen.end());
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<FrameInstance> subsample(const std::vector<FrameInstance>& instances,
                                     const SubsampleStrategy& strategy) {
  std::vector<FrameInstance> out;
  for (std::size_t i : subsample_indices(instances, strategy)) out.push_back(instances[i]);
  return out;
}

std::vector<std::vector<FrameInstance>> saturation_subsets(const std::vector<FrameInstance>& instances,
                                                           const std::vector<double>& fractions,
                                                           std::uint64_t seed) {
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "fraction outside (0, 1]");
    }
    if (i > 0 && fractions[i] < fractions[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "fractions must be ascending");
    }
  }
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<FrameInstance>> out;
  for (double f : fractions) {
    auto n = static_cast<std::size_t>(std::ceil(f * static_cast<double>(instances.size()) - 1e-9));
    n = std::min(n, instances.size());
    std::vector<FrameInstance> subset;
    subset.reserve(n);
    for (std::size_t i = 0; i < n; ++i) subset.push_back(instances[order[i]]);
    out.push_back(std::move(subset));
  }
  return out;
}

}  // namespace framekit
