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

// Prompt construction for inference and fine-tuning, fine-tune JSONL export,
// and training-set subsampling.

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "framekit/codecs.hpp"
#include "framekit/corpus.hpp"

namespace framekit {

struct PromptMeta {
  std::string instance_id;
  std::string sentence_id;
  std::string frame_name;
  RepresentationFormat format = RepresentationFormat::JsonExisting;
};

struct PromptRecord {
  std::string system;
  std::string user;
  std::optional<std::string> gold_assistant;  // set only for fine-tuning records
  PromptMeta meta;
};

struct ExemplarPolicy {
  std::size_t max_frame_exemplars = 3;
  std::size_t max_fe_examples = 1;
  bool include_exemplars = true;

  static ExemplarPolicy unlimited() {
    return {std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max(), true};
  }
};

// Text templates. Placeholders are written {name}; unknown placeholders are
// left as-is. Recognized names: frame_name, frame_definition, fe_block,
// exemplar_block, marked_sentence, format_instruction, fence_label, output.
struct PromptTemplates {
  std::string inference_system;
  std::string inference_user;
  std::string finetune_system;
  std::string finetune_user;
  std::string assistant;

  static PromptTemplates defaults();

  // Reads inference_system.txt, inference_user.txt, finetune_system.txt,
  // finetune_user.txt and assistant.txt from `dir`; absent files keep the
  // default text.
  static PromptTemplates load_dir(const std::string& dir);
  void save_dir(const std::string& dir) const;
};

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& values);

// Instruction fragment describing the output format, e.g. "JSON. Keys should
// only be one of the defined frame elements."
std::string format_instruction(RepresentationFormat format);

PromptRecord build_inference_prompt(const FrameDef& frame, const MarkedSentence& marked,
                                    RepresentationFormat format, const ExemplarPolicy& policy,
                                    const PromptTemplates& templates = PromptTemplates::defaults());

// Inference prompt for `instance` evaluated against `frame` (which may differ
// from the gold frame when scoring candidate frames).
PromptRecord build_inference_prompt_for(const FrameInstance& instance, const FrameDef& frame,
                                        RepresentationFormat format, const ExemplarPolicy& policy,
                                        const PromptTemplates& templates = PromptTemplates::defaults());

PromptRecord build_finetune_record(const FrameInstance& instance, const FrameDef& frame,
                                   RepresentationFormat format,
                                   const PromptTemplates& templates = PromptTemplates::defaults());

// Fine-tune record pairing the instance's sentence with a frame it does not
// evoke; the assistant output is the encoding of no frame elements.
PromptRecord build_negative_record(const FrameInstance& instance, const FrameDef& candidate,
                                   RepresentationFormat format,
                                   const PromptTemplates& templates = PromptTemplates::defaults());

// {"messages": [{"role": "system", ...}, {"role": "user", ...}, {"role": "assistant", ...}]}
std::string chat_jsonl_line(const PromptRecord& record);

struct FineTuneExportConfig {
  RepresentationFormat format = RepresentationFormat::JsonExisting;
  int lora_rank_note = 16;  // recorded in the manifest only
  std::string output_path;
  bool include_negatives = false;  // add records for non-gold candidate frames
};

struct ExportManifest {
  std::size_t record_count = 0;
  std::size_t negative_count = 0;
  std::size_t token_estimate = 0;  // approximate: characters / 4
  std::string sha256;
};

// Orders instances by (document_id, sentence_id, target start), with digit
// strings compared numerically.
std::vector<FrameInstance> export_order(std::vector<FrameInstance> instances);

// Writes one chat record per instance and returns the manifest; the manifest
// JSON is written next to the output as <output_path>.manifest.json.
// Instances whose frame is missing from the lexicon throw InvalidArgument.
ExportManifest export_finetune_jsonl(const std::vector<FrameInstance>& instances,
                                     const Lexicon& lexicon, const FineTuneExportConfig& config,
                                     const PromptTemplates& templates = PromptTemplates::defaults());

// --- subsampling ------------------------------------------------------------

enum class SubsampleKind { MostFe, Random, Diverse };

struct SubsampleStrategy {
  SubsampleKind kind = SubsampleKind::MostFe;
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

std::optional<SubsampleKind> parse_subsample_kind(std::string_view name);
const char* subsample_kind_name(SubsampleKind kind);

// Selects up to k instances per frame. The result keeps input order.
std::vector<FrameInstance> subsample(const std::vector<FrameInstance>& instances,
                                     const SubsampleStrategy& strategy);

// Index form of subsample(); indices into `instances`, ascending.
std::vector<std::size_t> subsample_indices(const std::vector<FrameInstance>& instances,
                                           const SubsampleStrategy& strategy);

// Nested prefixes of one seeded shuffle; subset i has ceil(fraction_i * N)
// items. Fractions must be ascending and in (0, 1].
std::vector<std::vector<FrameInstance>> saturation_subsets(const std::vector<FrameInstance>& instances,
                                                           const std::vector<double>& fractions,
                                                           std::uint64_t seed);

}  // namespace framekit
