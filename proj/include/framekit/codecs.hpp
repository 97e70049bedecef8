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

// Frame element representation codecs. Each format turns gold annotations
// into the text a model is trained to produce, and turns arbitrary model
// output back into (FE name, text) predictions without ever throwing.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "framekit/corpus.hpp"

namespace framekit {

enum class RepresentationFormat { Markdown, XmlTags, JsonExisting, JsonComplete };

inline constexpr RepresentationFormat kAllFormats[] = {
    RepresentationFormat::Markdown, RepresentationFormat::XmlTags,
    RepresentationFormat::JsonExisting, RepresentationFormat::JsonComplete};

// CLI spellings: markdown, xml, json-exist, json-complete.
const char* format_name(RepresentationFormat format);
std::optional<RepresentationFormat> parse_format(std::string_view name);

// Language label used on the fenced block a model is asked to return.
const char* fence_label(RepresentationFormat format);

enum class WarningKind {
  NoCodeFence,
  UnterminatedFence,
  EmptyOutput,
  Unparseable,
  JsonRepaired,
  NonStringValue,
  UnknownFe,
  UnclosedTag,
  StrayClosingTag,
  SentenceMutated,
  IgnoredLine,
  NotInSentence,
  ExtractorFailed,
};

const char* warning_name(WarningKind kind);

struct DecodeWarning {
  WarningKind kind;
  std::string detail;
};

struct Prediction {
  std::string fe_name;
  std::string text;
  bool known = true;  // fe_name is defined by the frame

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct PredictionSet {
  std::vector<Prediction> entries;
  std::vector<DecodeWarning> warnings;

  bool has_warning(WarningKind kind) const;
};

struct MarkedSentence {
  std::string original;
  std::string marked;
  std::vector<Span> target;
};

// Wraps every target span in "**". Throws Error(OverlappingTarget) when
// spans overlap and Error(OffsetOutOfBounds) when a span is out of range.
MarkedSentence mark_target(std::string_view sentence, const std::vector<Span>& target);

// Removes every "**" marker.
std::string strip_target_marks(std::string_view marked);

struct EncodeOptions {
  // Repeated FE names become one key with a list value. When false, a
  // repeated name in a JSON format throws Error(DuplicateFeInJson).
  bool duplicates_as_list = true;
};

// Serializes FE annotations of `sentence`. Markdown and JSON-Existing list
// FEs in the given order; JSON-Complete lists every FE of `frame` in
// definition order ("" when absent) followed by any annotated FE the frame
// does not define. XML tags wrap FE spans in the sentence and throw
// Error(NestedSpans) when spans overlap.
std::string encode_fes(RepresentationFormat format, std::string_view sentence,
                       const std::vector<FeSpan>& fes, const FrameDef& frame,
                       const EncodeOptions& options = {});

std::string encode(RepresentationFormat format, const FrameInstance& instance,
                   const FrameDef& frame, const EncodeOptions& options = {});

// JSON object text with ": " and ", " separators, e.g. {"Donor": "Your"}.
std::string json_object_text(const std::vector<std::pair<std::string, std::vector<std::string>>>& items);

struct CodeBlock {
  std::string content;
  std::string label;
  std::vector<DecodeWarning> warnings;
};

// Content of the first fenced block labeled `preferred_label`, else the
// first fenced block. Without any fence the trimmed input is returned with a
// NoCodeFence warning; an unclosed fence yields UnterminatedFence.
CodeBlock extract_code_block(std::string_view raw, std::string_view preferred_label = "json");

// Best-effort parse of model output. Never throws.
PredictionSet decode(RepresentationFormat format, std::string_view raw, const FrameDef& frame,
                     std::string_view sentence);

enum class OccurrencePolicy { First, UniqueOnly };

// Locates `text` in `sentence` and returns its code point span.
std::optional<Span> align_to_span(std::string_view text, std::string_view sentence,
                                  OccurrencePolicy policy = OccurrencePolicy::First);

}  // namespace framekit
