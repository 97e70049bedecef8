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

// FrameNet 1.7 ingestion: frame definitions, the lexical-unit index and
// full-text annotations, plus the line-delimited interchange format used for
// out-of-domain test sets. Character offsets everywhere are code point
// indices into the UTF-8 sentence text, end-exclusive.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "framekit/common.hpp"

namespace framekit {

enum class Coreness { Core, CoreUnexpressed, Peripheral, ExtraThematic };

// Accepts the FrameNet attribute spellings ("Core", "Core-Unexpressed",
// "Peripheral", "Extra-Thematic"). Throws Error(UnknownCoreness).
Coreness parse_coreness(std::string_view value);
const char* coreness_label(Coreness c);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const Span&, const Span&) = default;
};

// Builds a span over `sentence`, filling in the covered text. Throws
// Error(OffsetOutOfBounds) unless 0 <= start < end <= length(sentence).
Span make_span(std::string_view sentence, std::size_t start, std::size_t end);

struct FeSpan {
  std::string name;
  Span span;

  friend bool operator==(const FeSpan&, const FeSpan&) = default;
};

// An annotated example sentence taken from a frame or FE definition.
struct Exemplar {
  std::string sentence;
  std::vector<Span> target;
  std::vector<FeSpan> fes;

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct FrameElementDef {
  std::string name;
  std::string abbrev;
  Coreness coreness = Coreness::Core;
  std::string definition;
  std::vector<Exemplar> examples;
};

struct LexicalUnit {
  std::string lemma;
  std::string pos;
  std::string frame_name;

  std::string rendered() const { return lemma + "." + pos; }
};

// Splits "lemma.pos" on the last dot. Lemma is lowercased.
std::optional<std::pair<std::string, std::string>> split_lu_name(std::string_view name);

struct FrameDef {
  std::string name;
  std::string definition;
  std::vector<FrameElementDef> fe_defs;
  std::vector<LexicalUnit> lexical_units;
  std::vector<Exemplar> exemplars;

  const FrameElementDef* find_fe(std::string_view fe_name) const;
  bool has_fe(std::string_view fe_name) const { return find_fe(fe_name) != nullptr; }
};

// All frame definitions plus the (lemma, pos) -> frames index. Frames keep
// insertion order, which is the sorted file order when loaded from disk.
class Lexicon {
 public:
  // Throws Error(InvalidArgument) on a duplicate frame name or duplicate FE
  // name within the frame.
  void add_frame(FrameDef frame);

  // Adds a lexical unit to its frame. Returns false if the frame is unknown
  // or the (lemma, pos, frame) triple is already present.
  bool add_lexical_unit(const LexicalUnit& lu);

  const FrameDef* find_frame(std::string_view name) const;
  const std::vector<FrameDef>& frames() const { return frames_; }

  // Frames owning an LU with this lemma and pos, in frame order.
  std::vector<std::string> frames_for(std::string_view lemma, std::string_view pos) const;

  std::size_t lexical_unit_count() const;

 private:
  std::vector<FrameDef> frames_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::map<std::string, std::vector<std::size_t>> by_lu_;
};

struct FeAnnotation {
  std::string name;
  Span span;
  bool undefined_fe = false;

  friend bool operator==(const FeAnnotation&, const FeAnnotation&) = default;
};

struct FrameInstance {
  std::string instance_id;
  std::string sentence_id;
  std::string document_id;
  std::string sentence_text;
  std::string frame_name;
  std::string lu_name;  // "lemma.pos" of the target, may be empty
  std::vector<Span> target;
  std::vector<FeAnnotation> fes;
  bool undefined_frame = false;

  friend bool operator==(const FrameInstance&, const FrameInstance&) = default;
};

enum class PartLabel { Train, Test, OutOfDomain };
const char* part_label_name(PartLabel label);

struct CorpusPart {
  PartLabel label = PartLabel::Train;
  std::vector<std::string> documents;
  std::vector<FrameInstance> instances;
  std::shared_ptr<const Lexicon> lexicon;
};

struct Document {
  std::string id;
  std::size_t sentence_count = 0;
  std::vector<FrameInstance> instances;
};

// Counters and messages for recoverable problems met while loading.
struct LoadReport {
  std::size_t dropped_unlabeled = 0;
  std::size_t dropped_unknown_frame = 0;
  std::size_t skipped_offsets = 0;
  std::size_t null_instantiations = 0;
  std::size_t dropped_overlapping_fes = 0;
  std::size_t unresolved_lexical_units = 0;
  std::size_t malformed_records = 0;
  std::vector<std::string> warnings;

  void warn(std::string message);
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t instances = 0;
  std::size_t frame_elements = 0;
  std::size_t distinct_frames = 0;
};

CorpusStats corpus_stats(const std::vector<FrameInstance>& instances);

// --- FrameNet 1.7 directory -------------------------------------------------

// Reads frame/*.xml and luIndex.xml. Throws MissingDirectory,
// MalformedXml or UnknownCoreness with file context.
Lexicon load_lexicon(const std::string& framenet_dir, LoadReport* report = nullptr);

// Reads fulltext/*.xml. Documents are returned sorted by id.
std::vector<Document> load_fulltext(const std::string& framenet_dir, const Lexicon& lexicon,
                                    LoadReport* report = nullptr);

// Parses one full-text file's contents; exposed for tests.
Document parse_fulltext_document(std::string_view xml, const std::string& doc_id,
                                 const Lexicon& lexicon, LoadReport& report);

// Parses one frame file's contents; exposed for tests.
FrameDef parse_frame_xml(std::string_view xml, const std::string& source_name);

// Splits definition markup ("<def-root>..</def-root>") into plain definition
// text and its annotated examples.
struct ParsedDefinition {
  std::string text;
  std::vector<Exemplar> examples;
};
ParsedDefinition parse_definition_markup(std::string_view markup);

// --- splits -----------------------------------------------------------------

// Document id lists. A list holding the single entry "*" means every
// document not named in the other list or in dev_docs.
struct SplitConfig {
  std::vector<std::string> train_docs;
  std::vector<std::string> test_docs;
  std::vector<std::string> dev_docs;
};

SplitConfig load_split_config(const std::string& path);
SplitConfig parse_split_config(std::string_view json_text);

struct SplitResult {
  CorpusPart train;
  CorpusPart test;
  std::vector<std::string> excluded_documents;
  std::vector<std::string> missing_documents;
};

// Throws Error(OverlappingSplit) if a document id is named in both lists.
SplitResult split_corpus(const std::vector<Document>& documents, const SplitConfig& config,
                         std::shared_ptr<const Lexicon> lexicon);

// --- interchange ------------------------------------------------------------

std::string to_interchange_line(const FrameInstance& instance);

// Loads a JSONL interchange file as an OutOfDomain part. FEs and frames
// unknown to `lexicon` are flagged, not rejected. Malformed lines are skipped
// and counted in `report`.
CorpusPart load_interchange(const std::string& path, std::shared_ptr<const Lexicon> lexicon,
                            LoadReport* report = nullptr);
CorpusPart parse_interchange(std::string_view text, std::shared_ptr<const Lexicon> lexicon,
                             LoadReport* report = nullptr);
void write_interchange(const std::string& path, const std::vector<FrameInstance>& instances);

// --- generalization partitions ---------------------------------------------

struct UnseenPartition {
  std::vector<FrameInstance> seen;
  std::vector<FrameInstance> unseen_frame;
  std::vector<FrameInstance> unseen_fe;
};

UnseenPartition unseen_partition(const CorpusPart& train, const CorpusPart& test);

// Label per test instance ("seen", "unseen_frame", "unseen_fe"), aligned
// with test.instances.
std::vector<std::string> unseen_labels(const CorpusPart& train, const CorpusPart& test);

// --- lexicon cache ----------------------------------------------------------

std::string lexicon_to_json(const Lexicon& lexicon);
Lexicon lexicon_from_json(std::string_view json_text);

}  // namespace framekit
