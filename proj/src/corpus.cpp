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

#include "framekit/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "xml_dom.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace framekit {

Coreness parse_coreness(std::string_view value) {
  if (value == "Core") return Coreness::Core;
  if (value == "Core-Unexpressed") return Coreness::CoreUnexpressed;
  if (value == "Peripheral") return Coreness::Peripheral;
  if (value == "Extra-Thematic") return Coreness::ExtraThematic;
  throw Error(ErrorKind::UnknownCoreness, "'" + std::string(value) + "'");
}

const char* coreness_label(Coreness c) {
  switch (c) {
    case Coreness::Core: return "Core";
    case Coreness::CoreUnexpressed: return "Core-Unexpressed";
    case Coreness::Peripheral: return "Peripheral";
    case Coreness::ExtraThematic: return "Extra-Thematic";
  }
  return "Core";
}

const char* part_label_name(PartLabel label) {
  switch (label) {
    case PartLabel::Train: return "train";
    case PartLabel::Test: return "test";
    case PartLabel::OutOfDomain: return "ood";
  }
  return "train";
}

Span make_span(std::string_view sentence, std::size_t start, std::size_t end) {
  auto b = utf8::boundaries(sentence);
  std::size_t n = b.size() - 1;
  if (start >= end || end > n) {
    throw Error(ErrorKind::OffsetOutOfBounds, "span [" + std::to_string(start) + "," +
                                                  std::to_string(end) + ") in sentence of length " +
                                                  std::to_string(n));
  }
  return Span{start, end, std::string(sentence.substr(b[start], b[end] - b[start]))};
}

std::optional<std::pair<std::string, std::string>> split_lu_name(std::string_view name) {
  auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size()) return std::nullopt;
  std::string lemma(name.substr(0, dot));
  std::transform(lemma.begin(), lemma.end(), lemma.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::make_pair(lemma, std::string(name.substr(dot + 1)));
}

void LoadReport::warn(std::string message) {
  // Keep the log bounded on pathological inputs; counters stay exact.
  if (warnings.size() < 1000) warnings.push_back(std::move(message));
}

// --- Lexicon ----------------------------------------------------------------

const FrameElementDef* FrameDef::find_fe(std::string_view fe_name) const {
  for (const auto& fe : fe_defs) {
    if (fe.name == fe_name) return &fe;
  }
  return nullptr;
}

void Lexicon::add_frame(FrameDef frame) {
  if (frame.name.empty()) throw Error(ErrorKind::InvalidArgument, "frame with empty name");
  if (by_name_.count(frame.name)) {
    throw Error(ErrorKind::InvalidArgument, "duplicate frame " + frame.name);
  }
  std::unordered_set<std::string> seen;
  for (const auto& fe : frame.fe_defs) {
    if (fe.name.empty() || !seen.insert(fe.name).second) {
      throw Error(ErrorKind::InvalidArgument,
                  "frame " + frame.name + ": empty or duplicate FE name '" + fe.name + "'");
    }
  }
  std::vector<LexicalUnit> lus = std::move(frame.lexical_units);
  frame.lexical_units.clear();
  std::size_t idx = frames_.size();
  by_name_.emplace(frame.name, idx);
  frames_.push_back(std::move(frame));
  for (auto& lu : lus) {
    lu.frame_name = frames_[idx].name;
    add_lexical_unit(lu);
  }
}

bool Lexicon::add_lexical_unit(const LexicalUnit& lu) {
  auto it = by_name_.find(lu.frame_name);
  if (it == by_name_.end()) return false;
  FrameDef& frame = frames_[it->second];
  for (const auto& existing : frame.lexical_units) {
    if (existing.lemma == lu.lemma && existing.pos == lu.pos) return false;
  }
  frame.lexical_units.push_back(lu);
  auto& owners = by_lu_[lu.rendered()];
  owners.insert(std::upper_bound(owners.begin(), owners.end(), it->second), it->second);
  return true;
}

const FrameDef* Lexicon::find_frame(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &frames_[it->second];
}

std::vector<std::string> Lexicon::frames_for(std::string_view lemma, std::string_view pos) const {
  std::vector<std::string> out;
  auto it = by_lu_.find(std::string(lemma) + "." + std::string(pos));
  if (it == by_lu_.end()) return out;
  for (std::size_t idx : it->second) out.push_back(frames_[idx].name);
  return out;
}

std::size_t Lexicon::lexical_unit_count() const {
  std::size_t n = 0;
  for (const auto& f : frames_) n += f.lexical_units.size();
  return n;
}

// --- definition markup --------------------------------------------------------

namespace {

struct MarkedText {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> target_bytes;
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> fe_bytes;
};

void collect_example(const xml::Node& node, MarkedText& out) {
  for (const auto& child : node.children) {
    if (child.is_text()) {
      out.text += child.text;
      continue;
    }
    std::size_t begin = out.text.size();
    collect_example(child, out);
    std::size_t end = out.text.size();
    if (child.name == "t") {
      out.target_bytes.emplace_back(begin, end);
    } else if (child.name == "fex") {
      out.fe_bytes.emplace_back(child.attr_or("name"), std::make_pair(begin, end));
    }
  }
}

// Converts trimmed byte ranges into code point spans; ranges that become
// empty after trimming are dropped.
std::optional<Span> byte_range_to_span(const std::string& sentence,
                                       const std::vector<std::size_t>& bounds,
                                       std::size_t begin, std::size_t end) {
  while (begin < end && std::isspace(static_cast<unsigned char>(sentence[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(sentence[end - 1]))) --end;
  if (begin >= end) return std::nullopt;
  auto cp_begin = std::lower_bound(bounds.begin(), bounds.end(), begin) - bounds.begin();
  auto cp_end = std::lower_bound(bounds.begin(), bounds.end(), end) - bounds.begin();
  return Span{static_cast<std::size_t>(cp_begin), static_cast<std::size_t>(cp_end),
              sentence.substr(begin, end - begin)};
}

Exemplar to_exemplar(const xml::Node& ex) {
  MarkedText mt;
  collect_example(ex, mt);
  std::size_t lead = 0;
  while (lead < mt.text.size() && std::isspace(static_cast<unsigned char>(mt.text[lead]))) ++lead;
  std::size_t tail = mt.text.size();
  while (tail > lead && std::isspace(static_cast<unsigned char>(mt.text[tail - 1]))) --tail;

  Exemplar out;
  out.sentence = mt.text.substr(lead, tail - lead);
  auto bounds = utf8::boundaries(out.sentence);
  auto shift = [&](std::size_t b) {
    b = b < lead ? 0 : b - lead;
    return std::min(b, out.sentence.size());
  };
  for (auto [b, e] : mt.target_bytes) {
    if (auto s = byte_range_to_span(out.sentence, bounds, shift(b), shift(e))) {
      out.target.push_back(*s);
    }
  }
  for (auto& [name, range] : mt.fe_bytes) {
    if (auto s = byte_range_to_span(out.sentence, bounds, shift(range.first), shift(range.second))) {
      out.fes.push_back(FeSpan{name, *s});
    }
  }
  std::sort(out.target.begin(), out.target.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  return out;
}

void collect_definition_text(const xml::Node& node, std::string& out) {
  for (const auto& child : node.children) {
    if (child.is_text()) {
      out += child.text;
    } else if (child.name != "ex") {
      collect_definition_text(child, out);
    } else {
      out += ' ';
    }
  }
}

void find_examples(const xml::Node& node, std::vector<Exemplar>& out) {
  for (const auto& child : node.children) {
    if (child.is_text()) continue;
    if (child.name == "ex") {
      Exemplar ex = to_exemplar(child);
      if (!ex.sentence.empty()) out.push_back(std::move(ex));
    } else {
      find_examples(child, out);
    }
  }
}

std::string strip_tags(std::string_view markup) {
  std::string out;
  bool in_tag = false;
  for (char c : markup) {
    if (c == '<') {
      in_tag = true;
      out += ' ';
    } else if (c == '>') {
      in_tag = false;
    } else if (!in_tag) {
      out += c;
    }
  }
  return out;
}

}  // namespace

ParsedDefinition parse_definition_markup(std::string_view markup) {
  ParsedDefinition out;
  std::string trimmed = trim(markup);
  if (trimmed.empty()) return out;
  // Definitions are not always wrapped in def-root; wrap so the fragment is a
  // single document.
  std::string doc = "<fk-wrap>" + trimmed + "</fk-wrap>";
  xml::ParseError err;
  xml::Node root = xml::parse(doc, err);
  if (err.failed) {
    out.text = normalize_whitespace(strip_tags(trimmed));
    return out;
  }
  std::string text;
  collect_definition_text(root, text);
  out.text = normalize_whitespace(text);
  find_examples(root, out.examples);
  return out;
}

// --- frame files ---------------------------------------------------------------

namespace {

[[noreturn]] void throw_malformed(const std::string& source, const xml::ParseError& err) {
  throw Error(ErrorKind::MalformedXml, source + ":" + std::to_string(err.line) + ":" +
                                           std::to_string(err.column) + ": " + err.message);
}

// Maps abbreviations and missing names in FE-definition examples onto FE
// names of the frame; `owner` fills in unnamed fex elements.
void resolve_example_names(std::vector<Exemplar>& examples, const std::vector<FrameElementDef>& fes,
                           const std::string& owner) {
  for (auto& ex : examples) {
    for (auto& fe : ex.fes) {
      if (fe.name.empty()) {
        fe.name = owner;
        continue;
      }
      bool known = false;
      for (const auto& def : fes) {
        if (def.name == fe.name) {
          known = true;
          break;
        }
      }
      if (known) continue;
      for (const auto& def : fes) {
        if (!def.abbrev.empty() && def.abbrev == fe.name) {
          fe.name = def.name;
          break;
        }
      }
    }
  }
}

}  // namespace

FrameDef parse_frame_xml(std::string_view data, const std::string& source_name) {
  xml::ParseError err;
  xml::Node doc = xml::parse(data, err);
  if (err.failed) throw_malformed(source_name, err);
  const xml::Node* frame = doc.first("frame");
  if (!frame) {
    throw Error(ErrorKind::MalformedXml, source_name + ": missing <frame> root element");
  }
  FrameDef out;
  out.name = frame->attr_or("name");
  if (out.name.empty()) throw Error(ErrorKind::MalformedXml, source_name + ": frame without name");
  if (const xml::Node* def = frame->first("definition")) {
    ParsedDefinition parsed = parse_definition_markup(def->all_text());
    out.definition = std::move(parsed.text);
    out.exemplars = std::move(parsed.examples);
  }
  for (const xml::Node* fe : frame->elements("FE")) {
    FrameElementDef fed;
    fed.name = fe->attr_or("name");
    fed.abbrev = fe->attr_or("abbrev");
    try {
      fed.coreness = parse_coreness(fe->attr_or("coreType"));
    } catch (const Error& e) {
      throw Error(ErrorKind::UnknownCoreness, source_name + ": FE " + fed.name + ": " +
                                                  "coreType '" + fe->attr_or("coreType") + "'");
    }
    if (const xml::Node* def = fe->first("definition")) {
      ParsedDefinition parsed = parse_definition_markup(def->all_text());
      fed.definition = std::move(parsed.text);
      fed.examples = std::move(parsed.examples);
    }
    out.fe_defs.push_back(std::move(fed));
  }
  for (auto& fed : out.fe_defs) resolve_example_names(fed.examples, out.fe_defs, fed.name);
  resolve_example_names(out.exemplars, out.fe_defs, std::string());
  for (const xml::Node* lu : frame->elements("lexUnit")) {
    if (auto parts = split_lu_name(lu->attr_or("name"))) {
      out.lexical_units.push_back(LexicalUnit{parts->first, parts->second, out.name});
    }
  }
  return out;
}

namespace {

std::vector<fs::path> list_xml(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs fn(i) for i in [0, n) on a small worker pool. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  workers = std::min<std::size_t>(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

Lexicon load_lexicon(const std::string& framenet_dir, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  fs::path root(framenet_dir);
  if (!fs::is_directory(root)) {
    throw Error(ErrorKind::MissingDirectory, framenet_dir + " is not a directory");
  }
  if (!fs::is_directory(root / "frame")) {
    throw Error(ErrorKind::MissingDirectory, (root / "frame").string() + " not found");
  }
  if (!fs::is_regular_file(root / "luIndex.xml")) {
    throw Error(ErrorKind::MissingDirectory, (root / "luIndex.xml").string() + " not found");
  }

  auto files = list_xml(root / "frame");
  std::vector<FrameDef> frames(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    frames[i] = parse_frame_xml(read_file(files[i].string()), files[i].string());
  });
  Lexicon lexicon;
  for (auto& f : frames) lexicon.add_frame(std::move(f));

  const std::string index_path = (root / "luIndex.xml").string();
  xml::ParseError err;
  xml::Node doc = xml::parse(read_file(index_path), err);
  if (err.failed) throw_malformed(index_path, err);
  const xml::Node* index = doc.first("luIndex");
  if (!index) throw Error(ErrorKind::MalformedXml, index_path + ": missing <luIndex> root");
  for (const xml::Node* lu : index->elements("lu")) {
    auto parts = split_lu_name(lu->attr_or("name"));
    std::string frame_name = lu->attr_or("frameName");
    if (!parts || !lexicon.find_frame(frame_name)) {
      ++rep.unresolved_lexical_units;
      continue;
    }
    lexicon.add_lexical_unit(LexicalUnit{parts->first, parts->second, frame_name});
  }
  return lexicon;
}

// --- full text -----------------------------------------------------------------

namespace {

bool parse_size(const std::string* s, std::size_t& out) {
  if (!s || s->empty()) return false;
  std::size_t v = 0;
  for (char c : *s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  out = v;
  return true;
}

// FrameNet label offsets are inclusive on both ends.
std::optional<Span> label_span(const xml::Node& label, const std::string& text,
                               const std::vector<std::size_t>& bounds) {
  std::size_t start = 0, last = 0;
  if (!parse_size(label.attr("start"), start) || !parse_size(label.attr("end"), last)) {
    return std::nullopt;
  }
  std::size_t end = last + 1;
  std::size_t n = bounds.size() - 1;
  if (start >= end || end > n) {
    throw Error(ErrorKind::OffsetOutOfBounds, "label " + label.attr_or("name") + " [" +
                                                  std::to_string(start) + "," +
                                                  std::to_string(last) + "]");
  }
  return Span{start, end, text.substr(bounds[start], bounds[end] - bounds[start])};
}

bool overlaps(const Span& a, const Span& b) { return a.start < b.end && b.start < a.end; }

}  // namespace

Document parse_fulltext_document(std::string_view data, const std::string& doc_id,
                                 const Lexicon& lexicon, LoadReport& report) {
  xml::ParseError err;
  xml::Node doc = xml::parse(data, err);
  if (err.failed) throw_malformed(doc_id, err);
  const xml::Node* root = doc.first("fullTextAnnotation");
  if (!root) throw Error(ErrorKind::MalformedXml, doc_id + ": missing <fullTextAnnotation> root");

  Document out;
  out.id = doc_id;
  for (const xml::Node* sentence : root->elements("sentence")) {
    ++out.sentence_count;
    const xml::Node* text_node = sentence->first("text");
    std::string text = text_node ? text_node->all_text() : std::string();
    auto bounds = utf8::boundaries(text);
    std::string sentence_id = sentence->attr_or("ID");
    if (sentence_id.empty()) sentence_id = doc_id + "#" + sentence->attr_or("sentNo");

    for (const xml::Node* aset : sentence->elements("annotationSet")) {
      const xml::Node* target_layer = nullptr;
      const xml::Node* fe_layer = nullptr;
      for (const xml::Node* layer : aset->elements("layer")) {
        std::string name = layer->attr_or("name");
        std::string rank = layer->attr_or("rank", "1");
        if (name == "Target" && !target_layer) target_layer = layer;
        if (name == "FE" && rank == "1" && !fe_layer) fe_layer = layer;
      }
      std::string frame_name = aset->attr_or("frameName");
      bool has_target = target_layer && !target_layer->elements("label").empty();
      if (frame_name.empty()) {
        if (has_target) ++report.dropped_unlabeled;
        continue;
      }
      if (!has_target) {
        ++report.dropped_unlabeled;
        continue;
      }
      const FrameDef* frame = lexicon.find_frame(frame_name);
      if (!frame) {
        ++report.dropped_unknown_frame;
        continue;
      }

      FrameInstance inst;
      inst.instance_id = aset->attr_or("ID");
      if (inst.instance_id.empty()) {
        inst.instance_id = sentence_id + "/" + std::to_string(out.instances.size());
      }
      inst.sentence_id = sentence_id;
      inst.document_id = doc_id;
      inst.sentence_text = text;
      inst.frame_name = frame_name;
      inst.lu_name = aset->attr_or("luName");
      try {
        for (const xml::Node* label : target_layer->elements("label")) {
          if (auto s = label_span(*label, text, bounds)) inst.target.push_back(*s);
        }
        if (inst.target.empty()) {
          ++report.dropped_unlabeled;
          continue;
        }
        std::sort(inst.target.begin(), inst.target.end(),
                  [](const Span& a, const Span& b) { return a.start < b.start; });
        if (fe_layer) {
          for (const xml::Node* label : fe_layer->elements("label")) {
            if (label->attr("itype")) {
              ++report.null_instantiations;
              continue;
            }
            auto s = label_span(*label, text, bounds);
            if (!s) continue;
            FeAnnotation fe{label->attr_or("name"), *s, false};
            fe.undefined_fe = !frame->has_fe(fe.name);
            inst.fes.push_back(std::move(fe));
          }
        }
      } catch (const Error& e) {
        ++report.skipped_offsets;
        report.warn(doc_id + " sentence " + sentence_id + ": " + e.what());
        continue;
      }
      std::stable_sort(inst.fes.begin(), inst.fes.end(),
                       [](const FeAnnotation& a, const FeAnnotation& b) {
                         return a.span.start < b.span.start;
                       });
      std::vector<FeAnnotation> kept;
      for (auto& fe : inst.fes) {
        bool clash = std::any_of(kept.begin(), kept.end(), [&](const FeAnnotation& k) {
          return overlaps(k.span, fe.span);
        });
        if (clash) {
          ++report.dropped_overlapping_fes;
          report.warn(doc_id + " set " + inst.instance_id + ": overlapping FE " + fe.name +
                      " dropped");
          continue;
        }
        kept.push_back(std::move(fe));
      }
      inst.fes = std::move(kept);
      out.instances.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<Document> load_fulltext(const std::string& framenet_dir, const Lexicon& lexicon,
                                    LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  fs::path dir = fs::path(framenet_dir) / "fulltext";
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::MissingDirectory, dir.string() + " not found");
  }
  auto files = list_xml(dir);
  std::vector<Document> docs(files.size());
  std::vector<LoadReport> reports(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    docs[i] = parse_fulltext_document(read_file(files[i].string()), files[i].stem().string(),
                                      lexicon, reports[i]);
  });
  for (auto& r : reports) {
    rep.dropped_unlabeled += r.dropped_unlabeled;
    rep.dropped_unknown_frame += r.dropped_unknown_frame;
    rep.skipped_offsets += r.skipped_offsets;
    rep.null_instantiations += r.null_instantiations;
    rep.dropped_overlapping_fes += r.dropped_overlapping_fes;
    for (auto& w : r.warnings) rep.warn(std::move(w));
  }
  return docs;
}

CorpusStats corpus_stats(const std::vector<FrameInstance>& instances) {
  CorpusStats s;
  std::set<std::string> docs, frames;
  std::set<std::pair<std::string, std::string>> sentences;
  for (const auto& inst : instances) {
    docs.insert(inst.document_id);
    frames.insert(inst.frame_name);
    sentences.emplace(inst.document_id, inst.sentence_id);
    s.frame_elements += inst.fes.size();
  }
  s.documents = docs.size();
  s.sentences = sentences.size();
  s.instances = instances.size();
  s.distinct_frames = frames.size();
  return s;
}

// --- splits ---------------------------------------------------------------------

SplitConfig parse_split_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("split config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "split config must be an object");
  auto read_list = [&](const char* key, bool required) {
    std::vector<std::string> out;
    if (!j.contains(key)) {
      if (required) throw Error(ErrorKind::InvalidConfig, std::string("split config lacks ") + key);
      return out;
    }
    const json& arr = j.at(key);
    if (!arr.is_array()) throw Error(ErrorKind::InvalidConfig, std::string(key) + " must be a list");
    for (const auto& v : arr) {
      if (!v.is_string()) {
        throw Error(ErrorKind::InvalidConfig, std::string(key) + " entries must be strings");
      }
      std::string id = v.get<std::string>();
      if (id.size() > 4 && id.substr(id.size() - 4) == ".xml") id.resize(id.size() - 4);
      out.push_back(std::move(id));
    }
    return out;
  };
  SplitConfig cfg;
  cfg.train_docs = read_list("train_docs", true);
  cfg.test_docs = read_list("test_docs", true);
  cfg.dev_docs = read_list("dev_docs", false);
  return cfg;
}

SplitConfig load_split_config(const std::string& path) { return parse_split_config(read_file(path)); }

SplitResult split_corpus(const std::vector<Document>& documents, const SplitConfig& config,
                         std::shared_ptr<const Lexicon> lexicon) {
  auto is_wild = [](const std::vector<std::string>& v) { return v.size() == 1 && v[0] == "*"; };
  bool train_wild = is_wild(config.train_docs);
  bool test_wild = is_wild(config.test_docs);
  if (train_wild && test_wild) {
    throw Error(ErrorKind::InvalidConfig, "train_docs and test_docs cannot both be '*'");
  }
  std::set<std::string> train(config.train_docs.begin(), config.train_docs.end());
  std::set<std::string> test(config.test_docs.begin(), config.test_docs.end());
  std::set<std::string> dev(config.dev_docs.begin(), config.dev_docs.end());
  if (!train_wild && !test_wild) {
    for (const auto& id : train) {
      if (test.count(id)) throw Error(ErrorKind::OverlappingSplit, id);
    }
  }

  SplitResult out;
  out.train.label = PartLabel::Train;
  out.test.label = PartLabel::Test;
  out.train.lexicon = lexicon;
  out.test.lexicon = lexicon;
  std::set<std::string> present;
  for (const auto& doc : documents) {
    present.insert(doc.id);
    bool in_train = train_wild ? (!test.count(doc.id) && !dev.count(doc.id)) : train.count(doc.id) > 0;
    bool in_test = test_wild ? (!train.count(doc.id) && !dev.count(doc.id)) : test.count(doc.id) > 0;
    CorpusPart* part = in_train ? &out.train : in_test ? &out.test : nullptr;
    if (!part) {
      out.excluded_documents.push_back(doc.id);
      continue;
    }
    part->documents.push_back(doc.id);
    part->instances.insert(part->instances.end(), doc.instances.begin(), doc.instances.end());
  }
  for (const auto* list : {&config.train_docs, &config.test_docs}) {
    for (const auto& id : *list) {
      if (id != "*" && !present.count(id)) out.missing_documents.push_back(id);
    }
  }
  return out;
}

// --- interchange ------------------------------------------------------------------

std::string to_interchange_line(const FrameInstance& inst) {
  ordered_json j;
  j["sentence"] = inst.sentence_text;
  j["doc_id"] = inst.document_id;
  j["frame"] = inst.frame_name;
  json target = json::array();
  for (const auto& s : inst.target) target.push_back({s.start, s.end});
  j["target"] = target;
  ordered_json fes = ordered_json::array();
  for (const auto& fe : inst.fes) {
    ordered_json f;
    f["name"] = fe.name;
    f["start"] = fe.span.start;
    f["end"] = fe.span.end;
    fes.push_back(f);
  }
  j["fes"] = fes;
  j["sentence_id"] = inst.sentence_id;
  j["instance_id"] = inst.instance_id;
  if (!inst.lu_name.empty()) j["lu"] = inst.lu_name;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

FrameInstance parse_interchange_record(const json& j, std::size_t line_no,
                                       std::map<std::string, std::map<std::string, std::size_t>>& ordinals) {
  auto str = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j.at(key).is_string()) {
      throw Error(ErrorKind::MalformedRecord, std::string("missing string field ") + key);
    }
    return j.at(key).get<std::string>();
  };
  auto index = [&](const json& v) -> std::size_t {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw Error(ErrorKind::MalformedRecord, "offset must be a non-negative integer");
    }
    return v.get<std::size_t>();
  };
  FrameInstance inst;
  inst.sentence_text = str("sentence");
  inst.document_id = str("doc_id");
  inst.frame_name = str("frame");
  if (!j.contains("target") || !j.at("target").is_array() || j.at("target").empty()) {
    throw Error(ErrorKind::MalformedRecord, "target must be a nonempty list");
  }
  for (const auto& t : j.at("target")) {
    if (!t.is_array() || t.size() != 2) {
      throw Error(ErrorKind::MalformedRecord, "target entries must be [start, end]");
    }
    inst.target.push_back(make_span(inst.sentence_text, index(t[0]), index(t[1])));
  }
  if (j.contains("fes")) {
    if (!j.at("fes").is_array()) throw Error(ErrorKind::MalformedRecord, "fes must be a list");
    for (const auto& f : j.at("fes")) {
      if (!f.is_object() || !f.contains("name") || !f.at("name").is_string() ||
          !f.contains("start") || !f.contains("end")) {
        throw Error(ErrorKind::MalformedRecord, "fe entries need name, start, end");
      }
      inst.fes.push_back(FeAnnotation{f.at("name").get<std::string>(),
                                      make_span(inst.sentence_text, index(f.at("start")),
                                                index(f.at("end"))),
                                      false});
    }
  }
  for (std::size_t a = 0; a < inst.fes.size(); ++a) {
    for (std::size_t b = a + 1; b < inst.fes.size(); ++b) {
      if (overlaps(inst.fes[a].span, inst.fes[b].span)) {
        throw Error(ErrorKind::MalformedRecord, "overlapping FE spans");
      }
    }
  }
  if (j.contains("sentence_id") && j.at("sentence_id").is_string()) {
    inst.sentence_id = j.at("sentence_id").get<std::string>();
  } else {
    auto& doc = ordinals[inst.document_id];
    auto [it, inserted] = doc.emplace(inst.sentence_text, doc.size());
    inst.sentence_id = inst.document_id + "#" + std::to_string(it->second);
  }
  if (j.contains("instance_id") && j.at("instance_id").is_string()) {
    inst.instance_id = j.at("instance_id").get<std::string>();
  } else {
    inst.instance_id = "L" + std::to_string(line_no);
  }
  if (j.contains("lu") && j.at("lu").is_string()) inst.lu_name = j.at("lu").get<std::string>();
  return inst;
}

}  // namespace

CorpusPart parse_interchange(std::string_view text, std::shared_ptr<const Lexicon> lexicon,
                             LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  CorpusPart part;
  part.label = PartLabel::OutOfDomain;
  part.lexicon = lexicon;
  std::map<std::string, std::map<std::string, std::size_t>> ordinals;
  std::set<std::string> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      if (!j.is_object()) throw Error(ErrorKind::MalformedRecord, "record is not an object");
      FrameInstance inst = parse_interchange_record(j, line_no, ordinals);
      if (lexicon) {
        const FrameDef* frame = lexicon->find_frame(inst.frame_name);
        inst.undefined_frame = frame == nullptr;
        for (auto& fe : inst.fes) fe.undefined_fe = !frame || !frame->has_fe(fe.name);
      }
      if (docs.insert(inst.document_id).second) part.documents.push_back(inst.document_id);
      part.instances.push_back(std::move(inst));
    } catch (const std::exception& e) {
      ++rep.malformed_records;
      rep.warn("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return part;
}

CorpusPart load_interchange(const std::string& path, std::shared_ptr<const Lexicon> lexicon,
                            LoadReport* report) {
  return parse_interchange(read_file(path), std::move(lexicon), report);
}

void write_interchange(const std::string& path, const std::vector<FrameInstance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    out += to_interchange_line(inst);
    out += '\n';
  }
  write_file(path, out);
}

// --- unseen partition ---------------------------------------------------------------

namespace {

enum class Seen { Seen, UnseenFrame, UnseenFe };

std::vector<Seen> classify(const CorpusPart& train, const CorpusPart& test) {
  std::unordered_set<std::string> frames;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& inst : train.instances) {
    frames.insert(inst.frame_name);
    for (const auto& fe : inst.fes) pairs.emplace(inst.frame_name, fe.name);
  }
  std::vector<Seen> out;
  out.reserve(test.instances.size());
  for (const auto& inst : test.instances) {
    if (!frames.count(inst.frame_name)) {
      out.push_back(Seen::UnseenFrame);
      continue;
    }
    bool novel = std::any_of(inst.fes.begin(), inst.fes.end(), [&](const FeAnnotation& fe) {
      return !pairs.count({inst.frame_name, fe.name});
    });
    out.push_back(novel ? Seen::UnseenFe : Seen::Seen);
  }
  return out;
}

}  // namespace

UnseenPartition unseen_partition(const CorpusPart& train, const CorpusPart& test) {
  UnseenPartition out;
  auto labels = classify(train, test);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case Seen::Seen: out.seen.push_back(test.instances[i]); break;
      case Seen::UnseenFrame: out.unseen_frame.push_back(test.instances[i]); break;
      case Seen::UnseenFe: out.unseen_fe.push_back(test.instances[i]); break;
    }
  }
  return out;
}

std::vector<std::string> unseen_labels(const CorpusPart& train, const CorpusPart& test) {
  std::vector<std::string> out;
  for (Seen s : classify(train, test)) {
    out.push_back(s == Seen::Seen ? "seen" : s == Seen::UnseenFrame ? "unseen_frame" : "unseen_fe");
  }
  return out;
}

// --- lexicon cache --------------------------------------------------------------------

namespace {

ordered_json exemplar_json(const Exemplar& ex) {
  ordered_json j;
  j["sentence"] = ex.sentence;
  json target = json::array();
  for (const auto& s : ex.target) target.push_back({s.start, s.end});
  j["target"] = target;
  ordered_json fes = ordered_json::array();
  for (const auto& fe : ex.fes) {
    ordered_json f;
    f["name"] = fe.name;
    f["start"] = fe.span.start;
    f["end"] = fe.span.end;
    fes.push_back(f);
  }
  j["fes"] = fes;
  return j;
}

Exemplar exemplar_from(const json& j) {
  Exemplar ex;
  ex.sentence = j.at("sentence").get<std::string>();
  for (const auto& t : j.at("target")) {
    ex.target.push_back(make_span(ex.sentence, t[0].get<std::size_t>(), t[1].get<std::size_t>()));
  }
  for (const auto& f : j.at("fes")) {
    ex.fes.push_back(FeSpan{f.at("name").get<std::string>(),
                            make_span(ex.sentence, f.at("start").get<std::size_t>(),
                                      f.at("end").get<std::size_t>())});
  }
  return ex;
}

}  // namespace

std::string lexicon_to_json(const Lexicon& lexicon) {
  ordered_json frames = ordered_json::array();
  for (const auto& f : lexicon.frames()) {
    ordered_json fj;
    fj["name"] = f.name;
    fj["definition"] = f.definition;
    ordered_json fes = ordered_json::array();
    for (const auto& fe : f.fe_defs) {
      ordered_json e;
      e["name"] = fe.name;
      e["abbrev"] = fe.abbrev;
      e["coreness"] = coreness_label(fe.coreness);
      e["definition"] = fe.definition;
      ordered_json exs = ordered_json::array();
      for (const auto& ex : fe.examples) exs.push_back(exemplar_json(ex));
      e["examples"] = exs;
      fes.push_back(e);
    }
    fj["fes"] = fes;
    ordered_json lus = ordered_json::array();
    for (const auto& lu : f.lexical_units) lus.push_back(lu.rendered());
    fj["lexical_units"] = lus;
    ordered_json exs = ordered_json::array();
    for (const auto& ex : f.exemplars) exs.push_back(exemplar_json(ex));
    fj["exemplars"] = exs;
    frames.push_back(fj);
  }
  ordered_json root;
  root["frames"] = frames;
  return root.dump(1, ' ', false, json::error_handler_t::replace);
}

Lexicon lexicon_from_json(std::string_view text) {
  Lexicon lexicon;
  try {
    json root = json::parse(text);
    for (const auto& fj : root.at("frames")) {
      FrameDef f;
      f.name = fj.at("name").get<std::string>();
      f.definition = fj.at("definition").get<std::string>();
      for (const auto& e : fj.at("fes")) {
        FrameElementDef fe;
        fe.name = e.at("name").get<std::string>();
        fe.abbrev = e.value("abbrev", "");
        fe.coreness = parse_coreness(e.at("coreness").get<std::string>());
        fe.definition = e.at("definition").get<std::string>();
        for (const auto& ex : e.at("examples")) fe.examples.push_back(exemplar_from(ex));
        f.fe_defs.push_back(std::move(fe));
      }
      for (const auto& lu : fj.at("lexical_units")) {
        if (auto parts = split_lu_name(lu.get<std::string>())) {
          f.lexical_units.push_back(LexicalUnit{parts->first, parts->second, f.name});
        }
      }
      for (const auto& ex : fj.at("exemplars")) f.exemplars.push_back(exemplar_from(ex));
      lexicon.add_frame(std::move(f));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("lexicon cache: ") + e.what());
  }
  return lexicon;
}

}  // namespace framekit
