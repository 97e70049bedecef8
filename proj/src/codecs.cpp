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

#include "framekit/codecs.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "json.hpp"

using nlohmann::json;

namespace framekit {

const char* format_name(RepresentationFormat format) {
  switch (format) {
    case RepresentationFormat::Markdown: return "markdown";
    case RepresentationFormat::XmlTags: return "xml";
    case RepresentationFormat::JsonExisting: return "json-exist";
    case RepresentationFormat::JsonComplete: return "json-complete";
  }
  return "json-exist";
}

std::optional<RepresentationFormat> parse_format(std::string_view name) {
  for (auto f : kAllFormats) {
    if (name == format_name(f)) return f;
  }
  if (name == "md") return RepresentationFormat::Markdown;
  if (name == "xml-tags") return RepresentationFormat::XmlTags;
  if (name == "json-existing") return RepresentationFormat::JsonExisting;
  if (name == "json-all") return RepresentationFormat::JsonComplete;
  return std::nullopt;
}

const char* fence_label(RepresentationFormat format) {
  switch (format) {
    case RepresentationFormat::Markdown: return "markdown";
    case RepresentationFormat::XmlTags: return "xml";
    default: return "json";
  }
}

const char* warning_name(WarningKind kind) {
  switch (kind) {
    case WarningKind::NoCodeFence: return "NoCodeFence";
    case WarningKind::UnterminatedFence: return "UnterminatedFence";
    case WarningKind::EmptyOutput: return "EmptyOutput";
    case WarningKind::Unparseable: return "Unparseable";
    case WarningKind::JsonRepaired: return "JsonRepaired";
    case WarningKind::NonStringValue: return "NonStringValue";
    case WarningKind::UnknownFe: return "UnknownFe";
    case WarningKind::UnclosedTag: return "UnclosedTag";
    case WarningKind::StrayClosingTag: return "StrayClosingTag";
    case WarningKind::SentenceMutated: return "SentenceMutated";
    case WarningKind::IgnoredLine: return "IgnoredLine";
    case WarningKind::NotInSentence: return "NotInSentence";
    case WarningKind::ExtractorFailed: return "ExtractorFailed";
  }
  return "Unknown";
}

bool PredictionSet::has_warning(WarningKind kind) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [kind](const DecodeWarning& w) { return w.kind == kind; });
}

// --- target marking ----------------------------------------------------------

MarkedSentence mark_target(std::string_view sentence, const std::vector<Span>& target) {
  auto bounds = utf8::boundaries(sentence);
  std::size_t n = bounds.size() - 1;
  std::vector<Span> sorted = target;
  std::sort(sorted.begin(), sorted.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].start >= sorted[i].end || sorted[i].end > n) {
      throw Error(ErrorKind::OffsetOutOfBounds, "target span out of range");
    }
    if (i > 0 && sorted[i].start < sorted[i - 1].end) {
      throw Error(ErrorKind::OverlappingTarget,
                  "spans at " + std::to_string(sorted[i - 1].start) + " and " +
                      std::to_string(sorted[i].start));
    }
  }
  std::string marked(sentence);
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    marked.insert(bounds[it->end], "**");
    marked.insert(bounds[it->start], "**");
  }
  return MarkedSentence{std::string(sentence), std::move(marked), std::move(sorted)};
}

std::string strip_target_marks(std::string_view marked) {
  std::string out;
  out.reserve(marked.size());
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (marked[i] == '*' && i + 1 < marked.size() && marked[i + 1] == '*') {
      ++i;
      continue;
    }
    out.push_back(marked[i]);
  }
  return out;
}

// --- encoding -----------------------------------------------------------------

namespace {

std::string quote(std::string_view s) {
  return json(std::string(s)).dump(-1, ' ', false, json::error_handler_t::replace);
}

// Groups texts by FE name, keeping first-occurrence order.
std::vector<std::pair<std::string, std::vector<std::string>>> group_by_name(
    const std::vector<FeSpan>& fes) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& fe : fes) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == fe.name; });
    if (it == out.end()) {
      out.emplace_back(fe.name, std::vector<std::string>{fe.span.text});
    } else {
      it->second.push_back(fe.span.text);
    }
  }
  return out;
}

void check_duplicates(const std::vector<std::pair<std::string, std::vector<std::string>>>& groups,
                      const EncodeOptions& options) {
  if (options.duplicates_as_list) return;
  for (const auto& [name, texts] : groups) {
    if (texts.size() > 1) throw Error(ErrorKind::DuplicateFeInJson, name);
  }
}

std::string encode_xml(std::string_view sentence, const std::vector<FeSpan>& fes) {
  std::vector<const FeSpan*> sorted;
  for (const auto& fe : fes) sorted.push_back(&fe);
  std::sort(sorted.begin(), sorted.end(),
            [](const FeSpan* a, const FeSpan* b) { return a->span.start < b->span.start; });
  auto bounds = utf8::boundaries(sentence);
  std::size_t n = bounds.size() - 1;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i]->span.end > n || sorted[i]->span.start >= sorted[i]->span.end) {
      throw Error(ErrorKind::OffsetOutOfBounds, "FE " + sorted[i]->name + " span out of range");
    }
    if (i > 0 && sorted[i]->span.start < sorted[i - 1]->span.end) {
      throw Error(ErrorKind::NestedSpans, sorted[i - 1]->name + " overlaps " + sorted[i]->name);
    }
  }
  std::string out(sentence);
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    const FeSpan& fe = **it;
    out.insert(bounds[fe.span.end], "</" + fe.name + ">");
    out.insert(bounds[fe.span.start], "<" + fe.name + ">");
  }
  return out;
}

}  // namespace

std::string json_object_text(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& items) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, texts] : items) {
    if (!first) out += ", ";
    first = false;
    out += quote(name);
    out += ": ";
    if (texts.size() == 1) {
      out += quote(texts.front());
    } else if (texts.empty()) {
      out += "\"\"";
    } else {
      out += "[";
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (i) out += ", ";
        out += quote(texts[i]);
      }
      out += "]";
    }
  }
  out += "}";
  return out;
}

std::string encode_fes(RepresentationFormat format, std::string_view sentence,
                       const std::vector<FeSpan>& fes, const FrameDef& frame,
                       const EncodeOptions& options) {
  switch (format) {
    case RepresentationFormat::Markdown: {
      std::string out;
      for (std::size_t i = 0; i < fes.size(); ++i) {
        if (i) out += '\n';
        out += "- " + fes[i].name + ": " + fes[i].span.text;
      }
      return out;
    }
    case RepresentationFormat::XmlTags:
      return encode_xml(sentence, fes);
    case RepresentationFormat::JsonExisting: {
      auto groups = group_by_name(fes);
      check_duplicates(groups, options);
      return json_object_text(groups);
    }
    case RepresentationFormat::JsonComplete: {
      auto groups = group_by_name(fes);
      check_duplicates(groups, options);
      std::vector<std::pair<std::string, std::vector<std::string>>> items;
      for (const auto& def : frame.fe_defs) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == def.name; });
        items.emplace_back(def.name, it == groups.end() ? std::vector<std::string>{"" }
                                                        : it->second);
      }
      for (const auto& g : groups) {
        if (!frame.has_fe(g.first)) items.push_back(g);
      }
      return json_object_text(items);
    }
  }
  return {};
}

std::string encode(RepresentationFormat format, const FrameInstance& instance,
                   const FrameDef& frame, const EncodeOptions& options) {
  std::vector<FeSpan> fes;
  fes.reserve(instance.fes.size());
  for (const auto& fe : instance.fes) fes.push_back(FeSpan{fe.name, fe.span});
  return encode_fes(format, instance.sentence_text, fes, frame, options);
}

// --- code fences --------------------------------------------------------------

namespace {

struct Fence {
  std::size_t open = 0;           // position of the opening ```
  std::size_t content_begin = 0;
  std::size_t content_end = 0;
  std::string label;
  bool terminated = false;
};

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '+';
}

bool known_label(std::string_view label) {
  static const char* kLabels[] = {"json", "xml", "markdown", "md", "text", "txt", "yaml", "python"};
  std::string lower(label);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::any_of(std::begin(kLabels), std::end(kLabels),
                     [&](const char* l) { return lower == l; });
}

std::vector<Fence> scan_fences(std::string_view raw) {
  std::vector<Fence> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = raw.find("```", pos);
    if (open == std::string_view::npos) break;
    Fence f;
    f.open = open;
    std::size_t p = open + 3;
    while (p < raw.size() && raw[p] == '`') ++p;
    std::size_t label_end = p;
    while (label_end < raw.size() && is_label_char(raw[label_end])) ++label_end;
    std::string_view label = raw.substr(p, label_end - p);
    bool followed_by_space = label_end >= raw.size() ||
                             std::isspace(static_cast<unsigned char>(raw[label_end]));
    if (!label.empty() && (followed_by_space || known_label(label))) {
      f.label = std::string(label);
      p = label_end;
    }
    f.content_begin = p;
    std::size_t close = raw.find("```", p);
    if (close == std::string_view::npos) {
      f.content_end = raw.size();
      f.terminated = false;
      out.push_back(std::move(f));
      break;
    }
    f.content_end = close;
    f.terminated = true;
    out.push_back(std::move(f));
    pos = close + 3;
    while (pos < raw.size() && raw[pos] == '`') ++pos;
  }
  return out;
}

}  // namespace

CodeBlock extract_code_block(std::string_view raw, std::string_view preferred_label) {
  CodeBlock out;
  auto fences = scan_fences(raw);
  if (fences.empty()) {
    out.content = trim(raw);
    out.warnings.push_back({WarningKind::NoCodeFence, "no fenced block"});
    return out;
  }
  const Fence* chosen = nullptr;
  for (const auto& f : fences) {
    if (f.label == preferred_label) {
      chosen = &f;
      break;
    }
  }
  if (!chosen) chosen = &fences.front();
  out.label = chosen->label;
  out.content = trim(raw.substr(chosen->content_begin, chosen->content_end - chosen->content_begin));
  if (!chosen->terminated) {
    out.warnings.push_back({WarningKind::UnterminatedFence, "fence opened at byte " +
                                                                std::to_string(chosen->open)});
    // A lone trailing fence: the answer is the text before it.
    if (out.content.empty()) {
      out.content = trim(raw.substr(0, chosen->open));
      out.label.clear();
    }
  }
  return out;
}

// --- decoding -------------------------------------------------------------------

namespace {

void add_entry(PredictionSet& out, std::string name, std::string text, const FrameDef& frame,
               std::string_view sentence) {
  name = trim(name);
  text = trim(text);
  if (name.empty() || text.empty()) return;
  bool known = frame.has_fe(name);
  if (!known) out.warnings.push_back({WarningKind::UnknownFe, name});
  if (sentence.find(text) == std::string_view::npos &&
      normalize_whitespace(sentence).find(normalize_whitespace(text)) == std::string::npos) {
    out.warnings.push_back({WarningKind::NotInSentence, name + ": " + text});
  }
  out.entries.push_back(Prediction{std::move(name), std::move(text), known});
}

// Collects depth-1 string (or list-of-string) members of a JSON object,
// preserving order and repeated keys.
class FlatObjectSax : public nlohmann::json_sax<json> {
 public:
  struct Item {
    std::string key;
    std::string value;
  };
  std::vector<Item> items;
  std::vector<std::string> non_string_keys;
  bool top_is_object = false;

  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }
  bool number_integer(number_integer_t) override { return scalar(); }
  bool number_unsigned(number_unsigned_t) override { return scalar(); }
  bool number_float(number_float_t, const string_t&) override { return scalar(); }
  bool binary(binary_t&) override { return scalar(); }
  bool string(string_t& val) override {
    if (depth_ == 1 || (depth_ == 2 && in_list_)) {
      items.push_back(Item{key_, val});
    } else if (depth_ > 1) {
      note_nonstring();
    }
    return true;
  }
  bool start_object(std::size_t) override {
    if (depth_ == 0) top_is_object = true;
    if (depth_ >= 1) note_nonstring();
    ++depth_;
    return true;
  }
  bool end_object() override {
    --depth_;
    return true;
  }
  bool start_array(std::size_t) override {
    if (depth_ == 1) {
      in_list_ = true;
    } else if (depth_ > 1) {
      note_nonstring();
    }
    ++depth_;
    return true;
  }
  bool end_array() override {
    --depth_;
    if (depth_ == 1) in_list_ = false;
    return true;
  }
  bool key(string_t& val) override {
    if (depth_ == 1) {
      key_ = val;
      flagged_ = false;
    }
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  bool scalar() {
    if (depth_ == 1 || (depth_ == 2 && in_list_)) note_nonstring();
    return true;
  }
  void note_nonstring() {
    if (depth_ >= 1 && !flagged_) {
      non_string_keys.push_back(key_);
      flagged_ = true;
    }
  }

  int depth_ = 0;
  bool in_list_ = false;
  bool flagged_ = false;
  std::string key_;
};

bool strict_json(std::string_view text, FlatObjectSax& sax) {
  try {
    return json::sax_parse(text.begin(), text.end(), &sax, json::input_format_t::json, true) &&
           sax.top_is_object;
  } catch (...) {
    return false;
  }
}

// Replaces typographic quotes with ASCII ones and drops commas that directly
// precede a closing brace or bracket.
std::string repair_json(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+201C/U+201D and U+2018/U+2019 are E2 80 9C/9D/98/99 in UTF-8.
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      unsigned char c = static_cast<unsigned char>(text[i + 2]);
      if (c == 0x9C || c == 0x9D) {
        s.push_back('"');
        i += 2;
        continue;
      }
      if (c == 0x98 || c == 0x99) {
        s.push_back('\'');
        i += 2;
        continue;
      }
    }
    s.push_back(text[i]);
  }
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < s.size()) {
        out.push_back(s[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

// Reads a quoted string starting at text[pos] (which is the quote char).
// Returns false when the string is unterminated.
bool read_quoted(std::string_view text, std::size_t& pos, std::string& out) {
  char q = text[pos++];
  out.clear();
  while (pos < text.size()) {
    char c = text[pos++];
    if (c == '\\' && pos < text.size()) {
      char e = text[pos++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: out.push_back(e); break;
      }
      continue;
    }
    if (c == q) return true;
    out.push_back(c);
  }
  return false;
}

void skip_space(std::string_view text, std::size_t& pos) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
}

// Last-resort scan for 'key': 'value' and "key": ["a", "b"] pairs.
std::vector<std::pair<std::string, std::string>> scan_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  std::string key, value;
  while (pos < text.size()) {
    char c = text[pos];
    if (c != '"' && c != '\'') {
      ++pos;
      continue;
    }
    if (!read_quoted(text, pos, key)) break;
    skip_space(text, pos);
    if (pos >= text.size() || text[pos] != ':') continue;
    ++pos;
    skip_space(text, pos);
    if (pos >= text.size()) break;
    if (text[pos] == '"' || text[pos] == '\'') {
      if (!read_quoted(text, pos, value)) break;
      out.emplace_back(key, value);
    } else if (text[pos] == '[') {
      ++pos;
      while (pos < text.size()) {
        skip_space(text, pos);
        if (pos >= text.size() || text[pos] == ']') break;
        if (text[pos] == '"' || text[pos] == '\'') {
          if (!read_quoted(text, pos, value)) {
            pos = text.size();
            break;
          }
          out.emplace_back(key, value);
        } else {
          ++pos;
        }
      }
      if (pos < text.size()) ++pos;
    }
  }
  return out;
}

void decode_json(std::string_view content, const FrameDef& frame, std::string_view sentence,
                 PredictionSet& out) {
  FlatObjectSax sax;
  bool ok = strict_json(content, sax);
  if (!ok) {
    std::string repaired = repair_json(content);
    FlatObjectSax second;
    if (repaired != content && strict_json(repaired, second)) {
      out.warnings.push_back({WarningKind::JsonRepaired, "smart quotes or trailing commas"});
      sax = std::move(second);
      ok = true;
    } else {
      out.warnings.push_back({WarningKind::Unparseable, "invalid JSON; key-value scan used"});
      for (auto& [k, v] : scan_key_values(repaired)) add_entry(out, k, v, frame, sentence);
      return;
    }
  }
  for (const auto& k : sax.non_string_keys) out.warnings.push_back({WarningKind::NonStringValue, k});
  for (auto& item : sax.items) add_entry(out, item.key, item.value, frame, sentence);
}

bool parse_markdown_line(std::string_view line, std::string& name, std::string& text) {
  std::string l = trim(line);
  std::string_view v(l);
  if (v.size() < 2 || !(v[0] == '-' || v[0] == '*' || v[0] == '+') ||
      !std::isspace(static_cast<unsigned char>(v[1]))) {
    return false;
  }
  v.remove_prefix(2);
  auto sep = v.find(": ");
  std::string_view head, tail;
  if (sep == std::string_view::npos) {
    // "- Name:" with nothing after the colon
    if (v.empty() || v.back() != ':') return false;
    head = v.substr(0, v.size() - 1);
    tail = {};
  } else {
    head = v.substr(0, sep);
    tail = v.substr(sep + 2);
  }
  std::string h = trim(head);
  // "**Name**" or "**Name:**" (the colon inside the bold closes the name)
  if (h.size() >= 4 && h.substr(0, 2) == "**" && h.substr(h.size() - 2) == "**") {
    h = h.substr(2, h.size() - 4);
  } else if (h.size() >= 2 && h.substr(0, 2) == "**" && !tail.empty() && tail.substr(0, 2) == "**") {
    h = h.substr(2);
    tail.remove_prefix(2);
  }
  if (!h.empty() && h.back() == ':') h.pop_back();
  if (h.size() >= 2 && h.substr(0, 2) == "**") h = h.substr(2);
  if (h.size() >= 2 && h.substr(h.size() - 2) == "**") h.resize(h.size() - 2);
  name = trim(h);
  text = trim(tail);
  if (text.size() >= 2 && text.substr(0, 2) == "**") text = trim(std::string_view(text).substr(2));
  return !name.empty();
}

void decode_markdown(std::string_view content, const FrameDef& frame, std::string_view sentence,
                     PredictionSet& out) {
  std::size_t pos = 0;
  std::size_t parsed = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (trim(line).empty()) continue;
    std::string name, text;
    if (parse_markdown_line(line, name, text)) {
      ++parsed;
      add_entry(out, name, text, frame, sentence);
    } else {
      out.warnings.push_back({WarningKind::IgnoredLine, std::string(line.substr(0, 80))});
    }
  }
  if (parsed == 0 && !trim(content).empty()) {
    out.warnings.push_back({WarningKind::Unparseable, "no markdown list items"});
  }
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

void decode_xml(std::string_view content, const FrameDef& frame, std::string_view sentence,
                PredictionSet& out) {
  const bool strip_marks = sentence.find("**") == std::string_view::npos;
  std::string plain;
  struct Open {
    std::string name;
    std::size_t at;
  };
  std::vector<Open> stack;
  struct Found {
    std::size_t at;
    std::string name;
    std::size_t begin, end;
  };
  std::vector<Found> found;
  std::size_t i = 0;
  while (i < content.size()) {
    char c = content[i];
    if (c == '*' && strip_marks && i + 1 < content.size() && content[i + 1] == '*') {
      i += 2;
      continue;
    }
    if (c == '<') {
      bool closing = i + 1 < content.size() && content[i + 1] == '/';
      std::size_t p = i + (closing ? 2 : 1);
      if (p < content.size() && is_name_start(content[p])) {
        std::size_t q = p;
        while (q < content.size() && is_name_char(content[q])) ++q;
        std::size_t r = q;
        while (r < content.size() && content[r] == ' ') ++r;
        if (r < content.size() && content[r] == '>') {
          std::string name(content.substr(p, q - p));
          if (!closing) {
            stack.push_back(Open{name, plain.size()});
          } else {
            auto it = std::find_if(stack.rbegin(), stack.rend(),
                                   [&](const Open& o) { return o.name == name; });
            if (it == stack.rend()) {
              out.warnings.push_back({WarningKind::StrayClosingTag, name});
            } else {
              std::size_t idx = static_cast<std::size_t>(stack.rend() - it) - 1;
              for (std::size_t k = stack.size() - 1; k > idx; --k) {
                out.warnings.push_back({WarningKind::UnclosedTag, stack[k].name});
              }
              found.push_back(Found{stack[idx].at, name, stack[idx].at, plain.size()});
              stack.resize(idx);
            }
          }
          i = r + 1;
          continue;
        }
      }
    }
    plain.push_back(c);
    ++i;
  }
  for (const auto& o : stack) out.warnings.push_back({WarningKind::UnclosedTag, o.name});
  std::sort(found.begin(), found.end(),
            [](const Found& a, const Found& b) { return a.begin < b.begin; });
  if (normalize_whitespace(plain) != normalize_whitespace(sentence)) {
    out.warnings.push_back({WarningKind::SentenceMutated, "tag-stripped text differs from input"});
  }
  for (const auto& f : found) {
    add_entry(out, f.name, plain.substr(f.begin, f.end - f.begin), frame, sentence);
  }
}

}  // namespace

PredictionSet decode(RepresentationFormat format, std::string_view raw, const FrameDef& frame,
                     std::string_view sentence) {
  PredictionSet out;
  try {
    CodeBlock block = extract_code_block(raw, fence_label(format));
    for (auto& w : block.warnings) out.warnings.push_back(std::move(w));
    std::string content = block.content;
    if (content.rfind("### Output:", 0) == 0) content = trim(content.substr(11));
    if (content.empty()) {
      if (format == RepresentationFormat::JsonExisting ||
          format == RepresentationFormat::JsonComplete || trim(raw).empty()) {
        out.warnings.push_back({WarningKind::EmptyOutput, "no content"});
      }
      return out;
    }
    switch (format) {
      case RepresentationFormat::Markdown: decode_markdown(content, frame, sentence, out); break;
      case RepresentationFormat::XmlTags: decode_xml(content, frame, sentence, out); break;
      case RepresentationFormat::JsonExisting:
      case RepresentationFormat::JsonComplete: decode_json(content, frame, sentence, out); break;
    }
  } catch (const std::exception& e) {
    out.entries.clear();
    out.warnings.push_back({WarningKind::Unparseable, e.what()});
  }
  return out;
}

std::optional<Span> align_to_span(std::string_view text, std::string_view sentence,
                                  OccurrencePolicy policy) {
  if (text.empty()) return std::nullopt;
  std::size_t at = sentence.find(text);
  if (at == std::string_view::npos) return std::nullopt;
  if (policy == OccurrencePolicy::UniqueOnly && sentence.find(text, at + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  std::size_t start = utf8::to_codepoint(sentence, at);
  std::size_t end = utf8::to_codepoint(sentence, at + text.size());
  return Span{start, end, std::string(text)};
}

}  // namespace framekit
