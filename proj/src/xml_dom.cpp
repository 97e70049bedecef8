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

#include "xml_dom.hpp"

#include <expat.h>

#include <memory>

namespace framekit::xml {

const std::string* Node::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string Node::attr_or(std::string_view key, std::string fallback) const {
  const std::string* v = attr(key);
  return v ? *v : std::move(fallback);
}

std::string Node::own_text() const {
  std::string out;
  for (const auto& c : children) {
    if (c.is_text()) out += c.text;
  }
  return out;
}

std::string Node::all_text() const {
  if (is_text()) return text;
  std::string out;
  for (const auto& c : children) out += c.all_text();
  return out;
}

std::vector<const Node*> Node::elements(std::string_view child_name) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (!c.is_text() && c.name == child_name) out.push_back(&c);
  }
  return out;
}

const Node* Node::first(std::string_view child_name) const {
  for (const auto& c : children) {
    if (!c.is_text() && c.name == child_name) return &c;
  }
  return nullptr;
}

namespace {

std::string local_name(const XML_Char* qualified) {
  std::string_view q(qualified);
  auto sep = q.rfind('|');
  return std::string(sep == std::string_view::npos ? q : q.substr(sep + 1));
}

struct Builder {
  Node root;
  std::vector<Node*> stack;
};

void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
  auto* b = static_cast<Builder*>(user);
  Node* parent = b->stack.back();
  parent->children.emplace_back();
  Node& node = parent->children.back();
  node.name = local_name(name);
  for (int i = 0; atts[i] != nullptr; i += 2) {
    node.attrs.emplace_back(local_name(atts[i]), atts[i + 1]);
  }
  b->stack.push_back(&node);
}

void on_end(void* user, const XML_Char*) {
  static_cast<Builder*>(user)->stack.pop_back();
}

void on_text(void* user, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(user);
  Node* parent = b->stack.back();
  if (!parent->children.empty() && parent->children.back().is_text()) {
    parent->children.back().text.append(s, static_cast<std::size_t>(len));
    return;
  }
  Node t;
  t.text.assign(s, static_cast<std::size_t>(len));
  parent->children.push_back(std::move(t));
}

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

}  // namespace

Node parse(std::string_view data, ParseError& error) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS("UTF-8", '|'));
  Builder builder;
  builder.root.name = "#document";
  builder.stack.push_back(&builder.root);
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  // Children vectors must not reallocate under the stack pointers; expat
  // only appends to the innermost open element, whose address is stable
  // because siblings are never appended while a child is open.
  if (XML_Parse(parser.get(), data.data(), static_cast<int>(data.size()), 1) == XML_STATUS_ERROR) {
    error.failed = true;
    error.message = XML_ErrorString(XML_GetErrorCode(parser.get()));
    error.line = static_cast<long>(XML_GetCurrentLineNumber(parser.get()));
    error.column = static_cast<long>(XML_GetCurrentColumnNumber(parser.get()));
    return Node{};
  }
  return std::move(builder.root);
}

}  // namespace framekit::xml
