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

// Minimal mixed-content DOM built with expat. Namespace prefixes are dropped
// from element names.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace framekit::xml {

struct Node {
  std::string name;  // empty for text nodes
  std::string text;  // text nodes only
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<Node> children;

  bool is_text() const { return name.empty(); }
  const std::string* attr(std::string_view key) const;
  std::string attr_or(std::string_view key, std::string fallback = {}) const;

  // Concatenated text of direct text children.
  std::string own_text() const;

  // Concatenated text of all descendants.
  std::string all_text() const;

  std::vector<const Node*> elements(std::string_view child_name) const;
  const Node* first(std::string_view child_name) const;
};

struct ParseError {
  bool failed = false;
  std::string message;
  long line = 0;
  long column = 0;
};

// Parses `data`; on failure returns an empty root and fills `error`.
Node parse(std::string_view data, ParseError& error);

}  // namespace framekit::xml
