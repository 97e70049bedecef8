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

// Reference computations written independently of the library, used as
// test oracles.

#pragma once

#include <string>
#include <vector>

namespace oracle {

struct Pair {
  std::string name;
  std::string text;
  bool known = true;
};

struct Match {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Maximum bipartite matching (augmenting paths) between gold and predicted
// pairs; an edge exists when names are equal, texts are equal after
// collapsing whitespace, and the prediction is known.
Match max_matching(const std::vector<Pair>& gold, const std::vector<Pair>& pred);

// Whitespace collapse via stream tokenization.
std::string collapse(const std::string& text);

// Partial correlation from explicit normal-equation regressions of x and y
// on [1, z], followed by a textbook Pearson on the residuals.
double partial_correlation_normal_equations(const std::vector<double>& x, const std::vector<double>& y,
                                            const std::vector<double>& z);

// First-order partial correlation from the three pairwise Pearson values.
double partial_correlation_formula(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& z);

}  // namespace oracle
