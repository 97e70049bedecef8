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

// Deterministic generator for a FrameNet-1.7-shaped data directory
// (frame/*.xml, fulltext/*.xml, luIndex.xml). Used where the licensed corpus
// is not installed. The generator keeps its own tally of what a correct
// loader should keep, so tests can compare against it.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace synth {

struct Options {
  std::uint64_t seed = 17;
  std::size_t frame_count = 900;
  std::size_t train_doc_count = 62;
  std::vector<std::string> test_docs;  // defaults to a fixed list of 23 names
  std::vector<std::string> dev_docs;   // defaults to a fixed list of 8 names
  std::size_t min_sentences_per_doc = 30;
  std::size_t max_sentences_per_doc = 78;
  double zipf_exponent = 1.25;
};

struct PartTally {
  std::size_t documents = 0;
  std::size_t sentences = 0;  // sentences with at least one kept frame instance
  std::size_t instances = 0;
  std::size_t fes = 0;
};

struct Tally {
  std::map<std::string, PartTally> parts;  // "train", "test", "dev"
  std::size_t frames = 0;
  std::size_t null_instantiations = 0;
  std::size_t overlapping_fes = 0;
  std::size_t unknown_frame_sets = 0;
  std::size_t unlabeled_sets = 0;
  std::size_t duplicate_fe_instances = 0;
  std::size_t discontiguous_targets = 0;
};

// Writes the corpus under `dir` (created if needed) and returns the tally.
Tally write_corpus(const std::string& dir, const Options& options = {});

// Default held-out document names.
const std::vector<std::string>& default_test_docs();
const std::vector<std::string>& default_dev_docs();

// Writes a split config naming the generator's held-out documents.
void write_split_config(const std::string& path, const Options& options = {});

}  // namespace synth
