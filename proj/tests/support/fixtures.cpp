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

#include "fixtures.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <mutex>

namespace fixtures {

namespace fs = std::filesystem;

namespace {

struct ScratchRoot {
  fs::path path;
  ScratchRoot() {
    path = fs::temp_directory_path() / ("framekit_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchRoot() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

ScratchRoot& root() {
  static ScratchRoot r;
  return r;
}

}  // namespace

std::string scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path p = root().path / (tag + "_" + std::to_string(counter++));
  fs::create_directories(p);
  return p.string();
}

const SyntheticCorpus& synthetic() {
  static SyntheticCorpus corpus = [] {
    SyntheticCorpus c;
    c.framenet_dir = scratch_dir("framenet");
    c.split_path = (fs::path(c.framenet_dir) / "split.json").string();
    c.cache_dir = scratch_dir("cache");
    c.tally = synth::write_corpus(c.framenet_dir);
    synth::write_split_config(c.split_path);
    c.ingest = framekit::ingest_corpus(c.framenet_dir, c.split_path, c.cache_dir);
    c.cache = framekit::load_corpus_cache(c.cache_dir);
    return c;
  }();
  return corpus;
}

framekit::FrameDef giving_frame() {
  using framekit::Coreness;
  framekit::FrameDef f;
  f.name = "Giving";
  f.definition = "A Donor transfers a Theme to a Recipient.";
  f.fe_defs = {{"Donor", "Donor", Coreness::Core, "The person that begins in possession of the Theme.", {}},
               {"Recipient", "Rec", Coreness::Core, "The entity that ends up in possession of the Theme.", {}},
               {"Theme", "Thm", Coreness::Core, "The object that changes ownership.", {}},
               {"Place", "Place", Coreness::Peripheral, "Where the giving takes place.", {}}};
  f.lexical_units = {{"contribution", "n", "Giving"}, {"give", "v", "Giving"}};
  return f;
}

framekit::FrameInstance donation_instance() {
  framekit::FrameInstance inst;
  inst.instance_id = "donation-1";
  inst.sentence_id = "s1";
  inst.document_id = "fixture";
  inst.sentence_text = "Your contribution to Goodwill will mean more than you may know.";
  inst.frame_name = "Giving";
  inst.lu_name = "contribution.n";
  inst.target = {framekit::make_span(inst.sentence_text, 5, 17)};
  inst.fes = {{"Donor", framekit::make_span(inst.sentence_text, 0, 4), false},
              {"Recipient", framekit::make_span(inst.sentence_text, 18, 29), false}};
  return inst;
}

std::string source_path(const std::string& relative) {
  return (fs::path(FRAMEKIT_SOURCE_DIR) / relative).string();
}

}  // namespace fixtures
