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

// Writes a synthetic FrameNet-layout corpus plus a matching split config.

#include <iostream>

#include "CLI11.hpp"
#include "synthetic_framenet.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic FrameNet-layout corpus"};
  std::string out_dir;
  std::string split_path;
  synth::Options opt;
  app.add_option("out", out_dir, "Output directory")->required();
  app.add_option("--split", split_path, "Also write a split config JSON here");
  app.add_option("--seed", opt.seed, "Generator seed");
  app.add_option("--frames", opt.frame_count, "Number of frames");
  app.add_option("--train-docs", opt.train_doc_count, "Number of training documents");
  app.add_option("--zipf", opt.zipf_exponent, "Frame frequency skew");
  CLI11_PARSE(app, argc, argv);

  try {
    synth::Tally t = synth::write_corpus(out_dir, opt);
    if (!split_path.empty()) synth::write_split_config(split_path, opt);
    std::cout << "frames " << t.frames << "\n";
    for (const auto& [part, p] : t.parts) {
      std::cout << part << ": documents " << p.documents << ", sentences " << p.sentences << ", instances "
                << p.instances << ", fes " << p.fes << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
