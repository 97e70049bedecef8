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

// Shared test fixtures: a per-process scratch directory, the synthetic
// corpus with its ingested cache, and small hand-built frames.

#pragma once

#include <string>

#include "framekit/cli.hpp"
#include "framekit/corpus.hpp"
#include "synthetic_framenet.hpp"

namespace fixtures {

// Fresh directory under the process scratch root; removed at exit.
std::string scratch_dir(const std::string& tag);

struct SyntheticCorpus {
  std::string framenet_dir;
  std::string split_path;
  std::string cache_dir;
  synth::Tally tally;
  framekit::IngestSummary ingest;
  framekit::CorpusCache cache;
};

// Generated and ingested once per process.
const SyntheticCorpus& synthetic();

// Giving frame with FEs Donor, Recipient, Theme, Place (in that order).
framekit::FrameDef giving_frame();

// The Donation instance: "Your contribution to Goodwill will mean more than
// you may know." with Donor "Your" and Recipient "to Goodwill".
framekit::FrameInstance donation_instance();

// Path to a file shipped in the source tree.
std::string source_path(const std::string& relative);

}  // namespace fixtures
