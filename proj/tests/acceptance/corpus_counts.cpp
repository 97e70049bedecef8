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


// Corpus regression against the licensed FrameNet 1.7 release. Exits 77
// (skipped) unless FRAMENET_DIR names the data directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fixtures.hpp"
#include "framekit/cli.hpp"

int main() {
  const char* dir = std::getenv("FRAMENET_DIR");
  if (dir == nullptr || *dir == '\0') {
    std::printf("SKIP  corpus regression: FRAMENET_DIR not set\n");
    return 77;
  }
  struct Want {
    const char* what;
    std::size_t got;
    double want;
  };
  try {
    auto t0 = std::chrono::steady_clock::now();
    framekit::IngestSummary s = framekit::ingest_corpus(dir, fixtures::source_path("config/split_fn17.json"),
                                                        fixtures::scratch_dir("corpus_counts"));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Want rows[] = {{"train sentences", s.train.sentences, 3353}, {"train frames", s.train.instances, 19391},
                   {"train FEs", s.train.frame_elements, 34219}, {"test sentences", s.test.sentences, 1247},
                   {"test frames", s.test.instances, 6714},      {"test FEs", s.test.frame_elements, 11302}};
    bool ok = secs < 60;
    for (const auto& r : rows) {
      double rel = (static_cast<double>(r.got) - r.want) / r.want;
      bool row_ok = std::fabs(rel) <= 0.01;
      ok = ok && row_ok;
      std::printf("%s  %-16s %6zu (expected %.0f, %+.2f%%)\n", row_ok ? "PASS" : "FAIL", r.what, r.got, r.want,
                  100 * rel);
    }
    std::printf("%s  runtime %.1f s\n", secs < 60 ? "PASS" : "FAIL", secs);
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("FAIL  corpus regression: %s\n", e.what());
    return 1;
  }
}
