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


#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <initializer_list>
#include <sstream>

#include "fixtures.hpp"
#include "framekit/cli.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace framekit;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::initializer_list<std::string> args, const std::string& stdin_text = "") {
  std::vector<std::string> storage = {"framekit"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : storage) argv.push_back(a.c_str());
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  auto* old = std::cin.rdbuf(in.rdbuf());
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  std::cin.rdbuf(old);
  return {code, out.str(), err.str()};
}

const std::string& cache() { return fixtures::synthetic().cache_dir; }

}  // namespace

TEST(Cli, IngestBadDirectoryFails) {
  std::string dir = fixtures::scratch_dir("cli_bad");
  auto r = run({"--cache", dir + "/c", "ingest", "--framenet", "/nonexistent/fn", "--split",
                fixtures::source_path("config/split_fn17.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("MissingDirectory"), std::string::npos);
}

TEST(Cli, IngestPrintsCountsAndJson) {
  const auto& s = fixtures::synthetic();
  std::string dir = fixtures::scratch_dir("cli_ingest");
  auto r = run({"--cache", dir, "ingest", "--framenet", s.framenet_dir, "--split", s.split_path});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto& t = s.tally.parts.at("train");
  EXPECT_NE(r.out.find("train: documents " + std::to_string(t.documents) + ", sentences " +
                       std::to_string(t.sentences) + ", frame instances " + std::to_string(t.instances)),
            std::string::npos);
  auto j = run({"--cache", dir, "stats", "--json"});
  ASSERT_EQ(j.code, 0);
  auto parsed = nlohmann::json::parse(j.out);
  EXPECT_EQ(parsed["test"]["frame_elements"].get<std::size_t>(), s.tally.parts.at("test").fes);
  EXPECT_EQ(parsed["corpus_checksum"].get<std::string>(), s.cache.checksum);
}

TEST(Cli, UnknownFlagIsUsageError) {
  auto r = run({"stats", "--bogus"});
  EXPECT_NE(r.code, 0);
}

TEST(Cli, EncodeAndDecode) {
  const auto& inst = fixtures::synthetic().cache.test.instances.front();
  auto e = run({"--cache", cache(), "encode", "--instance", inst.instance_id});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("{"), std::string::npos);
  auto d = run({"--cache", cache(), "decode", "--frame", inst.frame_name, "--sentence", inst.sentence_text},
               "```json\n{\"Nope\": \"x\"}\n```");
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.out.find("UnknownFe"), std::string::npos);
}

TEST(Cli, PromptShowsMarkedSentence) {
  const auto& inst = fixtures::synthetic().cache.test.instances.front();
  auto r = run({"--cache", cache(), "prompt", "--instance", inst.instance_id});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(mark_target(inst.sentence_text, inst.target).marked), std::string::npos);
}

TEST(Cli, SubsampleManifestAndSeedReproducible) {
  std::string dir = fixtures::scratch_dir("cli_sub");
  auto a = run({"--cache", cache(), "--seed", "0", "subsample", "--strategy", "diverse", "--k", "5", "--manifest",
                dir + "/a.json"});
  auto b = run({"--cache", cache(), "--seed", "0", "subsample", "--strategy", "diverse", "--k", "5", "--manifest",
                dir + "/b.json"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(read_file(dir + "/a.json"), read_file(dir + "/b.json"));
  auto m = nlohmann::json::parse(read_file(dir + "/a.json"));
  double frac = m["fraction"].get<double>();
  EXPECT_GT(frac, 0.10);
  EXPECT_LT(frac, 0.20);
}

TEST(Cli, ExportFinetuneLineCount) {
  std::string dir = fixtures::scratch_dir("cli_export");
  auto r = run({"--cache", cache(), "export-finetune", "--file", dir + "/ft.jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string text = read_file(dir + "/ft.jsonl");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            fixtures::synthetic().cache.train.instances.size());
}

TEST(Cli, RunEvalOracleEmptyAccuracyIsZeroFeShare) {
  std::string dir = fixtures::scratch_dir("cli_empty");
  auto r = run({"--cache", cache(), "--backend", "oracle:empty", "--out", dir, "run-eval"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rep = nlohmann::json::parse(read_file(dir + "/report.json"));
  const auto& test = fixtures::synthetic().cache.test.instances;
  std::size_t zero = 0;
  for (const auto& inst : test) zero += inst.fes.empty();
  EXPECT_DOUBLE_EQ(rep["headline"]["precision"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(rep["headline"]["recall"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(rep["headline"]["accuracy"].get<double>(),
                   static_cast<double>(zero) / static_cast<double>(test.size()));
}

TEST(Cli, RunEvalWritesConfigAndReplaysIdentically) {
  std::string a = fixtures::scratch_dir("cli_run_a"), b = fixtures::scratch_dir("cli_run_b");
  auto r1 = run({"--cache", cache(), "--backend", "oracle:corrupt", "--out", a, "run-eval", "--limit", "500"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  for (const char* f : {"run_config.json", "completions.jsonl", "predictions.jsonl", "report.json", "per_frame.csv"})
    EXPECT_TRUE(fs::exists(fs::path(a) / f)) << f;
  auto r2 = run({"--cache", cache(), "--backend", "replay", "--out", b, "run-eval", "--replay",
                 a + "/completions.jsonl", "--limit", "500"});
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(read_file(a + "/report.json"), read_file(b + "/report.json"));
  auto cfg = RunConfig::load(b + "/run_config.json");
  EXPECT_EQ(cfg.backend, "replay");
  EXPECT_EQ(cfg.limit, 500u);
}

TEST(Cli, ReplayMissCountsFailures) {
  std::string a = fixtures::scratch_dir("cli_miss_a"), b = fixtures::scratch_dir("cli_miss_b");
  ASSERT_EQ(run({"--cache", cache(), "--out", a, "run-eval", "--limit", "10"}).code, 0);
  auto r = run({"--cache", cache(), "--backend", "replay", "--out", b, "run-eval", "--replay",
                a + "/completions.jsonl", "--limit", "20"});
  EXPECT_EQ(r.code, 3);
  auto rep = nlohmann::json::parse(read_file(b + "/report.json"));
  EXPECT_EQ(rep["failures"]["by_kind"]["ReplayMiss"].get<std::size_t>(), 10u);
}

TEST(Cli, FrameIdGoldSupportOracle) {
  std::string dir = fixtures::scratch_dir("cli_fid");
  auto r = run({"--cache", cache(), "--backend", "oracle:gold-support", "--seed", "0", "--out", dir, "frame-id"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto s = nlohmann::json::parse(read_file(dir + "/summary.json"));
  EXPECT_DOUBLE_EQ(s["without_lexicon_filter"]["acc_all"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(s["without_lexicon_filter"]["acc_ambiguous"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(s["with_lexicon_filter"]["acc_all"].get<double>(), 1.0);
}

TEST(Cli, CorrelateMatchesOracle) {
  std::string dir = fixtures::scratch_dir("cli_corr");
  write_file(dir + "/models.csv",
             "model,size_b,f1,ifeval,bbh,gpqa,musr,mmlu_pro\n"
             "a,7,0.52,0.41,0.3,0.2,0.35,0.3\n"
             "b,8,0.60,0.47,0.32,0.25,0.40,0.33\n"
             "c,14,0.57,0.52,0.4,0.27,0.38,0.41\n"
             "d,32,0.71,0.61,0.5,0.3,0.45,0.5\n"
             "e,70,0.69,0.66,0.55,0.33,0.44,0.55\n");
  auto r = run({"correlate", "--csv", dir + "/models.csv", "--benchmark", "musr"});
  ASSERT_EQ(r.code, 0) << r.err;
  double want = oracle::partial_correlation_normal_equations({0.35, 0.40, 0.38, 0.45, 0.44},
                                                             {0.52, 0.60, 0.57, 0.71, 0.69}, {7, 8, 14, 32, 70});
  EXPECT_NEAR(std::stod(r.out), want, 1e-9);
}

TEST(Cli, ReportSummarizesRun) {
  std::string dir = fixtures::scratch_dir("cli_report");
  ASSERT_EQ(run({"--cache", cache(), "--out", dir, "run-eval", "--limit", "50"}).code, 0);
  auto r = run({"report", "--run", dir});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("All"), std::string::npos);
  EXPECT_NE(r.out.find("per-frame F1"), std::string::npos);
}

TEST(Cli, InvalidConfigRejectedBeforeSideEffects) {
  std::string dir = fixtures::scratch_dir("cli_cfg");
  write_file(dir + "/cfg.json", R"({"backend": "oracle:nonsense"})");
  auto r = run({"--config", dir + "/cfg.json", "--cache", cache(), "--out", dir + "/out", "run-eval"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir + "/out"));
  write_file(dir + "/cfg2.json", R"({"bogus_key": 1})");
  EXPECT_THROW(RunConfig::load(dir + "/cfg2.json"), Error);
}

TEST(RunConfigJson, RoundTrip) {
  RunConfig c;
  c.seed = 42;
  c.format = RepresentationFormat::XmlTags;
  c.backend = "http";
  c.endpoint.base_url = "http://localhost:8000/v1";
  c.endpoint.model_name = "m";
  c.tie_break = "most-fes";
  RunConfig back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_NO_THROW(back.validate());
}
