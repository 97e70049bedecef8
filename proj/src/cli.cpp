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

#include "framekit/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace framekit {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// --- run config ---------------------------------------------------------------

namespace {

const std::set<std::string> kConfigKeys = {
    "framenet_dir", "split_config", "corpus_cache", "eval_file", "format", "backend",
    "replay_path", "endpoint", "retry", "exemplars", "templates_dir", "seed", "out_dir",
    "max_in_flight", "tie_break", "limit"};

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config field '") + key + "': " + e.what());
  }
}

bool is_oracle_spec(const std::string& spec) { return spec.rfind("oracle:", 0) == 0; }

}  // namespace

RunConfig RunConfig::from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::InvalidConfig, "config is not a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key)) throw Error(ErrorKind::InvalidConfig, "unknown config field '" + key + "'");
  }
  RunConfig c;
  read_field(j, "framenet_dir", c.framenet_dir);
  read_field(j, "split_config", c.split_config);
  read_field(j, "corpus_cache", c.corpus_cache);
  read_field(j, "eval_file", c.eval_file);
  if (j.contains("format")) {
    std::string f;
    read_field(j, "format", f);
    auto parsed = parse_format(f);
    if (!parsed) throw Error(ErrorKind::InvalidConfig, "unknown format '" + f + "'");
    c.format = *parsed;
  }
  read_field(j, "backend", c.backend);
  read_field(j, "replay_path", c.replay_path);
  if (j.contains("endpoint")) {
    const json& e = j["endpoint"];
    if (!e.is_object()) throw Error(ErrorKind::InvalidConfig, "endpoint must be an object");
    read_field(e, "base_url", c.endpoint.base_url);
    read_field(e, "model_name", c.endpoint.model_name);
    read_field(e, "temperature", c.endpoint.temperature);
    read_field(e, "max_output_tokens", c.endpoint.max_output_tokens);
    read_field(e, "api_key_env", c.endpoint.api_key_env);
    read_field(e, "timeout_seconds", c.endpoint.timeout_seconds);
  }
  if (j.contains("retry")) {
    const json& r = j["retry"];
    if (!r.is_object()) throw Error(ErrorKind::InvalidConfig, "retry must be an object");
    read_field(r, "max_attempts", c.retry.max_attempts);
    read_field(r, "base_delay_seconds", c.retry.base_delay_seconds);
    read_field(r, "jitter", c.retry.jitter);
  }
  if (j.contains("exemplars")) {
    const json& x = j["exemplars"];
    if (!x.is_object()) throw Error(ErrorKind::InvalidConfig, "exemplars must be an object");
    read_field(x, "max_frame_exemplars", c.exemplars.max_frame_exemplars);
    read_field(x, "max_fe_examples", c.exemplars.max_fe_examples);
    read_field(x, "include", c.exemplars.include_exemplars);
  }
  read_field(j, "templates_dir", c.templates_dir);
  read_field(j, "seed", c.seed);
  read_field(j, "out_dir", c.out_dir);
  read_field(j, "max_in_flight", c.max_in_flight);
  read_field(j, "tie_break", c.tie_break);
  read_field(j, "limit", c.limit);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  try {
    return from_json(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoError) throw Error(ErrorKind::InvalidConfig, e.what());
    throw;
  }
}

std::string RunConfig::to_json() const {
  ordered_json j;
  j["framenet_dir"] = framenet_dir;
  j["split_config"] = split_config;
  j["corpus_cache"] = corpus_cache;
  j["eval_file"] = eval_file;
  j["format"] = format_name(format);
  j["backend"] = backend;
  j["replay_path"] = replay_path;
  j["endpoint"] = {{"base_url", endpoint.base_url},
                   {"model_name", endpoint.model_name},
                   {"temperature", endpoint.temperature},
                   {"max_output_tokens", endpoint.max_output_tokens},
                   {"api_key_env", endpoint.api_key_env},
                   {"timeout_seconds", endpoint.timeout_seconds}};
  j["retry"] = {{"max_attempts", retry.max_attempts},
                {"base_delay_seconds", retry.base_delay_seconds},
                {"jitter", retry.jitter}};
  j["exemplars"] = {{"max_frame_exemplars", exemplars.max_frame_exemplars},
                    {"max_fe_examples", exemplars.max_fe_examples},
                    {"include", exemplars.include_exemplars}};
  j["templates_dir"] = templates_dir;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["max_in_flight"] = max_in_flight;
  j["tie_break"] = tie_break;
  j["limit"] = limit;
  return j.dump(2) + "\n";
}

void RunConfig::validate() const {
  if (backend == "http") {
    validate_endpoint(endpoint);
    if (retry.max_attempts < 1) throw Error(ErrorKind::InvalidConfig, "retry.max_attempts must be >= 1");
    if (retry.base_delay_seconds < 0) throw Error(ErrorKind::InvalidConfig, "retry.base_delay_seconds must be >= 0");
  } else if (backend == "replay") {
    if (replay_path.empty()) throw Error(ErrorKind::InvalidConfig, "replay backend needs replay_path");
    if (!fs::is_regular_file(replay_path))
      throw Error(ErrorKind::InvalidConfig, "replay file not found: " + replay_path);
  } else if (is_oracle_spec(backend)) {
    if (!parse_oracle_mode(backend.substr(7)))
      throw Error(ErrorKind::InvalidConfig, "unknown oracle mode in '" + backend + "'");
  } else {
    throw Error(ErrorKind::InvalidConfig, "backend must be http, replay or oracle:<mode>, got '" + backend + "'");
  }
  if (max_in_flight < 1) throw Error(ErrorKind::InvalidConfig, "max_in_flight must be >= 1");
  if (!parse_tie_break(tie_break)) throw Error(ErrorKind::InvalidConfig, "unknown tie_break '" + tie_break + "'");
  if (!templates_dir.empty() && !fs::is_directory(templates_dir))
    throw Error(ErrorKind::InvalidConfig, "templates_dir not found: " + templates_dir);
  if (!eval_file.empty() && !fs::is_regular_file(eval_file))
    throw Error(ErrorKind::InvalidConfig, "eval_file not found: " + eval_file);
}

// --- corpus cache ---------------------------------------------------------------

namespace {

ordered_json stats_json(const CorpusStats& s) {
  ordered_json j;
  j["documents"] = s.documents;
  j["sentences"] = s.sentences;
  j["frame_instances"] = s.instances;
  j["frame_elements"] = s.frame_elements;
  j["distinct_frames"] = s.distinct_frames;
  return j;
}

ordered_json load_report_json(const LoadReport& r) {
  ordered_json j;
  j["dropped_unlabeled"] = r.dropped_unlabeled;
  j["dropped_unknown_frame"] = r.dropped_unknown_frame;
  j["skipped_offsets"] = r.skipped_offsets;
  j["null_instantiations"] = r.null_instantiations;
  j["dropped_overlapping_fes"] = r.dropped_overlapping_fes;
  j["unresolved_lexical_units"] = r.unresolved_lexical_units;
  j["malformed_records"] = r.malformed_records;
  j["warning_count"] = r.warnings.size();
  return j;
}

std::string interchange_text(const std::vector<FrameInstance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    out += to_interchange_line(inst);
    out += '\n';
  }
  return out;
}

std::string cache_checksum(const std::string& lexicon_json, const std::string& train, const std::string& test) {
  return sha256_hex(sha256_hex(lexicon_json) + sha256_hex(train) + sha256_hex(test));
}

}  // namespace

IngestSummary ingest_corpus(const std::string& framenet_dir, const std::string& split_config,
                            const std::string& cache_dir) {
  const auto started = std::chrono::steady_clock::now();
  SplitConfig split = load_split_config(split_config);
  IngestSummary summary;
  auto lexicon = std::make_shared<const Lexicon>(load_lexicon(framenet_dir, &summary.report));
  auto docs = load_fulltext(framenet_dir, *lexicon, &summary.report);
  SplitResult parts = split_corpus(docs, split, lexicon);
  summary.train = corpus_stats(parts.train.instances);
  summary.test = corpus_stats(parts.test.instances);
  summary.train.documents = parts.train.documents.size();
  summary.test.documents = parts.test.documents.size();
  summary.excluded_documents = parts.excluded_documents;
  summary.missing_documents = parts.missing_documents;

  fs::create_directories(cache_dir);
  const fs::path dir(cache_dir);
  const std::string lex = lexicon_to_json(*lexicon);
  const std::string train = interchange_text(parts.train.instances);
  const std::string test = interchange_text(parts.test.instances);
  summary.checksum = cache_checksum(lex, train, test);
  write_file((dir / "lexicon.json").string(), lex);
  write_file((dir / "train.jsonl").string(), train);
  write_file((dir / "test.jsonl").string(), test);

  ordered_json sj;
  sj["train_documents"] = parts.train.documents;
  sj["test_documents"] = parts.test.documents;
  sj["excluded_documents"] = parts.excluded_documents;
  sj["missing_documents"] = parts.missing_documents;
  write_file((dir / "split.json").string(), sj.dump(2) + "\n");

  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file((dir / "stats.json").string(), ingest_summary_json(summary));
  return summary;
}

std::string ingest_summary_json(const IngestSummary& s) {
  ordered_json j;
  j["toolkit_version"] = kVersion;
  j["corpus_checksum"] = s.checksum;
  j["train"] = stats_json(s.train);
  j["test"] = stats_json(s.test);
  j["load_report"] = load_report_json(s.report);
  j["excluded_documents"] = s.excluded_documents.size();
  j["missing_documents"] = s.missing_documents;
  return j.dump(2) + "\n";
}

CorpusCache load_corpus_cache(const std::string& cache_dir) {
  const fs::path dir(cache_dir);
  for (const char* name : {"lexicon.json", "train.jsonl", "test.jsonl"}) {
    if (!fs::is_regular_file(dir / name))
      throw Error(ErrorKind::MissingDirectory, (dir / name).string() + " not found; run ingest first");
  }
  CorpusCache cache;
  const std::string lex = read_file((dir / "lexicon.json").string());
  const std::string train = read_file((dir / "train.jsonl").string());
  const std::string test = read_file((dir / "test.jsonl").string());
  cache.lexicon = std::make_shared<const Lexicon>(lexicon_from_json(lex));
  cache.train = parse_interchange(train, cache.lexicon);
  cache.train.label = PartLabel::Train;
  cache.test = parse_interchange(test, cache.lexicon);
  cache.test.label = PartLabel::Test;
  cache.checksum = cache_checksum(lex, train, test);
  return cache;
}

// --- backends ---------------------------------------------------------------------

std::shared_ptr<Backend> make_backend(const RunConfig& config, std::shared_ptr<const Lexicon> lexicon,
                                      const std::vector<FrameInstance>& gold) {
  if (config.backend == "http") {
    RetryPolicy retry = config.retry;
    retry.jitter_seed = derive_seed(config.seed, 0x6a177e5);
    return std::make_shared<HttpBackend>(config.endpoint, retry);
  }
  if (config.backend == "replay") {
    std::optional<std::string> model;
    std::optional<double> temperature;
    if (!config.endpoint.model_name.empty()) {
      model = config.endpoint.model_name;
      temperature = config.endpoint.temperature;
    }
    return std::make_shared<ReplayBackend>(config.replay_path, model, temperature);
  }
  if (is_oracle_spec(config.backend)) {
    auto mode = parse_oracle_mode(config.backend.substr(7));
    if (!mode) throw Error(ErrorKind::InvalidConfig, "unknown oracle mode in '" + config.backend + "'");
    return std::make_shared<OracleBackend>(*mode, std::move(lexicon), gold);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown backend '" + config.backend + "'");
}

// --- run-eval ---------------------------------------------------------------------

namespace {

struct EvalSet {
  CorpusCache cache;
  CorpusPart part;
  std::string name;
  std::size_t skipped = 0;
};

EvalSet select_instances(const RunConfig& config) {
  if (config.corpus_cache.empty()) throw Error(ErrorKind::InvalidConfig, "corpus_cache is required");
  EvalSet set{load_corpus_cache(config.corpus_cache), {}, "test", 0};
  CorpusPart source = set.cache.test;
  if (!config.eval_file.empty()) {
    source = load_interchange(config.eval_file, set.cache.lexicon);
    set.name = fs::path(config.eval_file).filename().string();
  }
  set.part.label = source.label;
  set.part.documents = source.documents;
  set.part.lexicon = set.cache.lexicon;
  for (auto& inst : source.instances) {
    if (config.limit && set.part.instances.size() >= config.limit) break;
    if (inst.undefined_frame || !set.cache.lexicon->find_frame(inst.frame_name)) {
      ++set.skipped;
      continue;
    }
    set.part.instances.push_back(std::move(inst));
  }
  return set;
}

PromptTemplates templates_for(const RunConfig& config) {
  return config.templates_dir.empty() ? PromptTemplates::defaults() : PromptTemplates::load_dir(config.templates_dir);
}

ordered_json brief(const EvalReport& r) {
  ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["accuracy"] = r.accuracy;
  j["n_instances"] = r.n_instances;
  j["tp"] = r.totals.tp;
  j["fp"] = r.totals.fp;
  j["fn"] = r.totals.fn;
  return j;
}

void prepare_out_dir(const RunConfig& config) {
  if (config.out_dir.empty()) throw Error(ErrorKind::InvalidConfig, "out_dir is required");
  fs::create_directories(config.out_dir);
  write_file((fs::path(config.out_dir) / "run_config.json").string(), config.to_json());
}

}  // namespace

EvalRun run_eval(const RunConfig& config, std::shared_ptr<Backend> backend) {
  config.validate();
  EvalSet set = select_instances(config);
  if (set.part.instances.empty()) throw Error(ErrorKind::EmptyScoreList, "no instances to evaluate");
  prepare_out_dir(config);
  const fs::path out(config.out_dir);

  if (!backend) backend = make_backend(config, set.cache.lexicon, set.part.instances);
  auto cache = std::make_shared<CacheStore>((out / "completions.jsonl").string());
  LlmClient client(backend, cache);
  const PromptTemplates templates = templates_for(config);

  const auto& instances = set.part.instances;
  std::vector<PromptRecord> prompts;
  prompts.reserve(instances.size());
  for (const auto& inst : instances) {
    prompts.push_back(build_inference_prompt_for(inst, *set.cache.lexicon->find_frame(inst.frame_name),
                                                 config.format, config.exemplars, templates));
  }
  auto items = client.complete_batch(prompts, config.max_in_flight);

  EvalRun run;
  std::vector<InstanceScore> scores;
  scores.reserve(instances.size());
  std::string predictions;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const FrameInstance& inst = instances[i];
    const FrameDef& frame = *set.cache.lexicon->find_frame(inst.frame_name);
    PredictionSet pred;
    ordered_json line;
    line["instance_id"] = inst.instance_id;
    line["frame"] = inst.frame_name;
    if (items[i].ok()) {
      pred = decode(config.format, items[i].completion->text, frame, inst.sentence_text);
    } else {
      ++run.failed_requests;
      ++run.failures_by_kind[to_string(*items[i].error_kind)];
      line["error"] = std::string(to_string(*items[i].error_kind)) + ": " + items[i].error_message;
    }
    ordered_json entries = ordered_json::array();
    for (const auto& e : pred.entries) entries.push_back({{"fe", e.fe_name}, {"text", e.text}, {"known", e.known}});
    line["predictions"] = std::move(entries);
    ordered_json warns = ordered_json::array();
    for (const auto& w : pred.warnings) warns.push_back(warning_name(w.kind));
    line["warnings"] = std::move(warns);
    predictions += line.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    scores.push_back(score_instance(inst, pred));
  }

  run.headline = aggregate(scores);
  run.splits = split_report(scores, unseen_labels(set.cache.train, set.part));
  const Quartiles q = f1_quartiles(per_frame_distribution(run.headline));

  ordered_json report;
  report["toolkit_version"] = kVersion;
  report["corpus_checksum"] = set.cache.checksum;
  report["evaluated"] = set.name;
  report["format"] = format_name(config.format);
  report["model"] = backend->model_name();
  report["matching"] = {{"text", "whitespace-normalized, case-sensitive"},
                        {"averaging", "micro"},
                        {"accuracy", "instance exact match"}};
  report["caveats"] = {{"cross_system_comparison", true},
                       {"note", "other systems may use a different span matching policy"}};
  report["n_instances"] = run.headline.n_instances;
  report["skipped_instances"] = set.skipped;
  report["headline"] = ordered_json::parse(report_json_text(run.headline, -1));
  ordered_json splits = ordered_json::object();
  for (const auto& [label, r] : run.splits) splits[label] = brief(r);
  report["splits"] = std::move(splits);
  report["per_frame_f1_quartiles"] = {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
  ordered_json by_kind = ordered_json::object();
  for (const auto& [k, v] : run.failures_by_kind) by_kind[k] = v;
  report["failures"] = {{"count", run.failed_requests}, {"by_kind", std::move(by_kind)}};

  run.report_json = report.dump(2) + "\n";
  run.per_frame_csv = per_frame_csv(run.headline);
  write_file((out / "report.json").string(), run.report_json);
  write_file((out / "per_frame.csv").string(), run.per_frame_csv);
  write_file((out / "predictions.jsonl").string(), predictions);
  return run;
}

// --- frame-id ---------------------------------------------------------------------

FrameIdRun run_frame_id(const RunConfig& config, std::shared_ptr<Backend> backend) {
  config.validate();
  EvalSet set = select_instances(config);
  prepare_out_dir(config);
  const fs::path out(config.out_dir);
  const Lexicon& lexicon = *set.cache.lexicon;

  if (!backend) backend = make_backend(config, set.cache.lexicon, set.part.instances);
  auto cache = std::make_shared<CacheStore>((out / "completions.jsonl").string());
  LlmClient client(backend, cache);
  const PromptTemplates templates = templates_for(config);
  const TieBreak tie_break = *parse_tie_break(config.tie_break);

  const auto& instances = set.part.instances;
  std::vector<CandidateSet> candidates;
  std::vector<PromptRecord> prompts;
  std::vector<std::pair<std::size_t, std::string>> owners;  // prompt -> (instance, frame)
  for (std::size_t i = 0; i < instances.size(); ++i) {
    candidates.push_back(candidates_for_instance(lexicon, instances[i]));
    for (const auto& name : candidates.back().candidates) {
      prompts.push_back(build_inference_prompt_for(instances[i], *lexicon.find_frame(name), config.format,
                                                   config.exemplars, templates));
      owners.emplace_back(i, name);
    }
  }
  auto items = client.complete_batch(prompts, config.max_in_flight);

  // decoded predictions (or the failure message) per instance and frame
  std::vector<std::map<std::string, std::pair<PredictionSet, std::string>>> decoded(instances.size());
  for (std::size_t p = 0; p < prompts.size(); ++p) {
    const auto& [i, name] = owners[p];
    if (items[p].ok()) {
      decoded[i][name] = {decode(config.format, items[p].completion->text, *lexicon.find_frame(name),
                                 instances[i].sentence_text),
                          ""};
    } else {
      decoded[i][name] = {PredictionSet{}, items[p].error_message};
    }
  }

  FrameArbiter arbiter;
  FrameIdRun run;
  std::string lines, lines_lf;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const FrameInstance& inst = instances[i];
    FeExtractor extractor = [&, i](const std::string& frame) -> PredictionSet {
      const auto& [pred, failure] = decoded[i].at(frame);
      if (!failure.empty()) throw Error(ErrorKind::TransportError, failure);
      return pred;
    };
    if (tie_break == TieBreak::Arbiter) {
      arbiter = [&, i](const std::vector<std::string>& supported) {
        PromptRecord ask;
        ask.system = "You are an expert in frame semantics.";
        ask.user = "Which frame does the **marked** target evoke?\n" +
                   mark_target(instances[i].sentence_text, instances[i].target).marked + "\nCandidates:\n";
        for (const auto& s : supported) ask.user += "- " + s + "\n";
        ask.user += "Answer with the frame name only.";
        ask.meta.instance_id = instances[i].instance_id;
        ask.meta.sentence_id = instances[i].sentence_id;
        ask.meta.format = config.format;
        std::string answer = trim(client.complete(ask).text);
        for (const auto& s : supported) {
          if (answer.find(s) != std::string::npos) return s;
        }
        return supported.front();
      };
    }
    const std::uint64_t seed = derive_seed(config.seed, i);
    FrameIdOptions plain{tie_break, arbiter, false};
    FrameIdOptions filtered{tie_break, arbiter, true};
    if (candidates[i].candidates.empty()) ++run.skipped_no_candidates;
    run.results_without_filter.push_back(identify_frame(candidates[i], extractor, seed, plain, inst.instance_id));
    run.results_with_filter.push_back(identify_frame(candidates[i], extractor, seed, filtered, inst.instance_id));
    run.gold_frames.push_back(inst.frame_name);
    lines += frame_id_result_json(run.results_without_filter.back(), inst.frame_name) + "\n";
    lines_lf += frame_id_result_json(run.results_with_filter.back(), inst.frame_name) + "\n";
  }
  run.without_filter = evaluate_frame_id(run.results_without_filter, run.gold_frames);
  run.with_filter = evaluate_frame_id(run.results_with_filter, run.gold_frames);

  ordered_json summary;
  summary["toolkit_version"] = kVersion;
  summary["corpus_checksum"] = set.cache.checksum;
  summary["model"] = backend->model_name();
  summary["tie_break"] = tie_break_name(tie_break);
  summary["seed"] = config.seed;
  summary["targets"] = instances.size();
  summary["skipped_no_candidates"] = run.skipped_no_candidates;
  summary["without_lexicon_filter"] = ordered_json::parse(frame_id_summary_json(run.without_filter));
  summary["with_lexicon_filter"] = ordered_json::parse(frame_id_summary_json(run.with_filter));
  run.summary_json = summary.dump(2) + "\n";
  write_file((out / "results.jsonl").string(), lines);
  write_file((out / "results_lf.jsonl").string(), lines_lf);
  write_file((out / "summary.json").string(), run.summary_json);
  return run;
}

// --- command line -----------------------------------------------------------------

namespace {

struct GlobalFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string format;
  std::string backend;
  std::size_t max_in_flight = 0;
  std::string out_dir;
  std::string cache;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mif_opt = nullptr;
};

RunConfig resolve_config(const GlobalFlags& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : RunConfig::load(g.config_path);
  if (g.seed_opt && g.seed_opt->count()) c.seed = g.seed;
  if (!g.format.empty()) {
    auto f = parse_format(g.format);
    if (!f) throw Error(ErrorKind::InvalidConfig, "unknown format '" + g.format + "'");
    c.format = *f;
  }
  if (!g.backend.empty()) c.backend = g.backend;
  if (g.mif_opt && g.mif_opt->count()) c.max_in_flight = g.max_in_flight;
  if (!g.out_dir.empty()) c.out_dir = g.out_dir;
  if (!g.cache.empty()) c.corpus_cache = g.cache;
  return c;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_stats_line(std::ostream& out, const char* label, const json& s) {
  out << label << ": documents " << s.value("documents", 0) << ", sentences " << s.value("sentences", 0)
      << ", frame instances " << s.value("frame_instances", 0) << ", frame elements "
      << s.value("frame_elements", 0) << "\n";
}

const FrameInstance* find_instance(const CorpusCache& cache, const std::string& id) {
  for (const auto* part : {&cache.train, &cache.test}) {
    for (const auto& inst : part->instances) {
      if (inst.instance_id == id) return &inst;
    }
  }
  return nullptr;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"framekit: frame-semantic argument identification toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config_path, "Run config JSON");
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--format", g.format, "markdown | xml | json-exist | json-complete");
  app.add_option("--backend", g.backend, "http | replay | oracle:<mode>");
  g.mif_opt = app.add_option("--max-in-flight", g.max_in_flight, "Concurrent requests");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--cache", g.cache, "Corpus cache directory");

  std::function<int()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load FrameNet, split and write the corpus cache");
  std::string fn_dir, split_path;
  bool as_json = false;
  ingest->add_option("--framenet", fn_dir, "FrameNet 1.7 directory");
  ingest->add_option("--split", split_path, "Split config JSON");
  ingest->add_flag("--json", as_json, "Print machine-readable stats");
  ingest->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      if (!fn_dir.empty()) c.framenet_dir = fn_dir;
      if (!split_path.empty()) c.split_config = split_path;
      if (c.framenet_dir.empty() || c.split_config.empty() || c.corpus_cache.empty())
        throw Error(ErrorKind::InvalidConfig, "ingest needs --framenet, --split and --cache");
      IngestSummary s = ingest_corpus(c.framenet_dir, c.split_config, c.corpus_cache);
      if (as_json) {
        out << ingest_summary_json(s);
      } else {
        json j = json::parse(ingest_summary_json(s));
        print_stats_line(out, "train", j["train"]);
        print_stats_line(out, "test", j["test"]);
        out << "null instantiations excluded: " << s.report.null_instantiations
            << ", overlapping FEs dropped: " << s.report.dropped_overlapping_fes
            << ", unknown-frame sets dropped: " << s.report.dropped_unknown_frame << "\n";
        if (!s.missing_documents.empty()) out << "missing documents: " << s.missing_documents.size() << "\n";
        out << "cache: " << c.corpus_cache << " (" << fmt(s.seconds, 2) << " s)\n";
      }
      return 0;
    };
  });

  // stats
  auto* stats = app.add_subcommand("stats", "Print corpus cache statistics");
  stats->add_flag("--json", as_json, "Print machine-readable stats");
  stats->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      if (c.corpus_cache.empty()) throw Error(ErrorKind::InvalidConfig, "stats needs --cache");
      const std::string path = (fs::path(c.corpus_cache) / "stats.json").string();
      if (!fs::is_regular_file(path)) throw Error(ErrorKind::MissingDirectory, path + " not found");
      std::string text = read_file(path);
      if (as_json) {
        out << text;
      } else {
        json j = json::parse(text);
        print_stats_line(out, "train", j["train"]);
        print_stats_line(out, "test", j["test"]);
      }
      return 0;
    };
  });

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "Encode gold frame elements of corpus instances");
  std::string instance_id, part_name = "test";
  std::size_t limit = 0;
  encode_cmd->add_option("--instance", instance_id, "Instance id");
  encode_cmd->add_option("--part", part_name, "train | test")->check(CLI::IsMember({"train", "test"}));
  encode_cmd->add_option("--limit", limit, "Maximum instances");
  encode_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      CorpusCache cache = load_corpus_cache(c.corpus_cache);
      std::vector<const FrameInstance*> chosen;
      if (!instance_id.empty()) {
        const FrameInstance* inst = find_instance(cache, instance_id);
        if (!inst) throw Error(ErrorKind::InvalidArgument, "no instance " + instance_id);
        chosen.push_back(inst);
      } else {
        const auto& src = part_name == "train" ? cache.train.instances : cache.test.instances;
        for (const auto& inst : src) {
          if (limit && chosen.size() >= limit) break;
          chosen.push_back(&inst);
        }
      }
      for (const auto* inst : chosen) {
        const FrameDef* frame = cache.lexicon->find_frame(inst->frame_name);
        if (!frame) continue;
        ordered_json j;
        j["instance_id"] = inst->instance_id;
        j["frame"] = inst->frame_name;
        j["format"] = format_name(c.format);
        j["encoding"] = encode(c.format, *inst, *frame);
        out << j.dump() << "\n";
      }
      return 0;
    };
  });

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "Decode a model response into frame elements");
  std::string frame_name, sentence, input_path;
  decode_cmd->add_option("--frame", frame_name, "Frame name")->required();
  decode_cmd->add_option("--sentence", sentence, "Original sentence")->required();
  decode_cmd->add_option("--input", input_path, "Response file (default: stdin)");
  decode_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      CorpusCache cache = load_corpus_cache(c.corpus_cache);
      const FrameDef* frame = cache.lexicon->find_frame(frame_name);
      if (!frame) throw Error(ErrorKind::InvalidArgument, "unknown frame " + frame_name);
      std::string raw = input_path.empty() || input_path == "-"
                            ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                            : read_file(input_path);
      PredictionSet pred = decode(c.format, raw, *frame, sentence);
      ordered_json j;
      ordered_json entries = ordered_json::array();
      for (const auto& e : pred.entries) entries.push_back({{"fe", e.fe_name}, {"text", e.text}, {"known", e.known}});
      j["predictions"] = std::move(entries);
      ordered_json warns = ordered_json::array();
      for (const auto& w : pred.warnings) warns.push_back({{"kind", warning_name(w.kind)}, {"detail", w.detail}});
      j["warnings"] = std::move(warns);
      out << j.dump(2) << "\n";
      return 0;
    };
  });

  // prompt
  auto* prompt_cmd = app.add_subcommand("prompt", "Show the inference prompt for an instance");
  std::string prompt_frame;
  prompt_cmd->add_option("--instance", instance_id, "Instance id")->required();
  prompt_cmd->add_option("--frame", prompt_frame, "Frame to prompt with (default: gold)");
  prompt_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      CorpusCache cache = load_corpus_cache(c.corpus_cache);
      const FrameInstance* inst = find_instance(cache, instance_id);
      if (!inst) throw Error(ErrorKind::InvalidArgument, "no instance " + instance_id);
      const FrameDef* frame = cache.lexicon->find_frame(prompt_frame.empty() ? inst->frame_name : prompt_frame);
      if (!frame) throw Error(ErrorKind::InvalidArgument, "unknown frame");
      PromptRecord rec = build_inference_prompt_for(*inst, *frame, c.format, c.exemplars, templates_for(c));
      out << "[system]\n" << rec.system << "\n\n[user]\n" << rec.user << "\n";
      return 0;
    };
  });

  // export-finetune
  auto* export_cmd = app.add_subcommand("export-finetune", "Write chat fine-tuning JSONL");
  std::string export_file, strategy_name, export_part = "train";
  std::size_t k = 5;
  bool negatives = false;
  export_cmd->add_option("--file", export_file, "Output JSONL (default: <out>/finetune.jsonl)");
  export_cmd->add_option("--part", export_part, "train | test")->check(CLI::IsMember({"train", "test"}));
  export_cmd->add_option("--subsample", strategy_name, "most-fe | random | diverse");
  export_cmd->add_option("--k", k, "Instances per frame when subsampling");
  export_cmd->add_flag("--negatives", negatives, "Add empty-output records for non-gold candidate frames");
  export_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      std::optional<SubsampleKind> kind;
      if (!strategy_name.empty()) {
        kind = parse_subsample_kind(strategy_name);
        if (!kind) throw Error(ErrorKind::InvalidConfig, "unknown strategy '" + strategy_name + "'");
      }
      std::string path = export_file;
      if (path.empty()) {
        if (c.out_dir.empty()) throw Error(ErrorKind::InvalidConfig, "export-finetune needs --file or --out");
        fs::create_directories(c.out_dir);
        path = (fs::path(c.out_dir) / "finetune.jsonl").string();
      }
      CorpusCache cache = load_corpus_cache(c.corpus_cache);
      std::vector<FrameInstance> instances = export_part == "train" ? cache.train.instances : cache.test.instances;
      if (kind) instances = subsample(instances, {*kind, k, c.seed});
      FineTuneExportConfig ec;
      ec.format = c.format;
      ec.output_path = path;
      ec.include_negatives = negatives;
      ExportManifest m = export_finetune_jsonl(instances, *cache.lexicon, ec, templates_for(c));
      out << "records " << m.record_count << " (negatives " << m.negative_count << "), ~" << m.token_estimate
          << " tokens, sha256 " << m.sha256 << "\n";
      return 0;
    };
  });

  // subsample
  auto* sub_cmd = app.add_subcommand("subsample", "Select up to k training instances per frame");
  std::string manifest_path;
  sub_cmd->add_option("--strategy", strategy_name, "most-fe | random | diverse")->required();
  sub_cmd->add_option("--k", k, "Instances per frame");
  sub_cmd->add_option("--manifest", manifest_path, "Manifest path (default: <out>/subsample.json)");
  sub_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      auto kind = parse_subsample_kind(strategy_name);
      if (!kind) throw Error(ErrorKind::InvalidConfig, "unknown strategy '" + strategy_name + "'");
      if (k == 0) throw Error(ErrorKind::InvalidConfig, "k must be >= 1");
      std::string path = manifest_path;
      if (path.empty() && !c.out_dir.empty()) path = (fs::path(c.out_dir) / "subsample.json").string();
      CorpusCache cache = load_corpus_cache(c.corpus_cache);
      const auto& train = cache.train.instances;
      auto idx = subsample_indices(train, {*kind, k, c.seed});
      ordered_json m;
      m["strategy"] = subsample_kind_name(*kind);
      m["k"] = k;
      m["seed"] = c.seed;
      m["train_instances"] = train.size();
      m["selected"] = idx.size();
      m["fraction"] = train.empty() ? 0.0 : static_cast<double>(idx.size()) / static_cast<double>(train.size());
      ordered_json ids = ordered_json::array();
      for (std::size_t i : idx) ids.push_back(train[i].instance_id);
      m["instance_ids"] = std::move(ids);
      if (!path.empty()) {
        if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
        write_file(path, m.dump(2) + "\n");
      }
      out << subsample_kind_name(*kind) << " k=" << k << ": " << idx.size() << " of " << train.size()
          << " training instances (" << fmt(100.0 * m["fraction"].get<double>(), 1) << "%)\n";
      return 0;
    };
  });

  // run-eval
  auto* eval_cmd = app.add_subcommand("run-eval", "Argument identification run with gold frames and targets");
  std::string replay_path, eval_file;
  std::size_t run_limit = 0;
  eval_cmd->add_option("--replay", replay_path, "Completion cache to replay");
  eval_cmd->add_option("--eval-file", eval_file, "Interchange JSONL to evaluate instead of the test split");
  eval_cmd->add_option("--limit", run_limit, "Evaluate only the first N instances");
  eval_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      if (!replay_path.empty()) c.replay_path = replay_path;
      if (!eval_file.empty()) c.eval_file = eval_file;
      if (run_limit) c.limit = run_limit;
      EvalRun run = run_eval(c);
      out << "split          n       P       R      F1     Acc\n";
      for (const auto& [label, r] : run.splits) {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %6zu  %.4f  %.4f  %.4f  %.4f\n", label.c_str(), r.n_instances,
                      r.precision, r.recall, r.f1, r.accuracy);
        out << line;
      }
      if (run.failed_requests) out << "failed requests: " << run.failed_requests << "\n";
      out << "report: " << (fs::path(c.out_dir) / "report.json").string() << "\n";
      return run.failed_requests ? 3 : 0;
    };
  });

  // frame-id
  auto* fid_cmd = app.add_subcommand("frame-id", "Frame identification from frame-element predictions");
  std::string tie_break;
  fid_cmd->add_option("--replay", replay_path, "Completion cache to replay");
  fid_cmd->add_option("--eval-file", eval_file, "Interchange JSONL to evaluate instead of the test split");
  fid_cmd->add_option("--limit", run_limit, "Evaluate only the first N targets");
  fid_cmd->add_option("--tie-break", tie_break, "random | most-fes | first | arbiter");
  fid_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      if (!replay_path.empty()) c.replay_path = replay_path;
      if (!eval_file.empty()) c.eval_file = eval_file;
      if (run_limit) c.limit = run_limit;
      if (!tie_break.empty()) c.tie_break = tie_break;
      FrameIdRun run = run_frame_id(c);
      auto row = [&](const char* label, const FrameIdSummary& s) {
        out << label << ": All " << fmt(s.acc_all) << "  Amb " << fmt(s.acc_ambiguous) << "  coverage "
            << fmt(s.coverage) << "  (n=" << s.n << ", ambiguous=" << s.n_ambiguous << ")\n";
      };
      row("without lexicon filter", run.without_filter);
      row("with lexicon filter   ", run.with_filter);
      return 0;
    };
  });

  // correlate
  auto* corr_cmd = app.add_subcommand("correlate", "Partial correlation of a benchmark with F1, controlling for size");
  std::string csv_path, benchmark;
  corr_cmd->add_option("--csv", csv_path, "CSV: model,size_b,f1,ifeval,bbh,gpqa,musr,mmlu_pro")->required();
  corr_cmd->add_option("--benchmark", benchmark, "Benchmark column (default: all)");
  corr_cmd->callback([&] {
    action = [&] {
      CorrelationInput input = load_correlation_csv(csv_path);
      if (!benchmark.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12f", partial_correlation(input, benchmark));
        out << buf << "\n";
        return 0;
      }
      std::set<std::string> columns;
      for (const auto& row : input.rows) {
        for (const auto& [name, _] : row.benchmarks) columns.insert(name);
      }
      for (const auto& name : columns) {
        out << name << " ";
        try {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.12f", partial_correlation(input, name));
          out << buf << "\n";
        } catch (const Error& e) {
          out << "undefined (" << to_string(e.kind()) << ")\n";
        }
      }
      return 0;
    };
  });

  // report
  auto* report_cmd = app.add_subcommand("report", "Summarize a run directory");
  std::string run_dir;
  bool frames_csv = false;
  report_cmd->add_option("--run", run_dir, "Run directory (default: --out)");
  report_cmd->add_flag("--csv", frames_csv, "Print the per-frame CSV");
  report_cmd->callback([&] {
    action = [&] {
      RunConfig c = resolve_config(g);
      const fs::path dir(run_dir.empty() ? c.out_dir : run_dir);
      if (frames_csv) {
        out << read_file((dir / "per_frame.csv").string());
        return 0;
      }
      if (fs::is_regular_file(dir / "summary.json")) {
        json s = json::parse(read_file((dir / "summary.json").string()));
        for (const char* key : {"without_lexicon_filter", "with_lexicon_filter"}) {
          const json& r = s[key];
          out << key << ": All " << fmt(r["acc_all"].get<double>()) << "  Amb "
              << fmt(r["acc_ambiguous"].get<double>()) << "  coverage " << fmt(r["coverage"].get<double>()) << "\n";
        }
        return 0;
      }
      json r = json::parse(read_file((dir / "report.json").string()));
      out << "model " << r["model"].get<std::string>() << ", format " << r["format"].get<std::string>()
          << ", corpus " << r["corpus_checksum"].get<std::string>().substr(0, 12) << "\n";
      out << "split          n       P       R      F1     Acc\n";
      for (const auto& [label, s] : r["splits"].items()) {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %6zu  %.4f  %.4f  %.4f  %.4f\n", label.c_str(),
                      s["n_instances"].get<std::size_t>(), s["precision"].get<double>(), s["recall"].get<double>(),
                      s["f1"].get<double>(), s["accuracy"].get<double>());
        out << line;
      }
      const json& q = r["per_frame_f1_quartiles"];
      out << "per-frame F1: min " << fmt(q["min"].get<double>()) << ", Q1 " << fmt(q["q1"].get<double>())
          << ", median " << fmt(q["median"].get<double>()) << ", Q3 " << fmt(q["q3"].get<double>()) << ", max "
          << fmt(q["max"].get<double>()) << "\n";
      return 0;
    };
  });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    return action ? action() : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace framekit
