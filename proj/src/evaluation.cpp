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

#include "framekit/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace framekit {

using nlohmann::ordered_json;

namespace {

std::string match_key(std::string_view text, const MatchingPolicy& policy) {
  std::string out = normalize_whitespace(text);
  if (policy.case_fold) {
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

InstanceScore score_instance(const FrameInstance& gold, const PredictionSet& pred,
                             const MatchingPolicy& policy) {
  InstanceScore s;
  s.instance_id = gold.instance_id;
  s.sentence_id = gold.sentence_id;
  s.frame_name = gold.frame_name;

  std::map<std::pair<std::string, std::string>, std::size_t> remaining;
  for (const auto& fe : gold.fes) ++remaining[{fe.name, match_key(fe.span.text, policy)}];

  for (const auto& p : pred.entries) {
    if (!p.known) {
      ++s.fp;
      continue;
    }
    auto it = remaining.find({p.fe_name, match_key(p.text, policy)});
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++s.tp;
    } else {
      ++s.fp;
    }
  }
  s.fn = gold.fes.size() - s.tp;
  s.exact = s.fp == 0 && s.fn == 0;
  for (const auto& w : pred.warnings) ++s.warnings[warning_name(w.kind)];
  return s;
}

double Counts::precision() const { return ratio(tp, tp + fp); }
double Counts::recall() const { return ratio(tp, tp + fn); }
double Counts::f1() const {
  double p = precision(), r = recall();
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}
double Counts::accuracy() const { return ratio(exact, n); }

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  n += o.n;
  exact += o.exact;
  return *this;
}

EvalReport aggregate(const std::vector<InstanceScore>& scores) {
  if (scores.empty()) throw Error(ErrorKind::EmptyScoreList, "cannot aggregate an empty score list");
  EvalReport r;
  for (const auto& s : scores) {
    Counts c{s.tp, s.fp, s.fn, 1, s.exact ? 1u : 0u};
    r.totals += c;
    r.per_frame[s.frame_name] += c;
    for (const auto& [k, v] : s.warnings) r.warnings[k] += v;
  }
  r.precision = r.totals.precision();
  r.recall = r.totals.recall();
  r.f1 = r.totals.f1();
  r.accuracy = r.totals.accuracy();
  r.n_instances = r.totals.n;
  return r;
}

std::map<std::string, EvalReport> split_report(const std::vector<InstanceScore>& scores,
                                               const std::vector<std::string>& labels) {
  if (scores.size() != labels.size())
    throw Error(ErrorKind::InvalidArgument, "every score needs exactly one label");
  std::map<std::string, std::vector<InstanceScore>> groups;
  for (std::size_t i = 0; i < scores.size(); ++i) groups[labels[i]].push_back(scores[i]);
  std::map<std::string, EvalReport> out;
  for (const auto& [label, group] : groups) out.emplace(label, aggregate(group));
  out["All"] = aggregate(scores);
  return out;
}

std::vector<FrameRow> per_frame_distribution(const EvalReport& report) {
  std::vector<FrameRow> rows;
  rows.reserve(report.per_frame.size());
  for (const auto& [name, c] : report.per_frame) rows.push_back({name, c.n, c.f1()});
  std::stable_sort(rows.begin(), rows.end(), [](const FrameRow& a, const FrameRow& b) {
    if (a.f1 != b.f1) return a.f1 < b.f1;
    return a.frame < b.frame;
  });
  return rows;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyScoreList, "no values for quartiles");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

Quartiles f1_quartiles(const std::vector<FrameRow>& rows) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.f1);
  return quartiles(std::move(v));
}

std::string report_json_text(const EvalReport& report, int indent) {
  ordered_json j;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["accuracy"] = report.accuracy;
  j["n_instances"] = report.n_instances;
  j["tp"] = report.totals.tp;
  j["fp"] = report.totals.fp;
  j["fn"] = report.totals.fn;
  j["exact"] = report.totals.exact;
  ordered_json frames = ordered_json::object();
  for (const auto& [name, c] : report.per_frame) {
    frames[name] = {{"n", c.n}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"f1", c.f1()}};
  }
  j["per_frame"] = std::move(frames);
  ordered_json warns = ordered_json::object();
  for (const auto& [k, v] : report.warnings) warns[k] = v;
  j["warnings"] = std::move(warns);
  return j.dump(indent);
}

std::string per_frame_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "frame,n,tp,fp,fn,precision,recall,f1\n";
  char buf[128];
  for (const auto& row : per_frame_distribution(report)) {
    const Counts& c = report.per_frame.at(row.frame);
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", c.precision(), c.recall(), c.f1());
    out << row.frame << ',' << c.n << ',' << c.tp << ',' << c.fp << ',' << c.fn << ',' << buf << '\n';
  }
  return out.str();
}

// --- partial correlation ----------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  for (auto& f : fields) f = trim(f);
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::MalformedRecord,
                "line " + std::to_string(line_no) + ": not a number: '" + field + "'");
  }
}

// Residuals of v after least-squares regression on z with an intercept.
std::vector<double> residualize(const std::vector<double>& v, const std::vector<double>& z) {
  const double n = static_cast<double>(v.size());
  double mv = 0, mz = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mv += v[i];
    mz += z[i];
  }
  mv /= n;
  mz /= n;
  double szz = 0, szv = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    szz += (z[i] - mz) * (z[i] - mz);
    szv += (z[i] - mz) * (v[i] - mv);
  }
  const double beta = szv / szz;
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = (v[i] - mv) - beta * (z[i] - mz);
  return r;
}

double centered_ss(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss;
}

}  // namespace

CorrelationInput parse_correlation_csv(std::string_view text) {
  CorrelationInput input;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      for (const char* required : {"model", "size_b", "f1"}) {
        if (std::find(header.begin(), header.end(), required) == header.end())
          throw Error(ErrorKind::MalformedRecord, std::string("CSV header lacks column ") + required);
      }
      continue;
    }
    if (fields.size() != header.size())
      throw Error(ErrorKind::MalformedRecord, "line " + std::to_string(line_no) + ": expected " +
                                                  std::to_string(header.size()) + " fields");
    CorrelationRow row;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& col = header[i];
      if (col == "model") row.model = fields[i];
      else if (col == "size_b") row.size_b = parse_number(fields[i], line_no);
      else if (col == "f1") row.f1 = parse_number(fields[i], line_no);
      else row.benchmarks[col] = parse_number(fields[i], line_no);
    }
    if (!(row.size_b > 0))
      throw Error(ErrorKind::MalformedRecord, "line " + std::to_string(line_no) + ": size_b must be > 0");
    input.rows.push_back(std::move(row));
  }
  if (header.empty()) throw Error(ErrorKind::MalformedRecord, "empty correlation CSV");
  return input;
}

CorrelationInput load_correlation_csv(const std::string& path) {
  return parse_correlation_csv(read_file(path));
}

double partial_correlation(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z) {
  if (x.size() != y.size() || x.size() != z.size())
    throw Error(ErrorKind::InvalidArgument, "columns differ in length");
  if (x.size() < 4) throw Error(ErrorKind::InvalidArgument, "partial correlation needs at least 4 rows");

  const double ssz = centered_ss(z);
  if (!(ssz > 0)) throw Error(ErrorKind::DegenerateVariance, "control variable has zero variance");

  auto rx = residualize(x, z);
  auto ry = residualize(y, z);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
    sxy += rx[i] * ry[i];
  }
  constexpr double kRelTol = 1e-12;
  if (!(sxx > kRelTol * centered_ss(x)) || !(syy > kRelTol * centered_ss(y)))
    throw Error(ErrorKind::DegenerateVariance, "residual variance vanishes after controlling for size");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double partial_correlation(const CorrelationInput& input, const std::string& benchmark) {
  std::vector<double> x, y, z;
  for (const auto& row : input.rows) {
    auto it = row.benchmarks.find(benchmark);
    if (it == row.benchmarks.end())
      throw Error(ErrorKind::InvalidArgument, "unknown benchmark column: " + benchmark);
    x.push_back(it->second);
    y.push_back(row.f1);
    z.push_back(row.size_b);
  }
  return partial_correlation(x, y, z);
}

}  // namespace framekit
