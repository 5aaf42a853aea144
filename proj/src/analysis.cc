// Copyright 2026 The ProbeKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "probekit/analysis.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "probekit/error.h"
#include "probekit/file_util.h"

namespace probekit {
namespace {

constexpr const char* kColumns[] = {
    "model_name", "bias", "dataset", "objective", "gamma",
    "seed", "ood_acc", "baseline_ood_acc", "compression", "probe_acc"};

std::string Num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// RFC 4180 rows; a trailing empty line is dropped.
std::vector<std::vector<std::string>> SplitCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kSchema, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double ParseDouble(const std::string& cell, std::size_t line,
                   std::string_view column) {
  double v = 0.0;
  const std::string t = Trim(cell);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kSchema, "line " + std::to_string(line) +
                                        ": bad number in column '" +
                                        std::string(column) + "': '" + cell +
                                        "'");
  }
  return v;
}

std::int64_t ParseInt(const std::string& cell, std::size_t line,
                      std::string_view column) {
  std::int64_t v = 0;
  const std::string t = Trim(cell);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kSchema, "line " + std::to_string(line) +
                                        ": bad integer in column '" +
                                        std::string(column) + "': '" + cell +
                                        "'");
  }
  return v;
}

std::string TagValue(const ModelRecord& r, GroupTag tag) {
  switch (tag) {
    case GroupTag::kBias:
      return r.bias;
    case GroupTag::kDataset:
      return r.dataset;
    case GroupTag::kObjective:
      return r.objective;
    case GroupTag::kGamma:
      return r.gamma ? Num(*r.gamma) : "";
    case GroupTag::kSeed:
      return std::to_string(r.seed);
  }
  return "";
}

std::string ToLower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

double RobustnessDelta(const ModelRecord& rec) {
  return rec.ood_accuracy - rec.baseline_ood_accuracy;
}

void ValidateRecord(const ModelRecord& rec) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(rec.ood_accuracy) || !in_unit(rec.baseline_ood_accuracy) ||
      (rec.probe_accuracy && !in_unit(*rec.probe_accuracy))) {
    throw Error(ErrorCode::kSchema, "record '" + rec.model_name +
                                        "': accuracies must lie in [0, 1]");
  }
  if (!(rec.compression > 0.0) || !std::isfinite(rec.compression)) {
    throw Error(ErrorCode::kSchema,
                "record '" + rec.model_name + "': compression must be > 0");
  }
}

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kShape, "pearson: lengths differ (" +
                                       std::to_string(xs.size()) + " vs " +
                                       std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::kShape, "pearson: needs at least 3 points");
  }
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(xs) || constant(ys)) {
    throw Error(ErrorCode::kUndefinedCorrelation,
                "pearson: zero variance input");
  }
  // Extended precision keeps exactly linear data at exactly +-1.
  using Wide = long double;
  const auto n = static_cast<Wide>(xs.size());
  Wide mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  Wide sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Wide dx = xs[i] - mx;
    const Wide dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) {
    throw Error(ErrorCode::kUndefinedCorrelation,
                "pearson: zero variance input");
  }
  const auto rho = static_cast<double>(sxy / (std::sqrt(sxx) * std::sqrt(syy)));
  return std::clamp(rho, -1.0, 1.0);
}

double Median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::kEmptyData, "median of nothing");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double Mean(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::kEmptyData, "mean of nothing");
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double StdDev(std::span<const double> v) {
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::vector<ModelRecord> ParseRecordsCsv(std::string_view text) {
  const auto rows = SplitCsv(text);
  if (rows.empty()) throw Error(ErrorCode::kSchema, "records CSV is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    col.emplace(Trim(rows[0][i]), i);
  }
  std::vector<std::string> missing;
  for (const char* name : kColumns) {
    if (!col.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string msg = "records CSV is missing column";
    msg += missing.size() > 1 ? "s" : "";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      msg += (i ? ", '" : " '") + missing[i] + "'";
    }
    throw Error(ErrorCode::kSchema, msg);
  }
  std::vector<ModelRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != rows[0].size()) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(line) + ": expected " +
                      std::to_string(rows[0].size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    auto cell = [&](const char* name) -> const std::string& {
      return row[col.at(name)];
    };
    ModelRecord rec;
    rec.model_name = Trim(cell("model_name"));
    rec.bias = Trim(cell("bias"));
    rec.dataset = Trim(cell("dataset"));
    rec.objective = Trim(cell("objective"));
    if (!Trim(cell("gamma")).empty()) {
      rec.gamma = ParseDouble(cell("gamma"), line, "gamma");
    }
    rec.seed = ParseInt(cell("seed"), line, "seed");
    rec.ood_accuracy = ParseDouble(cell("ood_acc"), line, "ood_acc");
    rec.baseline_ood_accuracy =
        ParseDouble(cell("baseline_ood_acc"), line, "baseline_ood_acc");
    rec.compression = ParseDouble(cell("compression"), line, "compression");
    if (!Trim(cell("probe_acc")).empty()) {
      rec.probe_accuracy = ParseDouble(cell("probe_acc"), line, "probe_acc");
    }
    try {
      ValidateRecord(rec);
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(line) + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ModelRecord> ReadRecordsCsv(const std::filesystem::path& path) {
  return ParseRecordsCsv(ReadFile(path));
}

std::string RecordsToCsv(std::span<const ModelRecord> records) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    out << (i ? "," : "") << kColumns[i];
  }
  out << '\n';
  for (const ModelRecord& r : records) {
    out << CsvField(r.model_name) << ',' << CsvField(r.bias) << ','
        << CsvField(r.dataset) << ',' << CsvField(r.objective) << ','
        << (r.gamma ? Num(*r.gamma) : "") << ',' << r.seed << ','
        << Num(r.ood_accuracy) << ',' << Num(r.baseline_ood_accuracy) << ','
        << Num(r.compression) << ','
        << (r.probe_accuracy ? Num(*r.probe_accuracy) : "") << '\n';
  }
  return out.str();
}

std::string_view GroupTagName(GroupTag tag) {
  switch (tag) {
    case GroupTag::kBias:
      return "bias";
    case GroupTag::kDataset:
      return "dataset";
    case GroupTag::kObjective:
      return "objective";
    case GroupTag::kGamma:
      return "gamma";
    case GroupTag::kSeed:
      return "seed";
  }
  return "?";
}

GroupTag ParseGroupTag(std::string_view name) {
  for (GroupTag t : {GroupTag::kBias, GroupTag::kDataset, GroupTag::kObjective,
                     GroupTag::kGamma, GroupTag::kSeed}) {
    if (GroupTagName(t) == name) return t;
  }
  throw Error(ErrorCode::kConfig,
              "unknown group tag '" + std::string(name) + "'");
}

CorrelationReport BuildCorrelationReport(std::span<const ModelRecord> records,
                                         std::vector<GroupTag> group_by,
                                         Aggregation aggregation) {
  CorrelationReport report;
  report.group_by = group_by;
  report.aggregation = aggregation;

  // group -> model -> records
  std::map<std::vector<std::string>,
           std::map<std::string, std::vector<const ModelRecord*>>>
      groups;
  for (const ModelRecord& r : records) {
    ValidateRecord(r);
    std::vector<std::string> key;
    for (GroupTag t : group_by) key.push_back(TagValue(r, t));
    groups[key][r.model_name].push_back(&r);
  }

  for (const auto& [key, models] : groups) {
    CorrelationRow row;
    row.group = key;
    std::vector<double> comp, delta, comp_mean, delta_mean;
    for (const auto& [name, unordered] : models) {
      // Fixed order so sums do not depend on input order.
      std::vector<const ModelRecord*> recs = unordered;
      std::sort(recs.begin(), recs.end(), [](const ModelRecord* a, const ModelRecord* b) {
        return std::tie(a->seed, a->compression, a->ood_accuracy, a->baseline_ood_accuracy) <
               std::tie(b->seed, b->compression, b->ood_accuracy, b->baseline_ood_accuracy);
      });
      row.records += recs.size();
      std::vector<double> c, d;
      for (const ModelRecord* r : recs) {
        c.push_back(r->compression);
        d.push_back(RobustnessDelta(*r));
      }
      ModelSummary s;
      s.group = key;
      s.model_name = name;
      s.seeds = recs.size();
      s.median_compression = Median(c);
      s.mean_compression = Mean(c);
      s.median_delta = Median(d);
      s.mean_delta = Mean(d);
      report.models.push_back(s);
      if (aggregation == Aggregation::kModelMedian) {
        comp.push_back(s.median_compression);
        delta.push_back(s.median_delta);
        comp_mean.push_back(s.mean_compression);
        delta_mean.push_back(s.mean_delta);
      } else {
        // Sorted so the points do not depend on record order.
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < c.size(); ++i) pts.emplace_back(c[i], d[i]);
        std::sort(pts.begin(), pts.end());
        for (const auto& [x, y] : pts) {
          comp.push_back(x);
          delta.push_back(y);
        }
      }
    }
    row.m = comp.size();
    if (row.m < 3) {
      row.warning = "skipped: " + std::to_string(row.m) +
                    " point(s), need at least 3";
    } else {
      try {
        row.rho = Pearson(comp, delta);
        if (aggregation == Aggregation::kModelMedian) {
          row.rho_mean = Pearson(comp_mean, delta_mean);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedCorrelation) throw;
        row.rho.reset();
        row.rho_mean.reset();
        row.warning = "skipped: zero variance in compression or delta";
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::ordered_json CorrelationReportToJson(const CorrelationReport& r) {
  nlohmann::ordered_json j;
  std::vector<std::string> tags;
  for (GroupTag t : r.group_by) tags.emplace_back(GroupTagName(t));
  j["group_by"] = tags;
  j["aggregation"] =
      r.aggregation == Aggregation::kModelMedian ? "model_median" : "record";
  j["rows"] = nlohmann::ordered_json::array();
  for (const CorrelationRow& row : r.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < tags.size(); ++i) o[tags[i]] = row.group[i];
    o["M"] = row.m;
    o["records"] = row.records;
    o["rho"] = row.rho ? nlohmann::ordered_json(*row.rho) : nullptr;
    o["rho_mean"] =
        row.rho_mean ? nlohmann::ordered_json(*row.rho_mean) : nullptr;
    o["warning"] = row.warning;
    j["rows"].push_back(o);
  }
  j["models"] = nlohmann::ordered_json::array();
  for (const ModelSummary& s : r.models) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < tags.size(); ++i) o[tags[i]] = s.group[i];
    o["model_name"] = s.model_name;
    o["seeds"] = s.seeds;
    o["median_compression"] = s.median_compression;
    o["mean_compression"] = s.mean_compression;
    o["median_delta"] = s.median_delta;
    o["mean_delta"] = s.mean_delta;
    j["models"].push_back(o);
  }
  return j;
}

std::string CorrelationReportToCsv(const CorrelationReport& r) {
  std::ostringstream out;
  for (GroupTag t : r.group_by) out << GroupTagName(t) << ',';
  out << "M,records,rho,rho_mean,warning\n";
  for (const CorrelationRow& row : r.rows) {
    for (const std::string& g : row.group) out << CsvField(g) << ',';
    out << row.m << ',' << row.records << ','
        << (row.rho ? Num(*row.rho) : "") << ','
        << (row.rho_mean ? Num(*row.rho_mean) : "") << ','
        << CsvField(row.warning) << '\n';
  }
  return out.str();
}

std::string ModelSummariesToCsv(const CorrelationReport& r) {
  std::ostringstream out;
  for (GroupTag t : r.group_by) out << GroupTagName(t) << ',';
  out << "model_name,seeds,median_compression,mean_compression,"
         "median_delta,mean_delta\n";
  for (const ModelSummary& s : r.models) {
    for (const std::string& g : s.group) out << CsvField(g) << ',';
    out << CsvField(s.model_name) << ',' << s.seeds << ','
        << Num(s.median_compression) << ',' << Num(s.mean_compression) << ','
        << Num(s.median_delta) << ',' << Num(s.mean_delta) << '\n';
  }
  return out.str();
}

std::vector<SweepPoint> GammaSweep(std::span<const ModelRecord> records,
                                   std::span<const double> required,
                                   std::size_t min_seeds) {
  std::map<double, std::vector<double>> by_gamma;
  for (const ModelRecord& r : records) {
    if (ToLower(r.objective) != "dfl" || !r.gamma) continue;
    by_gamma[*r.gamma].push_back(r.compression);
  }
  std::vector<std::string> problems;
  for (double g : required) {
    auto it = by_gamma.find(g);
    if (it == by_gamma.end()) {
      problems.push_back("gamma " + Num(g) + " has no DFL records");
    }
  }
  for (const auto& [g, values] : by_gamma) {
    if (values.size() < min_seeds) {
      problems.push_back("gamma " + Num(g) + " has " +
                         std::to_string(values.size()) + " seed(s), need " +
                         std::to_string(min_seeds));
    }
  }
  if (by_gamma.size() < 2) {
    problems.push_back("need at least 2 distinct gamma values, found " +
                       std::to_string(by_gamma.size()));
  }
  if (!problems.empty()) {
    std::string msg = "gamma sweep coverage: ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      msg += (i ? "; " : "") + problems[i];
    }
    throw Error(ErrorCode::kSchema, msg);
  }
  std::vector<SweepPoint> out;
  for (auto& [g, values] : by_gamma) {
    std::sort(values.begin(), values.end());
    SweepPoint p;
    p.gamma = g;
    p.seeds = values.size();
    p.median_compression = Median(values);
    p.mean_compression = Mean(values);
    p.std_compression = StdDev(values);
    out.push_back(p);
  }
  return out;
}

nlohmann::ordered_json GammaSweepToJson(std::span<const SweepPoint> sweep) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const SweepPoint& p : sweep) {
    nlohmann::ordered_json o;
    o["gamma"] = p.gamma;
    o["seeds"] = p.seeds;
    o["median_compression"] = p.median_compression;
    o["mean_compression"] = p.mean_compression;
    o["std_compression"] = p.std_compression;
    j.push_back(o);
  }
  return j;
}

std::string GammaSweepToCsv(std::span<const SweepPoint> sweep) {
  std::ostringstream out;
  out << "gamma,seeds,median_compression,mean_compression,std_compression\n";
  for (const SweepPoint& p : sweep) {
    out << Num(p.gamma) << ',' << p.seeds << ',' << Num(p.median_compression)
        << ',' << Num(p.mean_compression) << ',' << Num(p.std_compression)
        << '\n';
  }
  return out.str();
}

}  // namespace probekit
