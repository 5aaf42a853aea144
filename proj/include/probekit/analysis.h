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

#ifndef PROBEKIT_ANALYSIS_H_
#define PROBEKIT_ANALYSIS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace probekit {

struct ModelRecord {
  std::string model_name;
  std::string bias;
  std::string dataset;
  std::string objective;
  std::optional<double> gamma;
  std::int64_t seed = 0;
  double ood_accuracy = 0.0;
  double baseline_ood_accuracy = 0.0;
  double compression = 0.0;
  std::optional<double> probe_accuracy;
};

// ood_accuracy - baseline_ood_accuracy
double RobustnessDelta(const ModelRecord& rec);

// kSchema unless accuracies lie in [0, 1] and compression > 0.
void ValidateRecord(const ModelRecord& rec);

// Product-moment correlation. kShape on a length mismatch or fewer than
// three points; kUndefinedCorrelation when either side has zero variance.
double Pearson(std::span<const double> xs, std::span<const double> ys);

double Median(std::vector<double> values);
double Mean(std::span<const double> values);
// Population standard deviation.
double StdDev(std::span<const double> values);

// Columns: model_name, bias, dataset, objective, gamma, seed, ood_acc,
// baseline_ood_acc, compression, probe_acc. Extra columns are ignored; empty
// gamma/probe_acc cells are allowed. A missing column raises kSchema naming
// it; a malformed cell raises kSchema naming its line and column.
std::vector<ModelRecord> ParseRecordsCsv(std::string_view text);
std::vector<ModelRecord> ReadRecordsCsv(const std::filesystem::path& path);
std::string RecordsToCsv(std::span<const ModelRecord> records);

enum class GroupTag { kBias, kDataset, kObjective, kGamma, kSeed };
std::string_view GroupTagName(GroupTag tag);
GroupTag ParseGroupTag(std::string_view name);

enum class Aggregation {
  kModelMedian,  // one point per model_name: medians over its seeds
  kRecord,       // one point per record
};

struct ModelSummary {
  std::vector<std::string> group;
  std::string model_name;
  std::size_t seeds = 0;
  double median_compression = 0.0;
  double mean_compression = 0.0;
  double median_delta = 0.0;
  double mean_delta = 0.0;
};

struct CorrelationRow {
  std::vector<std::string> group;  // one value per group_by tag
  std::size_t m = 0;               // points entering the correlation
  std::size_t records = 0;
  std::optional<double> rho;
  // rho over per-model means; only with kModelMedian.
  std::optional<double> rho_mean;
  std::string warning;  // empty for a valid row
};

struct CorrelationReport {
  std::vector<GroupTag> group_by;
  Aggregation aggregation = Aggregation::kModelMedian;
  std::vector<CorrelationRow> rows;
  std::vector<ModelSummary> models;
};

// Correlation between compression and robustness delta within each group.
// Groups with fewer than three points, or with zero variance, become warning
// rows. Output is sorted by group and model name, so it does not depend on
// record order.
CorrelationReport BuildCorrelationReport(
    std::span<const ModelRecord> records, std::vector<GroupTag> group_by,
    Aggregation aggregation = Aggregation::kModelMedian);

nlohmann::ordered_json CorrelationReportToJson(const CorrelationReport& r);
std::string CorrelationReportToCsv(const CorrelationReport& r);
std::string ModelSummariesToCsv(const CorrelationReport& r);

struct SweepPoint {
  double gamma = 0.0;
  std::size_t seeds = 0;
  double median_compression = 0.0;
  double mean_compression = 0.0;
  double std_compression = 0.0;
};

// Per-gamma compression statistics of the DFL records, sorted by gamma.
// Needs two distinct gammas with at least `min_seeds` records each, and
// every gamma in `required`; otherwise kSchema listing what is missing.
std::vector<SweepPoint> GammaSweep(std::span<const ModelRecord> records,
                                   std::span<const double> required = {},
                                   std::size_t min_seeds = 3);

nlohmann::ordered_json GammaSweepToJson(std::span<const SweepPoint> sweep);
std::string GammaSweepToCsv(std::span<const SweepPoint> sweep);

}  // namespace probekit

#endif  // PROBEKIT_ANALYSIS_H_
