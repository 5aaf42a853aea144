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

#include "probekit/online_code.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "probekit/error.h"

namespace probekit {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

RowMatrix GatherRows(const RowMatrix& x, const std::vector<std::size_t>& rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<std::uint32_t> GatherLabels(const std::vector<std::uint32_t>& labels,
                                        const std::vector<std::size_t>& rows) {
  std::vector<std::uint32_t> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(labels[r]);
  return out;
}

std::vector<std::size_t> SpanRows(const RowSpan& span) {
  std::vector<std::size_t> rows(span.size());
  std::iota(rows.begin(), rows.end(), span.begin);
  return rows;
}

// Absorbs rounding in t / 100 * n, so 67.6% of 1000 rows is 676.
constexpr double kCutSlack = 1e-9;

// Timestamp cuts with empty and repeated prefixes merged away, so that the
// all-uniform code is defined for any non-empty train span.
std::vector<std::size_t> DiagnosticCuts(const std::vector<double>& timestamps,
                                        std::size_t n) {
  std::vector<std::size_t> cuts;
  for (double t : timestamps) {
    const auto c = static_cast<std::size_t>(
        std::floor(t / 100.0 * static_cast<double>(n) + kCutSlack));
    if (c > 0 && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
  }
  return cuts;
}

// Trains the probe for one prefix of the transmission order.
LinearProbe FitPrefix(const ProbeInput& input,
                      const std::vector<std::size_t>& prefix,
                      const OnlineCodeConfig& config, std::size_t block) {
  if (config.uniform_diagnostic) {
    return LinearProbe::Zero(input.k, static_cast<Eigen::Index>(input.dim()));
  }
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> valid_rows;
  if (!input.valid.empty()) {
    train_rows = prefix;
    valid_rows = SpanRows(input.valid);
  } else if (prefix.size() == 1) {
    train_rows = prefix;
    valid_rows = prefix;
  } else {
    std::vector<std::size_t> shuffled = prefix;
    std::mt19937_64 rng(config.seed ^ (kGolden * (block + 1)));
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t holdout = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(config.holdout_fraction *
                                               static_cast<double>(prefix.size()))));
    valid_rows.assign(shuffled.begin(), shuffled.begin() + holdout);
    train_rows.assign(shuffled.begin() + holdout, shuffled.end());
    std::sort(valid_rows.begin(), valid_rows.end());
    // Keep the transmission order for the rows the probe trains on.
    std::vector<std::size_t> ordered;
    ordered.reserve(train_rows.size());
    for (auto r : prefix) {
      if (!std::binary_search(valid_rows.begin(), valid_rows.end(), r)) {
        ordered.push_back(r);
      }
    }
    train_rows = std::move(ordered);
  }
  const RowMatrix tx = GatherRows(input.features, train_rows);
  const RowMatrix vx = GatherRows(input.features, valid_rows);
  const auto ty = GatherLabels(input.labels, train_rows);
  const auto vy = GatherLabels(input.labels, valid_rows);
  return TrainProbe(tx, ty, input.k, vx, vy, config.TrainConfig(block + 1))
      .probe;
}

}  // namespace

ProbeTrainConfig OnlineCodeConfig::TrainConfig(std::uint64_t seed_offset) const {
  ProbeTrainConfig c;
  c.learning_rate = learning_rate;
  c.batch_size = batch_size;
  c.max_epochs = max_epochs;
  c.patience = patience;
  c.tolerance = tolerance;
  c.weight_decay = weight_decay;
  c.seed = seed + seed_offset;
  return c;
}

void ValidateOnlineCodeConfig(const OnlineCodeConfig& config) {
  const auto& ts = config.timestamps;
  if (ts.empty()) throw Error(ErrorCode::kConfig, "no timestamps");
  if (!(ts.front() > 0.0)) {
    throw Error(ErrorCode::kConfig, "first timestamp must be positive");
  }
  if (ts.back() != 100.0) {
    throw Error(ErrorCode::kConfig, "last timestamp must be 100");
  }
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) {
      throw Error(ErrorCode::kConfig, "timestamps must be strictly ascending");
    }
  }
  if (config.patience < 1 || config.max_epochs < 1 || config.batch_size == 0) {
    throw Error(ErrorCode::kConfig,
                "patience, max_epochs and batch_size must be positive");
  }
  if (!(config.learning_rate > 0.0)) {
    throw Error(ErrorCode::kConfig, "learning_rate must be positive");
  }
  if (!(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "holdout_fraction must lie in (0, 1)");
  }
}

OnlineCodeConfig OnlineCodeConfigFromJson(const nlohmann::json& j) {
  OnlineCodeConfig c;
  try {
    if (j.contains("timestamps")) c.timestamps = j["timestamps"].get<std::vector<double>>();
    if (j.contains("patience")) c.patience = j["patience"].get<int>();
    if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
    if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<int>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("weight_decay")) c.weight_decay = j["weight_decay"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("holdout_fraction")) c.holdout_fraction = j["holdout_fraction"].get<double>();
    if (j.contains("uniform_diagnostic")) c.uniform_diagnostic = j["uniform_diagnostic"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("probe config: ") + e.what());
  }
  ValidateOnlineCodeConfig(c);
  return c;
}

nlohmann::ordered_json OnlineCodeConfigToJson(const OnlineCodeConfig& c) {
  nlohmann::ordered_json j;
  j["timestamps"] = c.timestamps;
  j["patience"] = c.patience;
  j["tolerance"] = c.tolerance;
  j["max_epochs"] = c.max_epochs;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["weight_decay"] = c.weight_decay;
  j["seed"] = c.seed;
  j["holdout_fraction"] = c.holdout_fraction;
  j["uniform_diagnostic"] = c.uniform_diagnostic;
  return j;
}

nlohmann::ordered_json ProbeReportToJson(const ProbeReport& r) {
  nlohmann::ordered_json j;
  j["online_codelength_bits"] = r.online_codelength;
  j["uniform_codelength_bits"] = r.uniform_codelength;
  j["compression"] = r.compression;
  j["block_codelengths_bits"] = r.block_codelengths;
  if (r.accuracy) {
    j["accuracy"] = *r.accuracy;
  } else {
    j["accuracy"] = nullptr;
  }
  j["accuracy_split"] = r.accuracy_split;
  j["n_train"] = r.n_train;
  j["k"] = r.k;
  return j;
}

double UniformCodelength(std::size_t n, std::uint32_t k) {
  return static_cast<double>(n) * std::log2(static_cast<double>(k));
}

double Compression(double online_codelength, std::size_t n, std::uint32_t k) {
  if (!(online_codelength > 0.0)) {
    throw Error(ErrorCode::kDomain, "online codelength must be positive");
  }
  return UniformCodelength(n, k) / online_codelength;
}

std::vector<std::size_t> TimestampCuts(const std::vector<double>& timestamps,
                                       std::size_t n) {
  std::vector<std::size_t> cuts;
  cuts.reserve(timestamps.size());
  for (double t : timestamps) {
    cuts.push_back(static_cast<std::size_t>(
        std::floor(t / 100.0 * static_cast<double>(n) + kCutSlack)));
  }
  if (cuts.empty() || cuts.front() == 0) {
    throw Error(ErrorCode::kConfig,
                "first timestamp leaves an empty first block for n=" +
                    std::to_string(n));
  }
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] <= cuts[i - 1]) {
      throw Error(ErrorCode::kConfig,
                  "timestamps " + std::to_string(i) + " and " +
                      std::to_string(i + 1) +
                      " floor to the same prefix size for n=" +
                      std::to_string(n));
    }
  }
  return cuts;
}

OnlineCodeResult OnlineCode(const ProbeInput& input,
                            const OnlineCodeConfig& config) {
  ValidateOnlineCodeConfig(config);
  const std::size_t n = input.train.size();
  if (config.uniform_diagnostic ? n == 0 : n < 10) {
    throw Error(ErrorCode::kConfig, "online code needs at least 10 train rows");
  }
  if (input.k < 2) throw Error(ErrorCode::kShape, "online code needs k >= 2");

  OnlineCodeResult result;
  result.cuts = config.uniform_diagnostic ? DiagnosticCuts(config.timestamps, n)
                                          : TimestampCuts(config.timestamps, n);
  result.order = SpanRows(input.train);
  std::mt19937_64 rng(config.seed);
  std::shuffle(result.order.begin(), result.order.end(), rng);

  ProbeReport& report = result.report;
  report.n_train = n;
  report.k = input.k;
  const double uniform_bits = std::log2(static_cast<double>(input.k));
  report.block_codelengths.push_back(
      static_cast<double>(result.cuts.front()) * uniform_bits);

  for (std::size_t i = 0; i < result.cuts.size(); ++i) {
    const std::vector<std::size_t> prefix(result.order.begin(),
                                          result.order.begin() + result.cuts[i]);
    result.probes.push_back(FitPrefix(input, prefix, config, i));
    if (i + 1 == result.cuts.size()) break;
    const LinearProbe& probe = result.probes.back();
    double bits = 0.0;
    for (std::size_t j = result.cuts[i]; j < result.cuts[i + 1]; ++j) {
      const auto row = static_cast<Eigen::Index>(result.order[j]);
      bits -= ProbeLogProb(probe, input.features.row(row).transpose(),
                           input.labels[result.order[j]]);
    }
    report.block_codelengths.push_back(bits);
  }

  report.online_codelength = 0.0;
  for (double b : report.block_codelengths) report.online_codelength += b;
  report.uniform_codelength = UniformCodelength(n, input.k);
  report.compression = Compression(report.online_codelength, n, input.k);

  const RowSpan& eval = !input.test.empty() ? input.test : input.valid;
  if (!eval.empty()) {
    const auto rows = SpanRows(eval);
    report.accuracy = ProbeAccuracy(result.probes.back(),
                                    GatherRows(input.features, rows),
                                    GatherLabels(input.labels, rows));
    report.accuracy_split = !input.test.empty() ? "test" : "valid";
  } else {
    report.accuracy_split = "none";
  }
  return result;
}

}  // namespace probekit
