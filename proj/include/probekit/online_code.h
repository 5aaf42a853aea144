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

#ifndef PROBEKIT_ONLINE_CODE_H_
#define PROBEKIT_ONLINE_CODE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "probekit/linear_probe.h"
#include "probekit/repr_io.h"

namespace probekit {

struct OnlineCodeConfig {
  // Cumulative percentages of the training span; strictly ascending, first
  // above zero, last exactly 100.
  std::vector<double> timestamps = {2.0,  3.0,  4.4,  6.5,  9.5, 14.0,
                                    21.0, 31.0, 45.7, 67.6, 100.0};
  int patience = 4;
  double tolerance = 1e-3;
  int max_epochs = 50;
  double learning_rate = 0.1;
  std::size_t batch_size = 64;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  // Fraction of each prefix held out for early stopping when the input has
  // no valid span.
  double holdout_fraction = 0.1;
  // Every block probe is forced to zero parameters (uniform predictions).
  bool uniform_diagnostic = false;

  ProbeTrainConfig TrainConfig(std::uint64_t seed_offset) const;
};

// Throws kConfig unless the timestamps are valid.
void ValidateOnlineCodeConfig(const OnlineCodeConfig& config);

OnlineCodeConfig OnlineCodeConfigFromJson(const nlohmann::json& j);
nlohmann::ordered_json OnlineCodeConfigToJson(const OnlineCodeConfig& config);

// Codelengths in bits.
struct ProbeReport {
  double online_codelength = 0.0;
  double uniform_codelength = 0.0;
  double compression = 0.0;
  // First entry is the uniformly coded first block.
  std::vector<double> block_codelengths;
  std::optional<double> accuracy;
  std::string accuracy_split;  // "test", "valid" or "none"
  std::size_t n_train = 0;
  std::uint32_t k = 0;
};

nlohmann::ordered_json ProbeReportToJson(const ProbeReport& report);

struct OnlineCodeResult {
  ProbeReport report;
  // Row indices (into ProbeInput) of the train span in transmission order.
  std::vector<std::size_t> order;
  // Prefix sizes n_1 .. n_m.
  std::vector<std::size_t> cuts;
  // probes[i] was trained on the first cuts[i] rows of `order`; the last one
  // is the full-train probe used for the reported accuracy.
  std::vector<LinearProbe> probes;
};

// (n * log2 k) / online_codelength; kDomain if online_codelength <= 0.
double Compression(double online_codelength, std::size_t n, std::uint32_t k);

double UniformCodelength(std::size_t n, std::uint32_t k);

// Prefix sizes floor(t_i / 100 * n). kConfig if the first is zero or two
// coincide.
std::vector<std::size_t> TimestampCuts(const std::vector<double>& timestamps,
                                       std::size_t n);

// Online (prequential) code of the train-span labels. The train rows are
// shuffled once with config.seed; block i+1 is coded with a probe trained on
// the first n_i rows; the first block is coded uniformly. Needs 10 train rows,
// or one under uniform_diagnostic.
OnlineCodeResult OnlineCode(const ProbeInput& input,
                            const OnlineCodeConfig& config);

}  // namespace probekit

#endif  // PROBEKIT_ONLINE_CODE_H_
