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

#ifndef PROBEKIT_TOY_EXPERIMENT_H_
#define PROBEKIT_TOY_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "probekit/online_code.h"
#include "probekit/synthetic.h"
#include "probekit/toy_lab.h"

namespace probekit {

// Bias model used by DFL, PoE and ConfReg.
enum class WeakKind {
  kExplicit,  // linear model over the explicit bias features
  kTiny,      // small hidden width over the full input
  kSubset,    // main-model width over the full input, trained on a subsample
};

std::string_view WeakKindName(WeakKind kind);
WeakKind ParseWeakKind(std::string_view name);

struct ToyExperimentConfig {
  SyntheticBiasConfig data;
  Eigen::Index main_hidden = 64;
  Eigen::Index tiny_hidden = 4;
  double subset_fraction = 0.05;
  WeakKind weak = WeakKind::kExplicit;
  ToyHyper hyper;
  // Balanced probing rows drawn with the bias label independent of the task
  // label; the probed property is [bias label == 0].
  std::size_t probe_rows = 3000;
  OnlineCodeConfig probe;
  bool run_probe = true;
};

nlohmann::ordered_json ToyExperimentConfigToJson(const ToyExperimentConfig& c);
// Missing keys keep their defaults; kConfig on bad values.
ToyExperimentConfig ToyExperimentConfigFromJson(const nlohmann::json& j);
void ValidateToyExperimentConfig(const ToyExperimentConfig& c);

// Everything shared by the runs of one seed: data, the CE baseline (also the
// ConfReg teacher), the pretrained bias model and the probing rows.
struct ToySeedContext {
  std::uint64_t seed = 0;
  SyntheticData data;
  ToyModel baseline;
  BiasModel weak;
  RowMatrix probe_x;
  std::vector<std::uint32_t> probe_labels;
  double baseline_anti_accuracy = 0.0;
};

ToySeedContext PrepareToySeed(const ToyExperimentConfig& config,
                              std::uint64_t seed);

struct ToyRun {
  DebiasObjective objective;
  std::uint64_t seed = 0;
  bool pipeline = true;
  double train_accuracy = 0.0;
  double iid_accuracy = 0.0;
  double anti_accuracy = 0.0;
  double baseline_anti_accuracy = 0.0;
  ToyModel main;
  ReprMatrix reprs;
  std::optional<ProbeReport> probe;
};

// Trains one objective on the seed's data (CE reuses the baseline), extracts
// representations of the probing rows and, when configured, probes them.
ToyRun RunToyObjective(const ToyExperimentConfig& config,
                       const ToySeedContext& context,
                       const DebiasObjective& objective);

// "ce", "dfl-g2", "poe", "confreg"; "-e2e" appended for end-to-end runs.
std::string ToyRunName(const DebiasObjective& objective, bool pipeline);

}  // namespace probekit

#endif  // PROBEKIT_TOY_EXPERIMENT_H_
