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

#include "probekit/toy_experiment.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "probekit/error.h"

namespace probekit {
namespace {

constexpr std::uint64_t kInitSalt = 0x9e3779b97f4a7c15ULL;

ToyModel FreshMain(const ToyExperimentConfig& c, std::uint64_t seed) {
  return ToyModel::Create({static_cast<Eigen::Index>(c.data.input_dim()),
                           c.main_hidden, static_cast<Eigen::Index>(c.data.k)},
                          seed * kInitSalt + 1);
}

BiasModel FreshWeak(const ToyExperimentConfig& c, std::uint64_t seed) {
  const auto d_in = static_cast<Eigen::Index>(c.data.input_dim());
  const auto k = static_cast<Eigen::Index>(c.data.k);
  const std::uint64_t init = seed * kInitSalt + 2;
  BiasModel weak;
  switch (c.weak) {
    case WeakKind::kExplicit:
      weak.model = ToyModel::Create({k, k}, init);
      weak.input = BiasInput::kBiasFeatures;
      break;
    case WeakKind::kTiny:
      weak.model = ToyModel::Create({d_in, c.tiny_hidden, k}, init);
      weak.input = BiasInput::kInput;
      break;
    case WeakKind::kSubset:
      weak.model = ToyModel::Create({d_in, c.main_hidden, k}, init);
      weak.input = BiasInput::kInput;
      weak.subset_fraction = c.subset_fraction;
      break;
  }
  return weak;
}

// Keeps every row of the minority class of [bias == 0] and a seeded sample
// of the majority; rows stay in pool order.
void BalancedProbeRows(const SyntheticSplit& pool, std::uint64_t seed,
                       RowMatrix& x, std::vector<std::uint32_t>& labels) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (pool.bias_labels[i] == 0 ? pos : neg).push_back(i);
  }
  std::vector<std::size_t>& major = pos.size() >= neg.size() ? pos : neg;
  const std::size_t keep = std::min(pos.size(), neg.size());
  if (keep == 0) {
    throw Error(ErrorCode::kDegenerateProperty, "probe pool has one class");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(major.begin(), major.end(), rng);
  major.resize(keep);
  std::vector<std::size_t> rows(pos);
  rows.insert(rows.end(), neg.begin(), neg.end());
  std::sort(rows.begin(), rows.end());
  x.resize(static_cast<Eigen::Index>(rows.size()), pool.x.cols());
  labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) =
        pool.x.row(static_cast<Eigen::Index>(rows[i]));
    labels[i] = pool.bias_labels[rows[i]] == 0 ? 1 : 0;
  }
}

}  // namespace

std::string_view WeakKindName(WeakKind kind) {
  switch (kind) {
    case WeakKind::kExplicit:
      return "explicit";
    case WeakKind::kTiny:
      return "tiny";
    case WeakKind::kSubset:
      return "subset";
  }
  return "?";
}

WeakKind ParseWeakKind(std::string_view name) {
  if (name == "explicit") return WeakKind::kExplicit;
  if (name == "tiny") return WeakKind::kTiny;
  if (name == "subset") return WeakKind::kSubset;
  throw Error(ErrorCode::kConfig,
              "unknown weak model '" + std::string(name) + "'");
}

void ValidateToyExperimentConfig(const ToyExperimentConfig& c) {
  ValidateSyntheticConfig(c.data);
  ValidateOnlineCodeConfig(c.probe);
  if (c.main_hidden < 1 || c.tiny_hidden < 1) {
    throw Error(ErrorCode::kConfig, "hidden widths must be >= 1");
  }
  if (!(c.subset_fraction > 0.0 && c.subset_fraction <= 1.0)) {
    throw Error(ErrorCode::kConfig, "subset_fraction must be in (0, 1]");
  }
  if (!(c.hyper.learning_rate > 0.0) || c.hyper.epochs < 0 ||
      c.hyper.batch_size == 0) {
    throw Error(ErrorCode::kConfig, "invalid training hyperparameters");
  }
  if (c.probe_rows < 20) {
    throw Error(ErrorCode::kConfig, "probe_rows must be >= 20");
  }
}

nlohmann::ordered_json ToyExperimentConfigToJson(const ToyExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["data"] = SyntheticConfigToJson(c.data);
  j["main_hidden"] = c.main_hidden;
  j["tiny_hidden"] = c.tiny_hidden;
  j["subset_fraction"] = c.subset_fraction;
  j["weak"] = std::string(WeakKindName(c.weak));
  j["learning_rate"] = c.hyper.learning_rate;
  j["epochs"] = c.hyper.epochs;
  j["batch_size"] = c.hyper.batch_size;
  j["poe_bias_backprop"] = c.hyper.poe_bias_backprop;
  j["dfl_weight_backprop"] = c.hyper.dfl_weight_backprop;
  j["confreg_exponent"] = "1 - weak_gold_prob";
  j["probe_rows"] = c.probe_rows;
  j["probe"] = OnlineCodeConfigToJson(c.probe);
  j["run_probe"] = c.run_probe;
  return j;
}

ToyExperimentConfig ToyExperimentConfigFromJson(const nlohmann::json& j) {
  ToyExperimentConfig c;
  try {
    if (j.contains("data")) c.data = SyntheticConfigFromJson(j["data"]);
    if (j.contains("main_hidden")) c.main_hidden = j["main_hidden"].get<Eigen::Index>();
    if (j.contains("tiny_hidden")) c.tiny_hidden = j["tiny_hidden"].get<Eigen::Index>();
    if (j.contains("subset_fraction")) c.subset_fraction = j["subset_fraction"].get<double>();
    if (j.contains("weak")) c.weak = ParseWeakKind(j["weak"].get<std::string>());
    if (j.contains("learning_rate")) c.hyper.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) c.hyper.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) c.hyper.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("poe_bias_backprop")) c.hyper.poe_bias_backprop = j["poe_bias_backprop"].get<bool>();
    if (j.contains("dfl_weight_backprop")) c.hyper.dfl_weight_backprop = j["dfl_weight_backprop"].get<bool>();
    if (j.contains("probe_rows")) c.probe_rows = j["probe_rows"].get<std::size_t>();
    if (j.contains("probe")) c.probe = OnlineCodeConfigFromJson(j["probe"]);
    if (j.contains("run_probe")) c.run_probe = j["run_probe"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("toy config: ") + e.what());
  }
  ValidateToyExperimentConfig(c);
  return c;
}

ToySeedContext PrepareToySeed(const ToyExperimentConfig& config,
                              std::uint64_t seed) {
  ValidateToyExperimentConfig(config);
  ToySeedContext ctx;
  ctx.seed = seed;
  SyntheticBiasConfig data_cfg = config.data;
  data_cfg.seed = config.data.seed + seed;
  ctx.data = GenSynthetic(data_cfg);

  ToyHyper hyper = config.hyper;
  hyper.seed = seed;
  ctx.baseline = FreshMain(config, seed);
  TrainCe(ctx.baseline, ctx.data.train.x, ctx.data.train.labels, hyper);
  ctx.baseline_anti_accuracy = ToyAccuracy(ctx.baseline, ctx.data.anti_test.x,
                                           ctx.data.anti_test.labels);
  ctx.weak = FreshWeak(config, seed);
  PretrainBiasModel(ctx.weak, ctx.data.train, hyper);

  BalancedProbeRows(GenProbePool(data_cfg, config.probe_rows, 0), seed,
                    ctx.probe_x, ctx.probe_labels);
  return ctx;
}

std::string ToyRunName(const DebiasObjective& objective, bool pipeline) {
  std::ostringstream name;
  name << ObjectiveName(objective.kind);
  if (objective.kind == ObjectiveKind::kDfl) name << "-g" << objective.gamma;
  if (!pipeline) name << "-e2e";
  return name.str();
}

ToyRun RunToyObjective(const ToyExperimentConfig& config,
                       const ToySeedContext& ctx,
                       const DebiasObjective& objective) {
  ToyHyper hyper = config.hyper;
  hyper.seed = ctx.seed;
  ToyRun run;
  run.objective = objective;
  run.seed = ctx.seed;
  run.pipeline = hyper.pipeline;
  run.baseline_anti_accuracy = ctx.baseline_anti_accuracy;

  if (objective.kind == ObjectiveKind::kCe) {
    run.main = ctx.baseline;
  } else {
    ToyModels models;
    models.main = FreshMain(config, ctx.seed);
    if (hyper.pipeline) {
      models.bias = ctx.weak;
    } else {
      models.bias = FreshWeak(config, ctx.seed);
    }
    models.teacher = ctx.baseline;
    models.teacher_trained = true;
    run.main = TrainToy(std::move(models), objective, ctx.data.train, hyper).main;
  }

  const SyntheticData& d = ctx.data;
  run.train_accuracy = ToyAccuracy(run.main, d.train.x, d.train.labels);
  run.iid_accuracy = ToyAccuracy(run.main, d.iid_test.x, d.iid_test.labels);
  run.anti_accuracy = ToyAccuracy(run.main, d.anti_test.x, d.anti_test.labels);
  run.reprs = ExtractReprs(run.main, ctx.probe_x, ctx.probe_labels, 2);
  if (config.run_probe) {
    OnlineCodeConfig probe = config.probe;
    probe.seed = config.probe.seed + ctx.seed;
    run.probe = OnlineCode(ProbeInputFromRepr(run.reprs), probe).report;
  }
  return run;
}

}  // namespace probekit
