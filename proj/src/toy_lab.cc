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

#include "probekit/toy_lab.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_set>

#include "probekit/error.h"
#include "probekit/probing.h"

namespace probekit {
namespace {

RowMatrix GatherRows(const RowMatrix& x, std::span<const std::size_t> idx) {
  RowMatrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        x.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

std::vector<std::uint32_t> GatherLabels(std::span<const std::uint32_t> y,
                                        std::span<const std::size_t> idx) {
  std::vector<std::uint32_t> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

// Runs `step(batch_indices)` over seeded mini-batches for hyper.epochs.
template <typename Step>
void ForEachBatch(std::size_t n, const ToyHyper& hyper, Step&& step) {
  if (n == 0) throw Error(ErrorCode::kEmptyData, "no training rows");
  if (hyper.batch_size == 0 || hyper.epochs < 0 ||
      !(hyper.learning_rate > 0.0)) {
    throw Error(ErrorCode::kConfig, "invalid toy training hyperparameters");
  }
  std::mt19937_64 rng(hyper.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += hyper.batch_size) {
      const std::size_t end = std::min(n, start + hyper.batch_size);
      step(std::span<const std::size_t>(order.data() + start, end - start));
    }
  }
}

void CheckGamma(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw Error(ErrorCode::kConfig,
                "gamma must be finite and >= 0, got " + std::to_string(gamma));
  }
}

}  // namespace

std::string_view ObjectiveName(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kCe:
      return "ce";
    case ObjectiveKind::kDfl:
      return "dfl";
    case ObjectiveKind::kPoe:
      return "poe";
    case ObjectiveKind::kConfReg:
      return "confreg";
  }
  return "?";
}

ObjectiveKind ParseObjective(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "ce") return ObjectiveKind::kCe;
  if (s == "dfl") return ObjectiveKind::kDfl;
  if (s == "poe") return ObjectiveKind::kPoe;
  if (s == "confreg" || s == "conf-reg") return ObjectiveKind::kConfReg;
  throw Error(ErrorCode::kConfig, "unknown objective '" + s + "'");
}

void PretrainBiasModel(BiasModel& bias, const SyntheticSplit& data,
                  const ToyHyper& hyper) {
  if (bias.trained) return;
  if (!(bias.subset_fraction > 0.0 && bias.subset_fraction <= 1.0)) {
    throw Error(ErrorCode::kConfig, "bias subset_fraction must be in (0, 1]");
  }
  const RowMatrix& view = BiasView(bias, data);
  ToyHyper h = hyper;
  h.seed = hyper.seed ^ 0xb1a5b1a5ULL;
  if (bias.subset_fraction < 1.0) {
    const std::size_t n = data.size();
    const std::size_t m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(bias.subset_fraction *
                                               static_cast<double>(n))));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(h.seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    TrainCe(bias.model, GatherRows(view, idx), GatherLabels(data.labels, idx),
            h);
  } else {
    TrainCe(bias.model, view, data.labels, h);
  }
  bias.trained = true;
}

const RowMatrix& BiasView(const BiasModel& bias, const SyntheticSplit& data) {
  return bias.input == BiasInput::kInput ? data.x : data.bias_features;
}

void TrainCe(ToyModel& model, const RowMatrix& x,
             std::span<const std::uint32_t> y, const ToyHyper& hyper) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kShape, "row/label count mismatch");
  }
  ForEachBatch(y.size(), hyper, [&](std::span<const std::size_t> idx) {
    const BatchActivations acts = BatchForward(model, GatherRows(x, idx));
    const LogitGrad g = CeLogitGrad(acts.logits, GatherLabels(y, idx));
    ApplyGradients(model, Backward(model, acts, g.grad_main),
                   hyper.learning_rate);
  });
}

ToyModels TrainToy(ToyModels models, const DebiasObjective& objective,
                   const SyntheticSplit& data, const ToyHyper& hyper) {
  const ObjectiveKind kind = objective.kind;
  if (kind == ObjectiveKind::kDfl) CheckGamma(objective.gamma);
  if (kind != ObjectiveKind::kCe && !models.bias) {
    throw Error(ErrorCode::kConfig, std::string(ObjectiveName(kind)) +
                                        " needs a bias model");
  }
  if (kind == ObjectiveKind::kConfReg) {
    if (!hyper.pipeline) {
      throw Error(ErrorCode::kConfig,
                  "confreg is defined only for pipeline training");
    }
    if (!models.teacher) {
      throw Error(ErrorCode::kConfig, "confreg needs a teacher model");
    }
  }

  if (kind == ObjectiveKind::kCe) {
    TrainCe(models.main, data.x, data.labels, hyper);
    return models;
  }

  BiasModel& bias = *models.bias;
  const RowMatrix& bias_view = BiasView(bias, data);
  if (hyper.pipeline) PretrainBiasModel(bias, data, hyper);

  if (kind == ObjectiveKind::kConfReg) {
    if (!models.teacher_trained) {
      ToyHyper h = hyper;
      h.seed = hyper.seed ^ 0x7eac7e77ULL;
      TrainCe(*models.teacher, data.x, data.labels, h);
      models.teacher_trained = true;
    }
    const RowMatrix teacher_log =
        LogSoftmaxRows(BatchForward(*models.teacher, data.x).logits);
    const RowMatrix weak_log =
        LogSoftmaxRows(BatchForward(bias.model, bias_view).logits);
    RowMatrix targets(teacher_log.rows(), teacher_log.cols());
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
      const double weak_gold =
          std::exp(weak_log(i, static_cast<Eigen::Index>(data.labels[i])));
      const Eigen::VectorXd teacher = teacher_log.row(i).transpose().array().exp();
      targets.row(i) =
          ConfRegScale(teacher, weak_gold, hyper.confreg_exponent).transpose();
    }
    ForEachBatch(data.size(), hyper, [&](std::span<const std::size_t> idx) {
      const BatchActivations acts = BatchForward(models.main, GatherRows(data.x, idx));
      const LogitGrad g = ConfRegLogitGrad(acts.logits, GatherRows(targets, idx));
      ApplyGradients(models.main, Backward(models.main, acts, g.grad_main),
                     hyper.learning_rate);
    });
    return models;
  }

  ForEachBatch(data.size(), hyper, [&](std::span<const std::size_t> idx) {
    const std::vector<std::uint32_t> y = GatherLabels(data.labels, idx);
    const BatchActivations acts_m = BatchForward(models.main, GatherRows(data.x, idx));
    const BatchActivations acts_b = BatchForward(bias.model, GatherRows(bias_view, idx));
    LogitGrad g;
    if (kind == ObjectiveKind::kDfl) {
      g = DflLogitGrad(acts_m.logits, acts_b.logits, y, objective.gamma,
                       !hyper.pipeline && hyper.dfl_weight_backprop);
    } else {
      g = PoeLogitGrad(acts_m.logits, acts_b.logits, y);
    }
    ApplyGradients(models.main, Backward(models.main, acts_m, g.grad_main),
                   hyper.learning_rate);
    if (!hyper.pipeline) {
      RowMatrix grad_b = CeLogitGrad(acts_b.logits, y).grad_main;
      const bool joint = kind == ObjectiveKind::kPoe
                             ? hyper.poe_bias_backprop
                             : hyper.dfl_weight_backprop;
      if (joint && g.grad_bias.size() == grad_b.size()) grad_b += g.grad_bias;
      ApplyGradients(bias.model, Backward(bias.model, acts_b, grad_b),
                     hyper.learning_rate);
    }
  });
  if (!hyper.pipeline) bias.trained = true;
  return models;
}

double ToyAccuracy(const ToyModel& model, const RowMatrix& x,
                   std::span<const std::uint32_t> y) {
  if (y.empty()) throw Error(ErrorCode::kEmptyData, "no evaluation rows");
  const RowMatrix logits = BatchForward(model, x).logits;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    if (static_cast<std::uint32_t>(arg) == y[static_cast<std::size_t>(i)]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

ReprMatrix ExtractReprs(const ToyModel& model, const RowMatrix& rows,
                        std::span<const std::uint32_t> prop_labels,
                        std::uint32_t k) {
  if (static_cast<std::size_t>(rows.rows()) != prop_labels.size()) {
    throw Error(ErrorCode::kShape, "row/label count mismatch");
  }
  const BatchActivations acts = BatchForward(model, rows);
  const RowMatrix& h = acts.repr();
  ReprMatrix out;
  out.n = prop_labels.size();
  out.d = static_cast<std::uint32_t>(h.cols());
  out.k = k;
  out.ids.resize(out.n);
  std::iota(out.ids.begin(), out.ids.end(), std::uint64_t{0});
  out.labels.assign(prop_labels.begin(), prop_labels.end());
  out.data.resize(out.n * out.d);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      out.data[static_cast<std::size_t>(i) * out.d + static_cast<std::size_t>(j)] =
          static_cast<float>(h(i, j));
    }
  }
  ValidateRepr(out);
  return out;
}

std::array<double, 3> LexicalBiasFeatures(const SentencePair& pair) {
  const std::vector<std::string> premise = Tokenize(pair.premise);
  const std::vector<std::string> hypothesis = Tokenize(pair.hypothesis);
  const std::unordered_set<std::string> premise_set(premise.begin(),
                                                    premise.end());
  std::size_t shared = 0;
  for (const std::string& t : std::set<std::string>(hypothesis.begin(),
                                                    hypothesis.end())) {
    if (premise_set.count(t)) ++shared;
  }
  const double ratio =
      premise_set.empty() ? 0.0
                          : static_cast<double>(shared) /
                                static_cast<double>(premise_set.size());
  return {static_cast<double>(EvalOverlap(pair)),
          static_cast<double>(EvalSubsequence(pair)), ratio};
}

}  // namespace probekit
