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

#include "probekit/linear_probe.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "probekit/error.h"

namespace probekit {
namespace {

void CheckLabels(std::span<const std::uint32_t> labels, std::uint32_t k,
                 Eigen::Index rows) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw Error(ErrorCode::kShape, "label count differs from row count");
  }
  for (auto y : labels) {
    if (y >= k) {
      throw Error(ErrorCode::kShape, "label " + std::to_string(y) +
                                         " out of range for k=" +
                                         std::to_string(k));
    }
  }
}

// Row-wise softmax of logits, in place.
void SoftmaxRows(Eigen::MatrixXd& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

}  // namespace

LinearProbe LinearProbe::Zero(Eigen::Index k, Eigen::Index d) {
  return {Eigen::MatrixXd::Zero(k, d), Eigen::VectorXd::Zero(k)};
}

Eigen::VectorXd LinearProbe::LogSoftmax(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd z = weights * x + bias;
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return z.array() - lse;
}

std::uint32_t LinearProbe::Predict(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd z = weights * x + bias;
  Eigen::Index best = 0;
  z.maxCoeff(&best);
  return static_cast<std::uint32_t>(best);
}

double ProbeLogProb(const LinearProbe& probe,
                    const Eigen::Ref<const Eigen::VectorXd>& x,
                    std::uint32_t y) {
  if (x.size() != probe.dim()) {
    throw Error(ErrorCode::kShape, "probe expects dimension " +
                                       std::to_string(probe.dim()) + ", got " +
                                       std::to_string(x.size()));
  }
  if (y >= probe.classes()) {
    throw Error(ErrorCode::kShape, "label out of range");
  }
  return probe.LogSoftmax(x)[y] / std::log(2.0);
}

double ProbeAccuracy(const LinearProbe& probe, const RowMatrix& x,
                     std::span<const std::uint32_t> labels) {
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (probe.Predict(x.row(i).transpose()) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

ProbeLossGrad ProbeLossAndGradient(const LinearProbe& probe, const RowMatrix& x,
                                   std::span<const std::uint32_t> labels,
                                   double weight_decay) {
  CheckLabels(labels, static_cast<std::uint32_t>(probe.classes()), x.rows());
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd p = x * probe.weights.transpose();
  p.rowwise() += probe.bias.transpose();
  ProbeLossGrad out;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const auto row = p.row(i);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    loss -= row(labels[i]) - lse;
  }
  SoftmaxRows(p);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, labels[i]) -= 1.0;
  out.loss = loss / n + 0.5 * weight_decay * probe.weights.squaredNorm();
  out.grad_weights = p.transpose() * x / n + weight_decay * probe.weights;
  out.grad_bias = p.colwise().sum().transpose() / n;
  return out;
}

ProbeTrainResult TrainProbe(const RowMatrix& x,
                            std::span<const std::uint32_t> labels,
                            std::uint32_t k, const RowMatrix& valid_x,
                            std::span<const std::uint32_t> valid_labels,
                            const ProbeTrainConfig& config) {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyData, "no training rows");
  if (k < 2) throw Error(ErrorCode::kShape, "probe needs k >= 2");
  CheckLabels(labels, k, x.rows());
  CheckLabels(valid_labels, k, valid_x.rows());
  if (valid_x.rows() > 0 && valid_x.cols() != x.cols()) {
    throw Error(ErrorCode::kShape, "validation width differs from training");
  }
  if (config.batch_size == 0 || config.max_epochs < 1) {
    throw Error(ErrorCode::kConfig, "batch_size and max_epochs must be positive");
  }

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  ProbeTrainResult result;
  result.probe = LinearProbe::Zero(k, d);
  result.best_valid_accuracy = -1.0;
  LinearProbe current = result.probe;

  std::mt19937_64 rng(config.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const Eigen::Index batch = static_cast<Eigen::Index>(config.batch_size);
  RowMatrix xb;
  Eigen::MatrixXd logits;
  int stale = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      xb.resize(len, d);
      for (Eigen::Index r = 0; r < len; ++r) xb.row(r) = x.row(order[start + r]);
      logits = xb * current.weights.transpose();
      logits.rowwise() += current.bias.transpose();
      SoftmaxRows(logits);
      for (Eigen::Index r = 0; r < len; ++r) logits(r, labels[order[start + r]]) -= 1.0;
      const double scale = config.learning_rate / static_cast<double>(len);
      Eigen::MatrixXd grad_w = logits.transpose() * xb;
      if (config.weight_decay != 0.0) {
        current.weights *= 1.0 - config.learning_rate * config.weight_decay;
      }
      current.weights -= scale * grad_w;
      if (config.fit_bias) {
        current.bias -= scale * logits.colwise().sum().transpose();
      }
    }
    result.epochs_run = epoch;
    const double acc = valid_x.rows() > 0
                           ? ProbeAccuracy(current, valid_x, valid_labels)
                           : ProbeAccuracy(current, x, labels);
    if (acc > result.best_valid_accuracy + config.tolerance) {
      result.best_valid_accuracy = acc;
      result.best_epoch = epoch;
      result.probe = current;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace probekit
