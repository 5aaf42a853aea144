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

#ifndef PROBEKIT_LINEAR_PROBE_H_
#define PROBEKIT_LINEAR_PROBE_H_

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "probekit/repr_io.h"

namespace probekit {

// Multinomial logistic regression: p(y | x) = softmax(W x + b)[y].
struct LinearProbe {
  Eigen::MatrixXd weights;  // k x d
  Eigen::VectorXd bias;     // k

  static LinearProbe Zero(Eigen::Index k, Eigen::Index d);

  Eigen::Index classes() const { return weights.rows(); }
  Eigen::Index dim() const { return weights.cols(); }

  // Natural-log class probabilities, log-sum-exp stabilized.
  Eigen::VectorXd LogSoftmax(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::uint32_t Predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct ProbeTrainConfig {
  double learning_rate = 0.1;
  std::size_t batch_size = 64;
  int max_epochs = 50;
  int patience = 4;
  double tolerance = 1e-3;
  double weight_decay = 0.0;
  // With fit_bias = false the intercept stays at zero.
  bool fit_bias = true;
  std::uint64_t seed = 0;
};

struct ProbeTrainResult {
  LinearProbe probe;
  int epochs_run = 0;
  int best_epoch = 0;
  double best_valid_accuracy = 0.0;
};

// Rows of `x` are examples. Mini-batch gradient descent on mean cross-entropy
// (+ weight_decay/2 * |W|^2) from zero parameters; each epoch visits the rows
// in a seeded shuffle. Stops after `patience` epochs whose validation accuracy
// fails to beat the best by more than `tolerance`, or at max_epochs, and
// returns the best-epoch parameters. kEmptyData if there are no rows,
// kShape on mismatched sizes or labels >= k.
ProbeTrainResult TrainProbe(const RowMatrix& x,
                            std::span<const std::uint32_t> labels,
                            std::uint32_t k, const RowMatrix& valid_x,
                            std::span<const std::uint32_t> valid_labels,
                            const ProbeTrainConfig& config);

// log2 softmax(W x + b)[y]. kShape on dimension mismatch or y >= k.
double ProbeLogProb(const LinearProbe& probe,
                    const Eigen::Ref<const Eigen::VectorXd>& x,
                    std::uint32_t y);

double ProbeAccuracy(const LinearProbe& probe, const RowMatrix& x,
                     std::span<const std::uint32_t> labels);

// Mean cross-entropy in nats plus the L2 term, and its gradient.
struct ProbeLossGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_bias;
};
ProbeLossGrad ProbeLossAndGradient(const LinearProbe& probe, const RowMatrix& x,
                                   std::span<const std::uint32_t> labels,
                                   double weight_decay = 0.0);

}  // namespace probekit

#endif  // PROBEKIT_LINEAR_PROBE_H_
