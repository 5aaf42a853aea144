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

#ifndef PROBEKIT_TOY_MODEL_H_
#define PROBEKIT_TOY_MODEL_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "probekit/repr_io.h"

namespace probekit {

// Feed-forward classifier: tanh hidden layers, softmax output. The last
// hidden activation is the model's representation; with no hidden layer the
// representation is the input itself.
struct ToyModel {
  std::vector<Eigen::Index> layer_dims;  // {d_in, h_1, ..., k}
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;

  // Gaussian weights with variance 1/fan_in, zero biases.
  static ToyModel Create(std::vector<Eigen::Index> dims, std::uint64_t seed);
  static ToyModel Zeros(std::vector<Eigen::Index> dims);

  Eigen::Index input_dim() const { return layer_dims.front(); }
  Eigen::Index classes() const { return layer_dims.back(); }
  Eigen::Index repr_dim() const { return layer_dims[layer_dims.size() - 2]; }
  std::size_t layers() const { return weights.size(); }

  bool operator==(const ToyModel&) const = default;
};

struct ForwardResult {
  Eigen::VectorXd probs;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd repr;
};

// kShape when x has the wrong width.
ForwardResult Forward(const ToyModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x);

// Activations for a batch (rows are examples). activations[0] is the input,
// activations[l] the output of hidden layer l; logits are pre-softmax.
struct BatchActivations {
  std::vector<RowMatrix> activations;
  RowMatrix logits;

  const RowMatrix& repr() const { return activations.back(); }
};
BatchActivations BatchForward(const ToyModel& model, const RowMatrix& x);

struct ToyGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static ToyGradients ZerosLike(const ToyModel& model);
};

// Back-propagates dLoss/dLogits (one row per example) through the network.
ToyGradients Backward(const ToyModel& model, const BatchActivations& acts,
                      const RowMatrix& grad_logits);

// params -= lr * grads
void ApplyGradients(ToyModel& model, const ToyGradients& grads, double lr);

// Row-wise log-softmax.
RowMatrix LogSoftmaxRows(const RowMatrix& logits);

}  // namespace probekit

#endif  // PROBEKIT_TOY_MODEL_H_
