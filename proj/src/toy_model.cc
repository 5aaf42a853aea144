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

#include "probekit/toy_model.h"

#include <cmath>
#include <random>

#include "probekit/error.h"

namespace probekit {
namespace {

void CheckDims(const std::vector<Eigen::Index>& dims) {
  if (dims.size() < 2) {
    throw Error(ErrorCode::kShape, "a toy model needs input and output widths");
  }
  for (auto d : dims) {
    if (d < 1) throw Error(ErrorCode::kShape, "layer widths must be positive");
  }
  if (dims.back() < 2) throw Error(ErrorCode::kShape, "need k >= 2 classes");
}

}  // namespace

ToyModel ToyModel::Zeros(std::vector<Eigen::Index> dims) {
  CheckDims(dims);
  ToyModel m;
  m.layer_dims = std::move(dims);
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    m.weights.push_back(
        Eigen::MatrixXd::Zero(m.layer_dims[l + 1], m.layer_dims[l]));
    m.biases.push_back(Eigen::VectorXd::Zero(m.layer_dims[l + 1]));
  }
  return m;
}

ToyModel ToyModel::Create(std::vector<Eigen::Index> dims, std::uint64_t seed) {
  ToyModel m = Zeros(std::move(dims));
  std::mt19937_64 rng(seed);
  for (auto& w : m.weights) {
    std::normal_distribution<double> normal(
        0.0, 1.0 / std::sqrt(static_cast<double>(w.cols())));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = normal(rng);
    }
  }
  return m;
}

ToyGradients ToyGradients::ZerosLike(const ToyModel& model) {
  ToyGradients g;
  for (std::size_t l = 0; l < model.layers(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(),
                                              model.weights[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }
  return g;
}

RowMatrix LogSoftmaxRows(const RowMatrix& logits) {
  RowMatrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

ForwardResult Forward(const ToyModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.input_dim()) {
    throw Error(ErrorCode::kShape, "toy model expects input width " +
                                       std::to_string(model.input_dim()) +
                                       ", got " + std::to_string(x.size()));
  }
  Eigen::VectorXd h = x;
  const std::size_t last = model.layers() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    h = (model.weights[l] * h + model.biases[l]).array().tanh().matrix();
  }
  ForwardResult out;
  out.repr = h;
  const Eigen::VectorXd z = model.weights[last] * h + model.biases[last];
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  out.log_probs = z.array() - lse;
  out.probs = out.log_probs.array().exp();
  return out;
}

BatchActivations BatchForward(const ToyModel& model, const RowMatrix& x) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorCode::kShape, "toy model expects input width " +
                                       std::to_string(model.input_dim()) +
                                       ", got " + std::to_string(x.cols()));
  }
  BatchActivations acts;
  acts.activations.reserve(model.layers());
  acts.activations.push_back(x);
  const std::size_t last = model.layers() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    RowMatrix z = acts.activations.back() * model.weights[l].transpose();
    z.rowwise() += model.biases[l].transpose();
    acts.activations.push_back(z.array().tanh().matrix());
  }
  acts.logits = acts.activations.back() * model.weights[last].transpose();
  acts.logits.rowwise() += model.biases[last].transpose();
  return acts;
}

ToyGradients Backward(const ToyModel& model, const BatchActivations& acts,
                      const RowMatrix& grad_logits) {
  ToyGradients g = ToyGradients::ZerosLike(model);
  RowMatrix delta = grad_logits;
  for (std::size_t l = model.layers(); l-- > 0;) {
    const RowMatrix& input = acts.activations[l];
    g.weights[l] = delta.transpose() * input;
    g.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    RowMatrix back = delta * model.weights[l];
    // tanh'(z) = 1 - tanh(z)^2, and activations[l] holds tanh(z).
    delta = back.array() * (1.0 - input.array().square());
  }
  return g;
}

void ApplyGradients(ToyModel& model, const ToyGradients& grads, double lr) {
  for (std::size_t l = 0; l < model.layers(); ++l) {
    model.weights[l] -= lr * grads.weights[l];
    model.biases[l] -= lr * grads.biases[l];
  }
}

}  // namespace probekit
