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

#ifndef PROBEKIT_OBJECTIVES_H_
#define PROBEKIT_OBJECTIVES_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "probekit/repr_io.h"

namespace probekit {

// Probabilities are floored here before any logarithm.
inline constexpr double kProbFloor = 1e-12;

struct LossValue {
  double value = 0.0;
  // Set when the gold probability hit kProbFloor.
  bool clamped = false;
};

// -ln p_m[y]
LossValue LossCe(const Eigen::Ref<const Eigen::VectorXd>& probs_m,
                 std::uint32_t y);

// (1 - p_b[y])^gamma * -ln p_m[y]
LossValue LossDfl(const Eigen::Ref<const Eigen::VectorXd>& probs_m,
                  const Eigen::Ref<const Eigen::VectorXd>& probs_b,
                  std::uint32_t y, double gamma);

// -ln softmax(log p_b + log p_m)[y]. kNumeric on NaN input.
double LossPoe(const Eigen::Ref<const Eigen::VectorXd>& log_probs_m,
               const Eigen::Ref<const Eigen::VectorXd>& log_probs_b,
               std::uint32_t y);

// Exponent applied to the teacher distribution given the weak model's
// probability of the gold label.
using ConfRegExponent = std::function<double(double weak_gold_prob)>;
// 1 - weak_gold_prob
double DefaultConfRegExponent(double weak_gold_prob);

// normalize(teacher ^ exponent(weak_gold_prob)); the default exponent turns a
// fully confident weak model into a uniform target and leaves the teacher
// untouched when the weak model gives the gold label no mass.
Eigen::VectorXd ConfRegScale(
    const Eigen::Ref<const Eigen::VectorXd>& teacher_probs,
    double weak_gold_prob,
    const ConfRegExponent& exponent = DefaultConfRegExponent);

// -sum_j target[j] * ln p_m[j]
LossValue LossConfReg(const Eigen::Ref<const Eigen::VectorXd>& probs_m,
                      const Eigen::Ref<const Eigen::VectorXd>& target);

// Batch-mean losses on logits and their gradients with respect to those
// logits. These are what training back-propagates.
struct LogitGrad {
  double loss = 0.0;
  RowMatrix grad_main;  // dLoss/dLogits of the main model
  RowMatrix grad_bias;  // dLoss/dLogits of the bias model (may be empty)
};

LogitGrad CeLogitGrad(const RowMatrix& logits_m,
                      std::span<const std::uint32_t> y);

// With weight_backprop the (1 - p_b)^gamma factor also receives gradient;
// otherwise it is a constant coefficient and grad_bias stays zero.
LogitGrad DflLogitGrad(const RowMatrix& logits_m, const RowMatrix& logits_b,
                       std::span<const std::uint32_t> y, double gamma,
                       bool weight_backprop);

LogitGrad PoeLogitGrad(const RowMatrix& logits_m, const RowMatrix& logits_b,
                       std::span<const std::uint32_t> y);

LogitGrad ConfRegLogitGrad(const RowMatrix& logits_m, const RowMatrix& targets);

}  // namespace probekit

#endif  // PROBEKIT_OBJECTIVES_H_
