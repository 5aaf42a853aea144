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

#include "probekit/objectives.h"

#include <algorithm>
#include <cmath>

#include "probekit/error.h"
#include "probekit/toy_model.h"

namespace probekit {
namespace {

void CheckBatch(const RowMatrix& logits, std::span<const std::uint32_t> y) {
  if (static_cast<Eigen::Index>(y.size()) != logits.rows()) {
    throw Error(ErrorCode::kShape, "label count differs from batch size");
  }
  for (auto label : y) {
    if (label >= logits.cols()) throw Error(ErrorCode::kShape, "label out of range");
  }
}

}  // namespace

LossValue LossCe(const Eigen::Ref<const Eigen::VectorXd>& probs_m,
                 std::uint32_t y) {
  if (y >= probs_m.size()) throw Error(ErrorCode::kShape, "label out of range");
  const double p = probs_m[y];
  LossValue out;
  out.clamped = p < kProbFloor;
  out.value = -std::log(std::max(p, kProbFloor));
  return out;
}

LossValue LossDfl(const Eigen::Ref<const Eigen::VectorXd>& probs_m,
                  const Eigen::Ref<const Eigen::VectorXd>& probs_b,
                  std::uint32_t y, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::kConfig, "gamma must be finite and >= 0");
  }
  if (probs_b.size() != probs_m.size()) {
    throw Error(ErrorCode::kShape, "main and bias distributions differ in size");
  }
  LossValue out = LossCe(probs_m, y);
  out.value *= std::pow(1.0 - probs_b[y], gamma);
  return out;
}

double LossPoe(const Eigen::Ref<const Eigen::VectorXd>& log_probs_m,
               const Eigen::Ref<const Eigen::VectorXd>& log_probs_b,
               std::uint32_t y) {
  if (log_probs_m.size() != log_probs_b.size()) {
    throw Error(ErrorCode::kShape, "main and bias distributions differ in size");
  }
  if (y >= log_probs_m.size()) throw Error(ErrorCode::kShape, "label out of range");
  if (log_probs_m.hasNaN() || log_probs_b.hasNaN()) {
    throw Error(ErrorCode::kNumeric, "NaN in product-of-experts input");
  }
  const Eigen::VectorXd z = log_probs_m + log_probs_b;
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return lse - z[y];
}

double DefaultConfRegExponent(double weak_gold_prob) {
  return 1.0 - weak_gold_prob;
}

Eigen::VectorXd ConfRegScale(
    const Eigen::Ref<const Eigen::VectorXd>& teacher_probs,
    double weak_gold_prob, const ConfRegExponent& exponent) {
  const double e = exponent(weak_gold_prob);
  Eigen::VectorXd scaled = teacher_probs.array().pow(e);
  return scaled / scaled.sum();
}

LossValue LossConfReg(const Eigen::Ref<const Eigen::VectorXd>& probs_m,
                      const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (probs_m.size() != target.size()) {
    throw Error(ErrorCode::kShape, "target and prediction differ in size");
  }
  LossValue out;
  for (Eigen::Index j = 0; j < probs_m.size(); ++j) {
    if (target[j] == 0.0) continue;
    if (probs_m[j] < kProbFloor) out.clamped = true;
    out.value -= target[j] * std::log(std::max(probs_m[j], kProbFloor));
  }
  return out;
}

LogitGrad CeLogitGrad(const RowMatrix& logits_m,
                      std::span<const std::uint32_t> y) {
  CheckBatch(logits_m, y);
  const double n = static_cast<double>(logits_m.rows());
  const RowMatrix lp = LogSoftmaxRows(logits_m);
  LogitGrad out;
  out.grad_main = lp.array().exp();
  for (Eigen::Index i = 0; i < lp.rows(); ++i) {
    out.loss -= lp(i, y[i]);
    out.grad_main(i, y[i]) -= 1.0;
  }
  out.loss /= n;
  out.grad_main /= n;
  return out;
}

LogitGrad DflLogitGrad(const RowMatrix& logits_m, const RowMatrix& logits_b,
                       std::span<const std::uint32_t> y, double gamma,
                       bool weight_backprop) {
  CheckBatch(logits_m, y);
  if (logits_b.rows() != logits_m.rows() || logits_b.cols() != logits_m.cols()) {
    throw Error(ErrorCode::kShape, "bias logits differ in shape");
  }
  const double n = static_cast<double>(logits_m.rows());
  const RowMatrix lpm = LogSoftmaxRows(logits_m);
  const RowMatrix lpb = LogSoftmaxRows(logits_b);
  LogitGrad out;
  out.grad_main = lpm.array().exp();
  out.grad_bias = RowMatrix::Zero(logits_b.rows(), logits_b.cols());
  for (Eigen::Index i = 0; i < lpm.rows(); ++i) {
    const double pb = std::exp(lpb(i, y[i]));
    const double w = std::pow(1.0 - pb, gamma);
    const double ce = -lpm(i, y[i]);
    out.loss += w * ce;
    out.grad_main(i, y[i]) -= 1.0;
    out.grad_main.row(i) *= w;
    if (weight_backprop && gamma > 0.0) {
      // d/dz_b of (1 - p_b[y])^gamma, with dp_b[y]/dz_b = p_b[y](e_y - p_b).
      const double dw_dpb =
          -gamma * std::pow(std::max(1.0 - pb, kProbFloor), gamma - 1.0);
      out.grad_bias.row(i) = -(ce * dw_dpb * pb) * lpb.row(i).array().exp();
      out.grad_bias(i, y[i]) += ce * dw_dpb * pb;
    }
  }
  out.loss /= n;
  out.grad_main /= n;
  out.grad_bias /= n;
  return out;
}

LogitGrad PoeLogitGrad(const RowMatrix& logits_m, const RowMatrix& logits_b,
                       std::span<const std::uint32_t> y) {
  CheckBatch(logits_m, y);
  if (logits_b.rows() != logits_m.rows() || logits_b.cols() != logits_m.cols()) {
    throw Error(ErrorCode::kShape, "bias logits differ in shape");
  }
  const double n = static_cast<double>(logits_m.rows());
  const RowMatrix combined =
      LogSoftmaxRows(LogSoftmaxRows(logits_m) + LogSoftmaxRows(logits_b));
  LogitGrad out;
  out.grad_main = combined.array().exp();
  for (Eigen::Index i = 0; i < combined.rows(); ++i) {
    out.loss -= combined(i, y[i]);
    out.grad_main(i, y[i]) -= 1.0;
  }
  out.loss /= n;
  out.grad_main /= n;
  out.grad_bias = out.grad_main;
  return out;
}

LogitGrad ConfRegLogitGrad(const RowMatrix& logits_m, const RowMatrix& targets) {
  if (targets.rows() != logits_m.rows() || targets.cols() != logits_m.cols()) {
    throw Error(ErrorCode::kShape, "targets differ in shape from logits");
  }
  const double n = static_cast<double>(logits_m.rows());
  const RowMatrix lp = LogSoftmaxRows(logits_m);
  LogitGrad out;
  out.loss = -(targets.array() * lp.array()).sum() / n;
  // Targets are distributions, so d/dz of -sum t ln softmax(z) is p - t.
  out.grad_main = (lp.array().exp() - targets.array()).matrix() / n;
  return out;
}

}  // namespace probekit
