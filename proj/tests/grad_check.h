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

#ifndef PROBEKIT_TESTS_GRAD_CHECK_H_
#define PROBEKIT_TESTS_GRAD_CHECK_H_

// Central finite-difference checks of the training gradients. The numeric
// side evaluates the per-example losses on forward probabilities; the
// analytic side is what training uses (logit gradients + backprop).

#include <functional>
#include <random>
#include <vector>

#include "probekit/objectives.h"
#include "probekit/toy_lab.h"
#include "probekit/toy_model.h"
#include "test_util.h"

namespace probekit::testing {

inline constexpr double kFdStep = 1e-5;

inline std::vector<double*> Params(ToyModel& m) {
  std::vector<double*> out;
  for (std::size_t l = 0; l < m.layers(); ++l) {
    for (Eigen::Index i = 0; i < m.weights[l].size(); ++i) {
      out.push_back(m.weights[l].data() + i);
    }
    for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) {
      out.push_back(m.biases[l].data() + i);
    }
  }
  return out;
}

inline Eigen::VectorXd FlattenGrads(const ToyGradients& g) {
  std::vector<double> v;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    v.insert(v.end(), g.weights[l].data(),
             g.weights[l].data() + g.weights[l].size());
    v.insert(v.end(), g.biases[l].data(),
             g.biases[l].data() + g.biases[l].size());
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::VectorXd NumericGrad(ToyModel& m,
                                   const std::function<double()>& loss) {
  const std::vector<double*> ps = Params(m);
  Eigen::VectorXd g(static_cast<Eigen::Index>(ps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double saved = *ps[i];
    *ps[i] = saved + kFdStep;
    const double up = loss();
    *ps[i] = saved - kFdStep;
    const double down = loss();
    *ps[i] = saved;
    g(static_cast<Eigen::Index>(i)) = (up - down) / (2 * kFdStep);
  }
  return g;
}

// A random network of one of the shapes the lab uses: no hidden layer, one
// hidden layer, or two.
inline ToyModel RandomToy(Eigen::Index d_in, Eigen::Index k, int shape,
                          std::mt19937_64& rng) {
  std::vector<Eigen::Index> dims = {d_in};
  for (int h = 0; h < shape; ++h) dims.push_back(2 + static_cast<Eigen::Index>(rng() % 4));
  dims.push_back(k);
  ToyModel m = ToyModel::Create(dims, rng());
  std::normal_distribution<double> g(0.0, 0.3);
  for (auto& b : m.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = g(rng);
  }
  return m;
}

enum class GradCase { kCe, kDfl, kDflWeight, kPoe, kConfReg };

struct GradCheck {
  double main_rel_err = 0.0;
  double bias_rel_err = 0.0;  // only for cases that train the bias model
};

// One random instance: batch of `n` rows, k classes, random shapes.
inline GradCheck CheckObjectiveGradient(GradCase c, double gamma,
                                        std::mt19937_64& rng) {
  const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng() % 2);
  const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 4);
  const Eigen::Index n = 5;
  ToyModel main = RandomToy(d, k, 1 + static_cast<int>(rng() % 2), rng);
  ToyModel bias = RandomToy(d, k, static_cast<int>(rng() % 2), rng);
  const RowMatrix x = RandomMatrix(n, d, rng);
  std::vector<std::uint32_t> y(n);
  for (auto& v : y) v = static_cast<std::uint32_t>(rng() % k);
  RowMatrix targets(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd teacher = RandomMatrix(k, 1, rng).col(0).array().exp();
    teacher /= teacher.sum();
    const double weak = std::uniform_real_distribution<double>(0, 1)(rng);
    targets.row(i) = ConfRegScale(teacher, weak).transpose();
  }

  // Per-example losses on forward probabilities.
  auto loss = [&]() {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const ForwardResult fm = Forward(main, x.row(i).transpose());
      const ForwardResult fb = Forward(bias, x.row(i).transpose());
      switch (c) {
        case GradCase::kCe:
          total += LossCe(fm.probs, y[i]).value;
          break;
        case GradCase::kDfl:
        case GradCase::kDflWeight:
          total += LossDfl(fm.probs, fb.probs, y[i], gamma).value;
          break;
        case GradCase::kPoe:
          total += LossPoe(fm.log_probs, fb.log_probs, y[i]);
          break;
        case GradCase::kConfReg:
          total += LossConfReg(fm.probs, targets.row(i).transpose()).value;
          break;
      }
    }
    return total / static_cast<double>(n);
  };

  const BatchActivations am = BatchForward(main, x);
  const BatchActivations ab = BatchForward(bias, x);
  LogitGrad g;
  switch (c) {
    case GradCase::kCe:
      g = CeLogitGrad(am.logits, y);
      break;
    case GradCase::kDfl:
      g = DflLogitGrad(am.logits, ab.logits, y, gamma, false);
      break;
    case GradCase::kDflWeight:
      g = DflLogitGrad(am.logits, ab.logits, y, gamma, true);
      break;
    case GradCase::kPoe:
      g = PoeLogitGrad(am.logits, ab.logits, y);
      break;
    case GradCase::kConfReg:
      g = ConfRegLogitGrad(am.logits, targets);
      break;
  }
  GradCheck out;
  out.main_rel_err = RelErr(FlattenGrads(Backward(main, am, g.grad_main)),
                            NumericGrad(main, loss));
  if (c == GradCase::kPoe || c == GradCase::kDflWeight) {
    out.bias_rel_err = RelErr(FlattenGrads(Backward(bias, ab, g.grad_bias)),
                              NumericGrad(bias, loss));
  }
  return out;
}

}  // namespace probekit::testing

#endif  // PROBEKIT_TESTS_GRAD_CHECK_H_
