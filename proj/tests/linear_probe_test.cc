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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"

namespace probekit {
namespace {

using testing::RandomMatrix;
using testing::RelErr;

// Two blobs at (+-3, +-3) with unit-bounded noise: margin well above 1.
void Blobs(std::size_t n, std::uint64_t seed, RowMatrix& x,
           std::vector<std::uint32_t>& y) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  x.resize(static_cast<Eigen::Index>(n), 2);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<std::uint32_t>(i % 2);
    const double c = y[i] ? 3.0 : -3.0;
    x(static_cast<Eigen::Index>(i), 0) = c + u(rng);
    x(static_cast<Eigen::Index>(i), 1) = c + u(rng);
  }
}

TEST(LinearProbeTest, ZeroProbeIsUniform) {
  const LinearProbe p2 = LinearProbe::Zero(2, 3);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(3);
  EXPECT_DOUBLE_EQ(ProbeLogProb(p2, x, 0), -1.0);
  EXPECT_DOUBLE_EQ(ProbeLogProb(p2, x, 1), -1.0);
  EXPECT_DOUBLE_EQ(ProbeLogProb(LinearProbe::Zero(4, 3), x, 2), -2.0);
}

TEST(LinearProbeTest, BiasOnlyLogProb) {
  LinearProbe p = LinearProbe::Zero(2, 1);
  p.bias << std::log(3.0), 0.0;
  EXPECT_NEAR(ProbeLogProb(p, Eigen::VectorXd::Zero(1), 0), std::log2(0.75),
              1e-15);
  EXPECT_NEAR(p.LogSoftmax(Eigen::VectorXd::Ones(1)).array().exp().sum(),
              1.0, 1e-12);
}

TEST(LinearProbeTest, LogProbStableForLargeLogits) {
  LinearProbe p = LinearProbe::Zero(2, 1);
  p.weights << 1e4, -1e4;
  const double lp = ProbeLogProb(p, Eigen::VectorXd::Ones(1), 1);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_NEAR(lp, -2e4 / std::log(2.0), 1e-6);
}

TEST(LinearProbeTest, ShapeErrors) {
  const LinearProbe p = LinearProbe::Zero(2, 3);
  EXPECT_ERROR_CODE(ProbeLogProb(p, Eigen::VectorXd::Zero(2), 0),
                    ErrorCode::kShape);
  EXPECT_ERROR_CODE(ProbeLogProb(p, Eigen::VectorXd::Zero(3), 2),
                    ErrorCode::kShape);
}

TEST(LinearProbeTest, SeparableBlobsReachFullAccuracy) {
  RowMatrix x;
  std::vector<std::uint32_t> y;
  Blobs(200, 1, x, y);
  const auto r = TrainProbe(x, y, 2, RowMatrix(), {}, ProbeTrainConfig{});
  EXPECT_DOUBLE_EQ(ProbeAccuracy(r.probe, x, y), 1.0);
}

TEST(LinearProbeTest, RandomLabelsStayNearChance) {
  std::mt19937_64 rng(3);
  const RowMatrix x = RandomMatrix(2000, 10, rng);
  std::vector<std::uint32_t> y(2000);
  for (auto& v : y) v = static_cast<std::uint32_t>(rng() % 2);
  const RowMatrix train = x.topRows(1000), test = x.bottomRows(1000);
  const std::vector<std::uint32_t> ytr(y.begin(), y.begin() + 1000),
      yte(y.begin() + 1000, y.end());
  ProbeTrainConfig cfg;
  cfg.seed = 7;
  const auto r = TrainProbe(train, ytr, 2, test.topRows(100),
                            std::span(yte).first(100), cfg);
  const double acc = ProbeAccuracy(r.probe, test, yte);
  EXPECT_GE(acc, 0.45);
  EXPECT_LE(acc, 0.55);
}

TEST(LinearProbeTest, DeterministicGivenSeed) {
  std::mt19937_64 rng(5);
  const RowMatrix x = RandomMatrix(300, 6, rng);
  std::vector<std::uint32_t> y(300);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x(i, 0) + 0.3 * x(i, 1) > 0;
  ProbeTrainConfig cfg;
  cfg.seed = 11;
  const auto a = TrainProbe(x, y, 2, RowMatrix(), {}, cfg);
  const auto b = TrainProbe(x, y, 2, RowMatrix(), {}, cfg);
  EXPECT_EQ(a.probe.weights, b.probe.weights);
  EXPECT_EQ(a.probe.bias, b.probe.bias);
  EXPECT_EQ(a.epochs_run, b.epochs_run);
}

TEST(LinearProbeTest, SingleClassPredictsThatClass) {
  std::mt19937_64 rng(2);
  const RowMatrix x = RandomMatrix(50, 3, rng);
  const std::vector<std::uint32_t> y(50, 1);
  const auto r = TrainProbe(x, y, 2, RowMatrix(), {}, ProbeTrainConfig{});
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(r.probe.Predict(x.row(i).transpose()), 1u);
  }
}

TEST(LinearProbeTest, EmptyInput) {
  EXPECT_ERROR_CODE(TrainProbe(RowMatrix(0, 3), {}, 2, RowMatrix(), {},
                               ProbeTrainConfig{}),
                    ErrorCode::kEmptyData);
}

TEST(LinearProbeTest, EarlyStoppingHaltsBeforeMaxEpochs) {
  RowMatrix x;
  std::vector<std::uint32_t> y;
  Blobs(200, 4, x, y);
  ProbeTrainConfig cfg;
  cfg.max_epochs = 50;
  const auto r = TrainProbe(x, y, 2, x, y, cfg);
  // Accuracy saturates at once, so patience ends training early.
  EXPECT_LE(r.epochs_run, 1 + cfg.patience + r.best_epoch);
  EXPECT_LT(r.epochs_run, cfg.max_epochs);
}

// Flattened (weights, bias) so finite differences can walk every entry.
Eigen::VectorXd Flatten(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
  Eigen::VectorXd v(w.size() + b.size());
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) v(t++) = w(i, j);
  for (Eigen::Index i = 0; i < b.size(); ++i) v(t++) = b(i);
  return v;
}

TEST(LinearProbeTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index k = 2 + trial % 3, d = 1 + trial % 5, n = 7;
    const RowMatrix x = RandomMatrix(n, d, rng);
    std::vector<std::uint32_t> y(n);
    for (auto& v : y) v = static_cast<std::uint32_t>(rng() % k);
    LinearProbe p;
    p.weights = RandomMatrix(k, d, rng);
    p.bias = RandomMatrix(k, 1, rng).col(0);
    const double wd = trial % 2 ? 0.3 : 0.0;
    const auto g = ProbeLossAndGradient(p, x, y, wd);
    const Eigen::VectorXd analytic = Flatten(g.grad_weights, g.grad_bias);
    Eigen::VectorXd numeric(analytic.size());
    const double h = 1e-5;
    Eigen::Index t = 0;
    auto fd = [&](double& param) {
      const double saved = param;
      param = saved + h;
      const double up = ProbeLossAndGradient(p, x, y, wd).loss;
      param = saved - h;
      const double down = ProbeLossAndGradient(p, x, y, wd).loss;
      param = saved;
      numeric(t++) = (up - down) / (2 * h);
    };
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < d; ++j) fd(p.weights(i, j));
    for (Eigen::Index i = 0; i < k; ++i) fd(p.bias(i));
    EXPECT_LT(RelErr(analytic, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(LinearProbeTest, InputScalingAbsorbedByLearningRate) {
  std::mt19937_64 rng(8);
  const RowMatrix x = RandomMatrix(400, 5, rng);
  std::vector<std::uint32_t> y(400);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = x(i, 0) - x(i, 2) + 0.5 * x(i, 4) > 0;
  }
  ProbeTrainConfig cfg;
  cfg.fit_bias = false;
  cfg.seed = 3;
  for (double c : {0.5, 2.0, 10.0}) {
    ProbeTrainConfig scaled = cfg;
    scaled.learning_rate = cfg.learning_rate / (c * c);
    const RowMatrix xc = c * x;
    const auto a = TrainProbe(x, y, 2, x, y, cfg);
    const auto b = TrainProbe(xc, y, 2, xc, y, scaled);
    EXPECT_EQ(a.epochs_run, b.epochs_run) << c;
    EXPECT_LT((a.probe.weights - c * b.probe.weights).cwiseAbs().maxCoeff(),
              1e-6)
        << c;
  }
}

}  // namespace
}  // namespace probekit
