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

#ifndef PROBEKIT_TESTS_ORACLES_H_
#define PROBEKIT_TESTS_ORACLES_H_

// Independent re-implementations used to check the library. They share no
// code with src/ beyond plain data types.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "probekit/online_code.h"
#include "probekit/repr_io.h"
#include "probekit/toy_model.h"

namespace probekit::oracle {

// Online codelength from the frozen block probes, by direct enumeration:
// uniform bits for the first block, then -log2 p(y | x) of every row of
// block i+1 under probe i. Cuts are recomputed from the timestamps.
inline long double BruteForceOnlineCodelength(
    const ProbeInput& input, const OnlineCodeResult& result,
    const std::vector<double>& timestamps) {
  const std::size_t n = input.train.size();
  std::vector<std::size_t> cuts;
  for (double t : timestamps) {
    cuts.push_back(static_cast<std::size_t>(std::floor(t / 100.0 * n + 1e-9)));
  }
  long double bits = cuts[0] * std::log2(static_cast<long double>(input.k));
  for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
    const LinearProbe& p = result.probes[b];
    for (std::size_t j = cuts[b]; j < cuts[b + 1]; ++j) {
      const std::size_t row = result.order[j];
      std::vector<long double> logits(static_cast<std::size_t>(p.weights.rows()));
      for (Eigen::Index c = 0; c < p.weights.rows(); ++c) {
        long double z = p.bias(c);
        for (Eigen::Index f = 0; f < p.weights.cols(); ++f) {
          z += static_cast<long double>(p.weights(c, f)) *
               input.features(static_cast<Eigen::Index>(row), f);
        }
        logits[static_cast<std::size_t>(c)] = z;
      }
      long double mx = logits[0];
      for (long double z : logits) mx = std::max(mx, z);
      long double sum = 0.0L;
      for (long double z : logits) sum += std::exp(z - mx);
      const long double log_p =
          logits[input.labels[row]] - mx - std::log(sum);
      bits -= log_p / std::log(2.0L);
    }
  }
  return bits;
}

// Closed-form Sigma-based product-moment coefficient.
inline long double PearsonClosedForm(std::span<const double> xs,
                                     std::span<const double> ys) {
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const long double n = static_cast<long double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long double x = xs[i], y = ys[i];
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) /
         std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// Hand-rolled forward pass: tanh hidden layers, softmax output.
inline std::vector<double> ToyForwardProbs(const ToyModel& m,
                                           std::vector<double> a) {
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    const auto& w = m.weights[l];
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = m.biases[l](i);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        s += w(i, j) * a[static_cast<std::size_t>(j)];
      }
      z[static_cast<std::size_t>(i)] = s;
    }
    if (l + 1 < m.weights.size()) {
      for (double& v : z) v = std::tanh(v);
    }
    a = std::move(z);
  }
  double mx = a[0];
  for (double v : a) mx = std::max(mx, v);
  double sum = 0;
  for (double& v : a) sum += (v = std::exp(v - mx));
  for (double& v : a) v /= sum;
  return a;
}

// Probe-ready rows whose label depends on a noisy linear score.
inline ProbeInput NoisyLinearProbeSet(std::size_t n, std::size_t d,
                                      std::uint32_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ProbeInput in;
  in.k = k;
  in.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd w(k, d);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(d);
    for (std::size_t j = 0; j < d; ++j) x(j) = g(rng);
    in.features.row(static_cast<Eigen::Index>(i)) = x.transpose();
    Eigen::VectorXd s = w * x;
    for (Eigen::Index c = 0; c < s.size(); ++c) s(c) += 1.5 * g(rng);
    Eigen::Index arg = 0;
    s.maxCoeff(&arg);
    in.labels.push_back(static_cast<std::uint32_t>(arg));
    in.ids.push_back(i);
  }
  in.train = {0, n};
  in.valid = in.test = {n, n};
  return in;
}

}  // namespace probekit::oracle

#endif  // PROBEKIT_TESTS_ORACLES_H_
