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

#include "probekit/synthetic.h"

#include <cmath>
#include <random>

#include "probekit/error.h"

namespace probekit {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

struct World {
  Eigen::MatrixXd centers;  // k x d_signal
  Eigen::MatrixXd codes;    // k x d_bias, unit rows
};

World MakeWorld(const SyntheticBiasConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  World w;
  w.centers.resize(cfg.k, static_cast<Eigen::Index>(cfg.d_signal));
  w.codes.resize(cfg.k, static_cast<Eigen::Index>(cfg.d_bias));
  for (Eigen::Index c = 0; c < w.centers.rows(); ++c) {
    for (Eigen::Index j = 0; j < w.centers.cols(); ++j) w.centers(c, j) = normal(rng);
  }
  for (Eigen::Index c = 0; c < w.codes.rows(); ++c) {
    for (Eigen::Index j = 0; j < w.codes.cols(); ++j) w.codes(c, j) = normal(rng);
    w.codes.row(c).normalize();
  }
  return w;
}

// agree_prob < 0 means "never agree" (anti split).
SyntheticSplit Draw(const SyntheticBiasConfig& cfg, const World& world,
                    std::size_t n, double agree_prob, std::uint64_t stream) {
  std::mt19937_64 rng(cfg.seed ^ (kGolden * (stream + 1)));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> label(0, cfg.k - 1);
  std::uniform_int_distribution<std::uint32_t> offset(1, cfg.k - 1);
  std::bernoulli_distribution coin(0.5);

  const auto ds = static_cast<Eigen::Index>(cfg.d_signal);
  const auto db = static_cast<Eigen::Index>(cfg.d_bias);
  SyntheticSplit s;
  s.x.resize(static_cast<Eigen::Index>(n), ds + db);
  s.bias_features = RowMatrix::Zero(static_cast<Eigen::Index>(n), cfg.k);
  s.labels.resize(n);
  s.bias_labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const std::uint32_t y = label(rng);
    const bool agree = agree_prob >= 0.0 && unit(rng) < agree_prob;
    const std::uint32_t other = (y + offset(rng)) % cfg.k;
    const std::uint32_t b = agree ? y : other;
    s.labels[i] = y;
    s.bias_labels[i] = b;
    for (Eigen::Index j = 0; j < ds; ++j) {
      s.x(row, j) = world.centers(y, j) + cfg.bias_leak * world.centers(b, j) +
                    cfg.signal_noise * normal(rng);
    }
    const double magnitude = (coin(rng) ? 1.0 : -1.0) * (0.5 + std::abs(normal(rng)));
    for (Eigen::Index j = 0; j < db; ++j) {
      s.x(row, ds + j) = magnitude * world.codes(b, j);
    }
    s.bias_features(row, b) = 1.0;
  }
  return s;
}

}  // namespace

void ValidateSyntheticConfig(const SyntheticBiasConfig& cfg) {
  if (cfg.k < 2) throw Error(ErrorCode::kConfig, "synthetic data needs k >= 2");
  if (cfg.d_signal < 1 || cfg.d_bias < 1) {
    throw Error(ErrorCode::kConfig, "signal and bias widths must be >= 1");
  }
  if (!(cfg.bias_strength >= 0.0 && cfg.bias_strength <= 1.0)) {
    throw Error(ErrorCode::kConfig, "bias_strength must lie in [0, 1]");
  }
  if (!(cfg.signal_noise >= 0.0) || !std::isfinite(cfg.signal_noise) ||
      !std::isfinite(cfg.bias_leak)) {
    throw Error(ErrorCode::kConfig, "signal_noise/bias_leak must be finite, noise >= 0");
  }
  if (cfg.n_train == 0) throw Error(ErrorCode::kConfig, "n_train must be positive");
}

nlohmann::ordered_json SyntheticConfigToJson(const SyntheticBiasConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_train"] = cfg.n_train;
  j["n_test"] = cfg.n_test;
  j["d_signal"] = cfg.d_signal;
  j["d_bias"] = cfg.d_bias;
  j["k"] = cfg.k;
  j["bias_strength"] = cfg.bias_strength;
  j["signal_noise"] = cfg.signal_noise;
  j["bias_leak"] = cfg.bias_leak;
  j["seed"] = cfg.seed;
  return j;
}

SyntheticBiasConfig SyntheticConfigFromJson(const nlohmann::json& j) {
  SyntheticBiasConfig c;
  try {
    if (j.contains("n_train")) c.n_train = j["n_train"].get<std::size_t>();
    if (j.contains("n_test")) c.n_test = j["n_test"].get<std::size_t>();
    if (j.contains("d_signal")) c.d_signal = j["d_signal"].get<std::size_t>();
    if (j.contains("d_bias")) c.d_bias = j["d_bias"].get<std::size_t>();
    if (j.contains("k")) c.k = j["k"].get<std::uint32_t>();
    if (j.contains("bias_strength")) c.bias_strength = j["bias_strength"].get<double>();
    if (j.contains("signal_noise")) c.signal_noise = j["signal_noise"].get<double>();
    if (j.contains("bias_leak")) c.bias_leak = j["bias_leak"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("synthetic config: ") + e.what());
  }
  ValidateSyntheticConfig(c);
  return c;
}

SyntheticData GenSynthetic(const SyntheticBiasConfig& cfg) {
  ValidateSyntheticConfig(cfg);
  const World world = MakeWorld(cfg);
  SyntheticData data;
  data.train = Draw(cfg, world, cfg.n_train, cfg.bias_strength, 0);
  data.iid_test = Draw(cfg, world, cfg.n_test, cfg.bias_strength, 1);
  data.anti_test = Draw(cfg, world, cfg.n_test, -1.0, 2);
  return data;
}

SyntheticSplit GenProbePool(const SyntheticBiasConfig& cfg, std::size_t n,
                            std::uint64_t stream) {
  ValidateSyntheticConfig(cfg);
  const World world = MakeWorld(cfg);
  return Draw(cfg, world, n, 1.0 / cfg.k, 3 + stream);
}

}  // namespace probekit
