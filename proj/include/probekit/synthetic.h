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

#ifndef PROBEKIT_SYNTHETIC_H_
#define PROBEKIT_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "probekit/repr_io.h"

namespace probekit {

// Labelled data with a planted shortcut. Every example carries a bias label
// b that equals the task label y with probability bias_strength (otherwise a
// uniformly drawn different label). The main-model input is
//   [ signal (d_signal) | cue (d_bias) ]
// with signal = center[y] + bias_leak * center[b] + signal_noise * N(0, I)
// and cue = s * (0.5 + |g|) * code[b] for a random sign s and g ~ N(0, 1).
// The cue has zero mean given b, so it is not linearly readable from the
// raw input. Bias-only models see one-hot(b) instead (bias_features).
struct SyntheticBiasConfig {
  std::size_t n_train = 4000;
  std::size_t n_test = 2000;
  std::size_t d_signal = 8;
  std::size_t d_bias = 4;
  std::uint32_t k = 2;
  double bias_strength = 0.9;
  double signal_noise = 1.5;
  double bias_leak = 1.0;
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return d_signal + d_bias; }
};

// kConfig on out-of-range fields.
void ValidateSyntheticConfig(const SyntheticBiasConfig& cfg);
nlohmann::ordered_json SyntheticConfigToJson(const SyntheticBiasConfig& cfg);
SyntheticBiasConfig SyntheticConfigFromJson(const nlohmann::json& j);

struct SyntheticSplit {
  RowMatrix x;
  RowMatrix bias_features;  // one-hot(bias_labels)
  std::vector<std::uint32_t> labels;
  std::vector<std::uint32_t> bias_labels;

  std::size_t size() const { return labels.size(); }
};

struct SyntheticData {
  SyntheticSplit train;
  SyntheticSplit iid_test;  // same bias_strength as train
  SyntheticSplit anti_test;  // bias label never equals the task label
};

// Deterministic given cfg.seed.
SyntheticData GenSynthetic(const SyntheticBiasConfig& cfg);

// Rows from the same world (same centers and codes as GenSynthetic with this
// cfg) but with the bias label drawn independently of the task label, so a
// probe for the bias cannot lean on the task label. `stream` selects an
// independent draw.
SyntheticSplit GenProbePool(const SyntheticBiasConfig& cfg, std::size_t n,
                            std::uint64_t stream);

}  // namespace probekit

#endif  // PROBEKIT_SYNTHETIC_H_
