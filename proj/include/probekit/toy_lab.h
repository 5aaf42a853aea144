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

#ifndef PROBEKIT_TOY_LAB_H_
#define PROBEKIT_TOY_LAB_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "probekit/dataset.h"
#include "probekit/objectives.h"
#include "probekit/repr_io.h"
#include "probekit/synthetic.h"
#include "probekit/toy_model.h"

namespace probekit {

enum class ObjectiveKind { kCe, kDfl, kPoe, kConfReg };

std::string_view ObjectiveName(ObjectiveKind kind);
// "ce", "dfl", "poe", "confreg"; kConfig otherwise.
ObjectiveKind ParseObjective(std::string_view name);

struct DebiasObjective {
  ObjectiveKind kind = ObjectiveKind::kCe;
  double gamma = 2.0;  // DFL focusing parameter
};

// Which view of an example a bias model reads.
enum class BiasInput {
  kInput,         // the main model's input (implicit bias model)
  kBiasFeatures,  // the explicit bias features only
};

struct BiasModel {
  ToyModel model;
  BiasInput input = BiasInput::kBiasFeatures;
  // Pipeline training of the bias model uses a seeded subsample of this
  // fraction of the training rows.
  double subset_fraction = 1.0;
  // Already trained; pipeline mode uses it as is.
  bool trained = false;
};

struct ToyHyper {
  double learning_rate = 0.05;
  int epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  bool pipeline = true;
  // End-to-end PoE: the combined loss also updates the bias model.
  bool poe_bias_backprop = true;
  // End-to-end DFL: the (1 - p_b)^gamma weight also updates the bias model.
  bool dfl_weight_backprop = false;
  ConfRegExponent confreg_exponent = DefaultConfRegExponent;
};

struct ToyModels {
  ToyModel main;
  std::optional<BiasModel> bias;
  // ConfReg teacher; trained with CE first unless teacher_trained.
  std::optional<ToyModel> teacher;
  bool teacher_trained = false;
};

// Pipeline mode trains (or reuses) the bias model with CE, freezes it, then
// trains the main model on the objective. End-to-end mode (DFL, PoE) updates
// both every step; the bias model always receives its own CE gradient.
// kConfig when the objective lacks a bias model/teacher, when ConfReg is
// requested end-to-end, or when gamma is negative or not finite.
ToyModels TrainToy(ToyModels models, const DebiasObjective& objective,
                   const SyntheticSplit& data, const ToyHyper& hyper);

// Plain cross-entropy training of one model on one view of the data.
void TrainCe(ToyModel& model, const RowMatrix& x,
             std::span<const std::uint32_t> y, const ToyHyper& hyper);

// CE training of the bias model on its view (and subsample); no-op when
// bias.trained is already set.
void PretrainBiasModel(BiasModel& bias, const SyntheticSplit& data,
                       const ToyHyper& hyper);

const RowMatrix& BiasView(const BiasModel& bias, const SyntheticSplit& data);

double ToyAccuracy(const ToyModel& model, const RowMatrix& x,
                   std::span<const std::uint32_t> y);

// One row per input row: the model's last hidden activation, labelled with
// prop_labels; ids are row positions.
ReprMatrix ExtractReprs(const ToyModel& model, const RowMatrix& rows,
                        std::span<const std::uint32_t> prop_labels,
                        std::uint32_t k = 2);

// [hypothesis tokens all in premise, hypothesis is a contiguous run of the
//  premise, shared tokens / premise tokens]
std::array<double, 3> LexicalBiasFeatures(const SentencePair& pair);

}  // namespace probekit

#endif  // PROBEKIT_TOY_LAB_H_
