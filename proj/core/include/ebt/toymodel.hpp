// Copyright 2026 The ebt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ebt/grid.hpp"
#include "ebt/losses.hpp"
#include "ebt/sample.hpp"

namespace ebt {

// Fixed filter bank: h-gradient, v-gradient, gradient magnitude,
// Laplacian, 3x3 and 5x5 Gaussian smoothings, raw intensity, constant
// bias. Nothing in it is learned; the model is a per-pixel logistic head
// over these channels.
inline constexpr int kFeatureCount = 8;
inline constexpr const char* kFeatureBankId = "filterbank8-v1";

struct FeatureStack {
  std::vector<PixelGrid> channels;  // kFeatureCount grids, image-shaped

  int height() const { return channels.front().height(); }
  int width() const { return channels.front().width(); }
};

struct ModelWeights {
  std::array<double, kFeatureCount> w{};
};

/// Adam state. Weight decay is decoupled: the shrinkage w *= (1 - decay)
/// is applied independently of the learning rate each step.
struct OptimState {
  std::int64_t step = 0;
  std::array<double, kFeatureCount> m{};
  std::array<double, kFeatureCount> v{};
  double learning_rate = 1e-4;
  double weight_decay = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double guard = 1e-8;
};

enum class LossKind { kWbce, kEbt };

std::string loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);  // UsageError if unknown

struct TrainRecord {
  std::vector<double> epoch_loss;  // one entry per completed epoch
  ModelWeights final_weights;
  std::uint64_t seed = 0;
  LossKind loss_kind = LossKind::kEbt;
};

struct TrainConfig {
  LossKind loss_kind = LossKind::kEbt;
  LossParams params{};
  int epochs = 200;
  std::uint64_t seed = 0;
  OptimState optim{};
  /// Side length of the square training crop; 0 trains on full images.
  /// Crop offsets are reseeded dataset-wide every five epochs.
  int crop = 0;
};

/// Deterministic filter responses with replicate-border convolution.
FeatureStack featurize(const PixelGrid& image);

/// Per-pixel sigmoid of the weighted channel sum, clamped into the open
/// interval: the sigmoid itself rounds to exactly 1.0 in doubles once the
/// logit passes ~37.
PixelGrid forward(const FeatureStack& features, const ModelWeights& weights);

struct WeightGrad {
  double loss = 0.0;
  std::array<double, kFeatureCount> grad{};
};

/// Loss and its gradient with respect to the model weights, chaining the
/// pixel-space loss gradient through the sigmoid.
WeightGrad weight_grad(const FeatureStack& features,
                       const ModelWeights& weights, const BinaryMap& gt,
                       const LossParams& params, LossKind kind);

/// One Adam update with bias-corrected moments. Throws NumericError on a
/// nonfinite gradient.
void adam_step(OptimState& state, ModelWeights& weights,
               const std::array<double, kFeatureCount>& gradient);

/// Full-batch training: one Adam step per epoch over the mean per-image
/// gradient, images visited in dataset order. Edge-free images are
/// skipped (their loss is identically zero). Bit-deterministic in
/// (dataset, config).
TrainRecord train(const SampleSet& dataset, const TrainConfig& config);

/// Versioned text round-trip for trained weights ("%.17g", lossless).
void save_model_weights(const std::string& path, const ModelWeights& weights);
ModelWeights load_model_weights(const std::string& path);

}  // namespace ebt
