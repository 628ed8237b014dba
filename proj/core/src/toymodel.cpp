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

#include "ebt/toymodel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ebt/datapipe.hpp"
#include "ebt/rng.hpp"

namespace ebt {

namespace {

// 3x3 correlation with replicate border.
PixelGrid correlate3(const PixelGrid& image, const double (&k)[3][3]) {
  const int h = image.height(), w = image.width();
  PixelGrid out(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        const int rr = std::min(std::max(r + dr, 0), h - 1);
        for (int dc = -1; dc <= 1; ++dc) {
          const int cc = std::min(std::max(c + dc, 0), w - 1);
          acc += k[dr + 1][dc + 1] * image.at(rr, cc);
        }
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

PixelGrid correlate5(const PixelGrid& image, const double (&k)[5][5]) {
  const int h = image.height(), w = image.width();
  PixelGrid out(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dr = -2; dr <= 2; ++dr) {
        const int rr = std::min(std::max(r + dr, 0), h - 1);
        for (int dc = -2; dc <= 2; ++dc) {
          const int cc = std::min(std::max(c + dc, 0), w - 1);
          acc += k[dr + 2][dc + 2] * image.at(rr, cc);
        }
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

// Sobel and Laplacian responses are scaled by 1/4 so every channel stays
// O(1) for [0,1] inputs.
constexpr double kSobelX[3][3] = {{-0.25, 0.0, 0.25},
                                  {-0.50, 0.0, 0.50},
                                  {-0.25, 0.0, 0.25}};
constexpr double kSobelY[3][3] = {{-0.25, -0.50, -0.25},
                                  {0.0, 0.0, 0.0},
                                  {0.25, 0.50, 0.25}};
constexpr double kLaplace[3][3] = {{0.0, 0.25, 0.0},
                                   {0.25, -1.0, 0.25},
                                   {0.0, 0.25, 0.0}};
constexpr double kGauss3[3][3] = {{1.0 / 16, 2.0 / 16, 1.0 / 16},
                                  {2.0 / 16, 4.0 / 16, 2.0 / 16},
                                  {1.0 / 16, 2.0 / 16, 1.0 / 16}};
constexpr double kGauss5[5][5] = {
    {1.0 / 256, 4.0 / 256, 6.0 / 256, 4.0 / 256, 1.0 / 256},
    {4.0 / 256, 16.0 / 256, 24.0 / 256, 16.0 / 256, 4.0 / 256},
    {6.0 / 256, 24.0 / 256, 36.0 / 256, 24.0 / 256, 6.0 / 256},
    {4.0 / 256, 16.0 / 256, 24.0 / 256, 16.0 / 256, 4.0 / 256},
    {1.0 / 256, 4.0 / 256, 6.0 / 256, 4.0 / 256, 1.0 / 256}};

constexpr double kSigmoidFloor = 1e-15;
const double kSigmoidCeiling = 1.0 - 1e-15;

}  // namespace

std::string loss_kind_name(LossKind kind) {
  return kind == LossKind::kWbce ? "wbce" : "ebt";
}

LossKind loss_kind_from_name(const std::string& name) {
  if (name == "wbce") return LossKind::kWbce;
  if (name == "ebt") return LossKind::kEbt;
  throw UsageError("unknown loss kind '" + name + "' (expected wbce or ebt)");
}

FeatureStack featurize(const PixelGrid& image) {
  FeatureStack f;
  f.channels.reserve(kFeatureCount);
  PixelGrid gx = correlate3(image, kSobelX);
  PixelGrid gy = correlate3(image, kSobelY);
  PixelGrid mag(image.height(), image.width(), 0.0);
  for (std::int64_t i = 0; i < image.size(); ++i)
    mag[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
  f.channels.push_back(std::move(gx));
  f.channels.push_back(std::move(gy));
  f.channels.push_back(std::move(mag));
  f.channels.push_back(correlate3(image, kLaplace));
  f.channels.push_back(correlate3(image, kGauss3));
  f.channels.push_back(correlate5(image, kGauss5));
  f.channels.push_back(image);
  f.channels.push_back(PixelGrid(image.height(), image.width(), 1.0));
  return f;
}

PixelGrid forward(const FeatureStack& features, const ModelWeights& weights) {
  if (features.channels.size() != kFeatureCount)
    throw ShapeError("feature stack does not have the expected channel count");
  const int h = features.height(), w = features.width();
  PixelGrid pred(h, w, 0.0);
  for (std::int64_t i = 0; i < pred.size(); ++i) {
    double z = 0.0;
    for (int k = 0; k < kFeatureCount; ++k)
      z += weights.w[k] * features.channels[k][i];
    double s = 1.0 / (1.0 + std::exp(-z));
    if (s < kSigmoidFloor) s = kSigmoidFloor;
    if (s > kSigmoidCeiling) s = kSigmoidCeiling;
    pred[i] = s;
  }
  return pred;
}

WeightGrad weight_grad(const FeatureStack& features,
                       const ModelWeights& weights, const BinaryMap& gt,
                       const LossParams& params, LossKind kind) {
  if (features.height() != gt.height() || features.width() != gt.width())
    throw ShapeError("feature stack and ground truth shapes differ");
  const PixelGrid pred = forward(features, weights);

  LossValue loss;
  GradGrid dpred;
  if (kind == LossKind::kWbce) {
    loss = wbce_loss(pred, gt, params.lambda, params.epsilon);
    dpred = wbce_loss_grad(pred, gt, params.lambda, params.epsilon);
  } else {
    const TriClassMask mask = classify(gt, params.radius);
    loss = ebt_loss(pred, gt, mask, params);
    dpred = ebt_loss_grad(pred, gt, mask, params);
  }

  WeightGrad out;
  out.loss = loss.value;
  for (std::int64_t i = 0; i < pred.size(); ++i) {
    const double d = dpred[i] * pred[i] * (1.0 - pred[i]);
    if (d == 0.0) continue;
    for (int k = 0; k < kFeatureCount; ++k)
      out.grad[k] += d * features.channels[k][i];
  }
  return out;
}

void adam_step(OptimState& state, ModelWeights& weights,
               const std::array<double, kFeatureCount>& gradient) {
  for (double g : gradient)
    if (!std::isfinite(g)) throw NumericError("nonfinite gradient");

  state.step += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, state.step);
  const double bias2 = 1.0 - std::pow(state.beta2, state.step);
  for (int k = 0; k < kFeatureCount; ++k) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * gradient[k];
    state.v[k] =
        state.beta2 * state.v[k] + (1.0 - state.beta2) * gradient[k] * gradient[k];
    const double m_hat = state.m[k] / bias1;
    const double v_hat = state.v[k] / bias2;
    weights.w[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.guard);
    weights.w[k] *= 1.0 - state.weight_decay;
  }
}

TrainRecord train(const SampleSet& dataset, const TrainConfig& config) {
  if (dataset.empty()) throw UsageError("training set is empty");
  if (config.epochs < 1) throw UsageError("epochs must be >= 1");
  config.params.validate();

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset[i].gt.edge_count() > 0) usable.push_back(i);
  if (usable.empty())
    throw UsageError("every training image is edge-free; nothing to learn");

  // Feature stacks (and crops, when enabled) are cached per 5-epoch
  // block; gt is static so this changes nothing observable.
  std::vector<FeatureStack> features(usable.size());
  std::vector<BinaryMap> gts(usable.size());
  int cached_block = -1;
  auto refresh_inputs = [&](int block) {
    if (block == cached_block) return;
    cached_block = block;
    for (std::size_t j = 0; j < usable.size(); ++j) {
      const Sample& s = dataset[usable[j]];
      if (config.crop > 0) {
        const std::uint64_t crop_seed = Rng::mix(
            config.seed, static_cast<std::uint64_t>(block) * 100003ull + j);
        auto [img, gt] = random_crop(s.image, s.gt, config.crop, crop_seed);
        features[j] = featurize(img);
        gts[j] = std::move(gt);
      } else {
        features[j] = featurize(s.image);
        gts[j] = s.gt;
      }
    }
  };

  TrainRecord record;
  record.seed = config.seed;
  record.loss_kind = config.loss_kind;
  record.epoch_loss.reserve(config.epochs);

  ModelWeights weights;
  OptimState state = config.optim;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    refresh_inputs(config.crop > 0 ? epoch / 5 : 0);

    double loss_sum = 0.0;
    std::array<double, kFeatureCount> grad_sum{};
    for (std::size_t j = 0; j < usable.size(); ++j) {
      // Cropping can leave an edge-free view; skip it like any other
      // edge-free image.
      if (gts[j].edge_count() == 0) continue;
      const WeightGrad wg =
          weight_grad(features[j], weights, gts[j], config.params,
                      config.loss_kind);
      loss_sum += wg.loss;
      for (int k = 0; k < kFeatureCount; ++k) grad_sum[k] += wg.grad[k];
    }
    std::size_t used = 0;
    for (std::size_t j = 0; j < usable.size(); ++j)
      if (gts[j].edge_count() > 0) ++used;
    if (used == 0) throw UsageError("all cropped views are edge-free");

    for (int k = 0; k < kFeatureCount; ++k)
      grad_sum[k] /= static_cast<double>(used);
    record.epoch_loss.push_back(loss_sum / static_cast<double>(used));
    adam_step(state, weights, grad_sum);
  }

  record.final_weights = weights;
  return record;
}

void save_model_weights(const std::string& path, const ModelWeights& weights) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "ebt-model v1\n";
  out << "bank " << kFeatureBankId << "\n";
  out << "k " << kFeatureCount << "\n";
  char buf[64];
  for (double w : weights.w) {
    std::snprintf(buf, sizeof buf, "%.17g\n", w);
    out << buf;
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

ModelWeights load_model_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "ebt-model v1")
    throw IoError("'" + path + "': not an ebt-model v1 file");
  if (!std::getline(in, line) || line != std::string("bank ") + kFeatureBankId)
    throw IoError("'" + path + "': unknown feature bank");
  if (!std::getline(in, line) ||
      line != "k " + std::to_string(kFeatureCount))
    throw IoError("'" + path + "': unexpected weight count");
  ModelWeights weights;
  for (int k = 0; k < kFeatureCount; ++k) {
    if (!std::getline(in, line))
      throw IoError("'" + path + "': truncated weight list");
    std::istringstream ss(line);
    if (!(ss >> weights.w[k]))
      throw IoError("'" + path + "': malformed weight value");
  }
  return weights;
}

}  // namespace ebt
