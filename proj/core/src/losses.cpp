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

#include "ebt/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace ebt {

namespace {

void check_pair(const PixelGrid& pred, const BinaryMap& gt) {
  if (!gt.same_shape(pred))
    throw ShapeError("prediction and ground truth shapes differ");
  for (double v : pred.cells())
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("prediction values must lie in [0,1]");
}

void check_scalars(double lambda, double epsilon) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
}

double clamped(double y, double eps) {
  if (y < eps) return eps;
  if (y > 1.0 - eps) return 1.0 - eps;
  return y;
}

}  // namespace

void LossParams::validate() const {
  if (!(b_e > 0.0) || !(b_b > 0.0) || !(b_t > 0.0))
    throw std::invalid_argument("class coefficients must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
}

LossValue bce_loss(const PixelGrid& pred, const BinaryMap& gt, double epsilon) {
  check_scalars(1.0, epsilon);
  check_pair(pred, gt);
  const std::int64_t n = gt.size();
  double pos = 0.0, neg = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double y = clamped(pred[i], epsilon);
    if (gt.is_edge(i))
      pos -= std::log(y);
    else
      neg -= std::log(1.0 - y);
  }
  LossValue out;
  out.per_class = {pos, neg, 0.0};
  out.value = (pos + neg) / static_cast<double>(n);
  return out;
}

LossValue wbce_loss(const PixelGrid& pred, const BinaryMap& gt, double lambda,
                    double epsilon) {
  check_scalars(lambda, epsilon);
  check_pair(pred, gt);
  const std::int64_t n = gt.size();
  const std::int64_t n_pos = gt.edge_count();
  const double alpha = static_cast<double>(n - n_pos) / static_cast<double>(n);
  const double one_minus_alpha =
      static_cast<double>(n_pos) / static_cast<double>(n);

  double pos_sum = 0.0, neg_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double y = clamped(pred[i], epsilon);
    if (gt.is_edge(i))
      pos_sum += std::log(y);
    else
      neg_sum += std::log(1.0 - y);
  }
  LossValue out;
  out.per_class = {-(alpha * pos_sum), -(lambda * one_minus_alpha * neg_sum),
                   0.0};
  out.value = (out.per_class[0] + out.per_class[1]) / static_cast<double>(n);
  return out;
}

LossValue ebt_loss(const PixelGrid& pred, const BinaryMap& gt,
                   const LossParams& params) {
  params.validate();
  return ebt_loss(pred, gt, classify(gt, params.radius), params);
}

LossValue ebt_loss(const PixelGrid& pred, const BinaryMap& gt,
                   const TriClassMask& mask, const LossParams& params) {
  check_pair(pred, gt);
  if (!gt.same_shape(mask.classes))
    throw ShapeError("mask and ground truth shapes differ");
  const std::int64_t n = gt.size();
  const ClassWeights w = class_weights(mask);

  double edge_sum = 0.0, boundary_sum = 0.0, texture_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double y = clamped(pred[i], params.epsilon);
    switch (mask.classes[i]) {
      case PixelClass::kEdge:
        edge_sum += std::log(y);
        break;
      case PixelClass::kBoundary:
        boundary_sum += std::log(1.0 - y);
        break;
      case PixelClass::kTexture:
        texture_sum += std::log(1.0 - y);
        break;
    }
  }
  LossValue out;
  out.per_class = {-(params.b_e * w.w_e * edge_sum),
                   -(params.b_b * w.w_b * boundary_sum),
                   -(params.b_t * w.w_t * texture_sum)};
  out.value = (out.per_class[0] + out.per_class[1] + out.per_class[2]) /
              static_cast<double>(n);
  return out;
}

GradGrid wbce_loss_grad(const PixelGrid& pred, const BinaryMap& gt,
                        double lambda, double epsilon) {
  check_scalars(lambda, epsilon);
  check_pair(pred, gt);
  const std::int64_t n = gt.size();
  const std::int64_t n_pos = gt.edge_count();
  const double alpha = static_cast<double>(n - n_pos) / static_cast<double>(n);
  const double neg_weight =
      lambda * static_cast<double>(n_pos) / static_cast<double>(n);

  GradGrid grad(gt.height(), gt.width(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double y = pred[i];
    if (y < epsilon || y > 1.0 - epsilon) continue;  // clamp active
    if (gt.is_edge(i))
      grad[i] = -alpha / (y * static_cast<double>(n));
    else
      grad[i] = neg_weight / ((1.0 - y) * static_cast<double>(n));
  }
  return grad;
}

GradGrid ebt_loss_grad(const PixelGrid& pred, const BinaryMap& gt,
                       const LossParams& params) {
  params.validate();
  return ebt_loss_grad(pred, gt, classify(gt, params.radius), params);
}

GradGrid ebt_loss_grad(const PixelGrid& pred, const BinaryMap& gt,
                       const TriClassMask& mask, const LossParams& params) {
  check_pair(pred, gt);
  if (!gt.same_shape(mask.classes))
    throw ShapeError("mask and ground truth shapes differ");
  const std::int64_t n = gt.size();
  const ClassWeights w = class_weights(mask);
  const double edge_w = params.b_e * w.w_e;
  const double boundary_w = params.b_b * w.w_b;
  const double texture_w = params.b_t * w.w_t;

  GradGrid grad(gt.height(), gt.width(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double y = pred[i];
    if (y < params.epsilon || y > 1.0 - params.epsilon) continue;
    switch (mask.classes[i]) {
      case PixelClass::kEdge:
        grad[i] = -edge_w / (y * static_cast<double>(n));
        break;
      case PixelClass::kBoundary:
        grad[i] = boundary_w / ((1.0 - y) * static_cast<double>(n));
        break;
      case PixelClass::kTexture:
        grad[i] = texture_w / ((1.0 - y) * static_cast<double>(n));
        break;
    }
  }
  return grad;
}

}  // namespace ebt
