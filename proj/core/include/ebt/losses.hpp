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

#include "ebt/grid.hpp"
#include "ebt/regions.hpp"

namespace ebt {

/// Knobs shared by the EBT loss and its WBCE baseline. Defaults are the
/// unified setting used throughout: class coefficients 1.0 / 0.8 / 0.5,
/// boundary radius 7, WBCE balance lambda 1.1.
struct LossParams {
  double b_e = 1.0;
  double b_b = 0.8;
  double b_t = 0.5;
  int radius = 7;
  double lambda = 1.1;
  double epsilon = 1e-7;  // symmetric log clamp, applied as [eps, 1-eps]

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Scalar loss plus the unnormalized per-class sums behind it:
/// value == (per_class[0] + per_class[1] + per_class[2]) / pixel_count.
/// For the binary losses the split is (positive term, negative term, 0).
struct LossValue {
  double value = 0.0;
  std::array<double, 3> per_class{0.0, 0.0, 0.0};
};

/// Plain binary cross-entropy, predictions clamped to [eps, 1-eps].
LossValue bce_loss(const PixelGrid& pred, const BinaryMap& gt,
                   double epsilon = 1e-7);

/// Class-balanced cross-entropy: alpha = |Y-|/|Y| on edges and
/// lambda*(1-alpha) on non-edges.
LossValue wbce_loss(const PixelGrid& pred, const BinaryMap& gt,
                    double lambda = 1.1, double epsilon = 1e-7);

/// Tri-class loss: per-pixel weight B_c * W_c where c is the pixel's
/// class under `params.radius` and W_c the complement fraction of c.
/// Recomputes the mask from gt; use the overload below to reuse one.
LossValue ebt_loss(const PixelGrid& pred, const BinaryMap& gt,
                   const LossParams& params = {});

/// Same, with a caller-cached mask (gt is static during training, so the
/// mask can be computed once per image). `mask` must come from this gt at
/// radius params.radius.
LossValue ebt_loss(const PixelGrid& pred, const BinaryMap& gt,
                   const TriClassMask& mask, const LossParams& params);

/// d(wbce_loss)/d(pred), cell-wise. Zero wherever the clamp is active so
/// the loss/gradient pair stays consistent.
GradGrid wbce_loss_grad(const PixelGrid& pred, const BinaryMap& gt,
                        double lambda = 1.1, double epsilon = 1e-7);

/// d(ebt_loss)/d(pred), cell-wise: negative at edge cells, nonnegative at
/// boundary and texture cells, zero under the clamp.
GradGrid ebt_loss_grad(const PixelGrid& pred, const BinaryMap& gt,
                       const LossParams& params = {});
GradGrid ebt_loss_grad(const PixelGrid& pred, const BinaryMap& gt,
                       const TriClassMask& mask, const LossParams& params);

}  // namespace ebt
