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

#include <cstdint>

#include "ebt/grid.hpp"

namespace ebt {

enum class PixelClass : std::uint8_t { kEdge = 0, kBoundary = 1, kTexture = 2 };

/// Exhaustive, disjoint partition of a ground-truth map into edge,
/// boundary, and texture pixels. Boundary pixels are the non-edge cells
/// within Chebyshev distance `radius_used` of some edge cell; windows are
/// clipped at the image border, never padded.
struct TriClassMask {
  Grid<PixelClass> classes;
  std::int64_t count_edge = 0;
  std::int64_t count_boundary = 0;
  std::int64_t count_texture = 0;
  int radius_used = 0;

  int height() const { return classes.height(); }
  int width() const { return classes.width(); }
  std::int64_t size() const { return classes.size(); }
};

/// Adaptive class-balance weights: each weight is the fraction of pixels
/// NOT in its class, so w_e + w_b + w_t == 2. Three independently rounded
/// doubles cannot carry that identity exactly (n=3 with counts (0,1,2)
/// already breaks it), so the exact integer numerators are kept alongside
/// and the identity holds as complement_e + complement_b + complement_t
/// == 2 * total.
struct ClassWeights {
  double w_e = 0.0;
  double w_b = 0.0;
  double w_t = 0.0;
  std::int64_t complement_e = 0;  // count_boundary + count_texture
  std::int64_t complement_b = 0;  // count_edge + count_texture
  std::int64_t complement_t = 0;  // count_edge + count_boundary
  std::int64_t total = 0;
};

/// Partitions `gt` with boundary radius `radius`. Runs an exact chessboard
/// distance transform, so cost is O(H*W) regardless of the radius.
TriClassMask classify(const BinaryMap& gt, int radius);

/// Same contract as classify(), by brute-force scan of every (cell, edge)
/// pair. Guarded to grids of at most 4096 cells; exists to certify the
/// production path.
TriClassMask classify_oracle(const BinaryMap& gt, int radius);

/// Per-image weights from mask counts. Never aggregate across a batch.
ClassWeights class_weights(const TriClassMask& mask);

}  // namespace ebt
