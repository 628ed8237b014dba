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

#include "ebt/regions.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace ebt {

namespace {

constexpr int kFarAway = std::numeric_limits<int>::max() / 2;

// Exact chessboard (Chebyshev) distance to the nearest edge cell, by the
// classic two-pass chamfer sweep with unit mask weights. Cells of maps
// without any edge stay at kFarAway.
Grid<int> chebyshev_distance(const BinaryMap& gt) {
  const int h = gt.height();
  const int w = gt.width();
  Grid<int> dist(h, w, kFarAway);

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (gt.is_edge(r, c)) {
        dist.at(r, c) = 0;
        continue;
      }
      int best = kFarAway;
      if (r > 0) {
        best = std::min(best, dist.at(r - 1, c));
        if (c > 0) best = std::min(best, dist.at(r - 1, c - 1));
        if (c + 1 < w) best = std::min(best, dist.at(r - 1, c + 1));
      }
      if (c > 0) best = std::min(best, dist.at(r, c - 1));
      if (best < kFarAway) dist.at(r, c) = best + 1;
    }
  }
  for (int r = h - 1; r >= 0; --r) {
    for (int c = w - 1; c >= 0; --c) {
      int best = dist.at(r, c);
      if (r + 1 < h) {
        best = std::min(best, dist.at(r + 1, c) + 1);
        if (c > 0) best = std::min(best, dist.at(r + 1, c - 1) + 1);
        if (c + 1 < w) best = std::min(best, dist.at(r + 1, c + 1) + 1);
      }
      if (c + 1 < w) best = std::min(best, dist.at(r, c + 1) + 1);
      dist.at(r, c) = best;
    }
  }
  return dist;
}

TriClassMask mask_from_distances(const Grid<int>& dist, const BinaryMap& gt,
                                 int radius) {
  TriClassMask mask;
  mask.classes = Grid<PixelClass>(gt.height(), gt.width(), PixelClass::kTexture);
  mask.radius_used = radius;
  const std::int64_t n = gt.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (gt.is_edge(i)) {
      mask.classes[i] = PixelClass::kEdge;
      ++mask.count_edge;
    } else if (dist[i] <= radius) {
      mask.classes[i] = PixelClass::kBoundary;
      ++mask.count_boundary;
    } else {
      ++mask.count_texture;
    }
  }
  return mask;
}

}  // namespace

TriClassMask classify(const BinaryMap& gt, int radius) {
  if (radius < 0) throw DimensionError("boundary radius must be nonnegative");
  return mask_from_distances(chebyshev_distance(gt), gt, radius);
}

TriClassMask classify_oracle(const BinaryMap& gt, int radius) {
  if (radius < 0) throw DimensionError("boundary radius must be nonnegative");
  if (gt.size() > 4096)
    throw OracleSizeError("classify_oracle is limited to 4096 cells");

  struct Coord {
    int row, col;
  };
  std::vector<Coord> edges;
  for (int r = 0; r < gt.height(); ++r)
    for (int c = 0; c < gt.width(); ++c)
      if (gt.is_edge(r, c)) edges.push_back({r, c});

  TriClassMask mask;
  mask.classes = Grid<PixelClass>(gt.height(), gt.width(), PixelClass::kTexture);
  mask.radius_used = radius;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      if (gt.is_edge(r, c)) {
        mask.classes.at(r, c) = PixelClass::kEdge;
        ++mask.count_edge;
        continue;
      }
      bool near_edge = false;
      for (const Coord& e : edges) {
        if (std::max(std::abs(e.row - r), std::abs(e.col - c)) <= radius) {
          near_edge = true;
          break;
        }
      }
      if (near_edge) {
        mask.classes.at(r, c) = PixelClass::kBoundary;
        ++mask.count_boundary;
      } else {
        ++mask.count_texture;
      }
    }
  }
  return mask;
}

ClassWeights class_weights(const TriClassMask& mask) {
  ClassWeights w;
  w.total = mask.size();
  w.complement_e = mask.count_boundary + mask.count_texture;
  w.complement_b = mask.count_edge + mask.count_texture;
  w.complement_t = mask.count_edge + mask.count_boundary;
  w.w_e = static_cast<double>(w.complement_e) / static_cast<double>(w.total);
  w.w_b = static_cast<double>(w.complement_b) / static_cast<double>(w.total);
  w.w_t = static_cast<double>(w.complement_t) / static_cast<double>(w.total);
  return w;
}

}  // namespace ebt
