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
#include <utility>
#include <vector>

#include "ebt/error.hpp"

namespace ebt {

/// Dense row-major H×W grid. Both extents are at least 1.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, T fill = T{})
      : height_(height), width_(width),
        cells_(checked_size(height, width), fill) {}
  Grid(int height, int width, std::vector<T> cells)
      : height_(height), width_(width), cells_(std::move(cells)) {
    if (cells_.size() != checked_size(height, width))
      throw DimensionError("cell count does not match grid extent");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(height_) * width_;
  }

  T& at(int row, int col) {
    return cells_[static_cast<std::size_t>(row) * width_ + col];
  }
  const T& at(int row, int col) const {
    return cells_[static_cast<std::size_t>(row) * width_ + col];
  }
  T& operator[](std::int64_t index) {
    return cells_[static_cast<std::size_t>(index)];
  }
  const T& operator[](std::int64_t index) const {
    return cells_[static_cast<std::size_t>(index)];
  }

  std::vector<T>& cells() & { return cells_; }
  const std::vector<T>& cells() const& { return cells_; }
  // Calling on a temporary hands the storage over instead of returning a
  // reference into the expiring object.
  std::vector<T> cells() && { return std::move(cells_); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Grid&) const = default;

 private:
  static std::size_t checked_size(int height, int width) {
    if (height < 1 || width < 1)
      throw DimensionError("grid extent must be at least 1x1");
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> cells_;
};

/// Image intensities or predicted edge probabilities, values in [0,1].
using PixelGrid = Grid<double>;

/// Per-pixel partial derivatives of a scalar loss.
using GradGrid = Grid<double>;

/// H×W map of {0,1} edge labels. The cell type is uint8 but every write
/// path goes through bool, so cells are always exactly 0 or 1.
class BinaryMap {
 public:
  BinaryMap() = default;
  BinaryMap(int height, int width) : labels_(height, width, 0) {}

  /// Builds from raw cells, rejecting anything outside {0,1}.
  static BinaryMap from_cells(int height, int width,
                              std::vector<std::uint8_t> cells) {
    for (std::uint8_t v : cells)
      if (v > 1) throw DimensionError("binary map cell outside {0,1}");
    BinaryMap map;
    map.labels_ = Grid<std::uint8_t>(height, width, std::move(cells));
    return map;
  }

  int height() const { return labels_.height(); }
  int width() const { return labels_.width(); }
  std::int64_t size() const { return labels_.size(); }

  void set(int row, int col, bool edge) { labels_.at(row, col) = edge ? 1 : 0; }
  bool is_edge(int row, int col) const { return labels_.at(row, col) != 0; }
  bool is_edge(std::int64_t index) const { return labels_[index] != 0; }

  std::int64_t edge_count() const {
    std::int64_t n = 0;
    for (std::uint8_t v : labels_.cells()) n += v;
    return n;
  }

  const Grid<std::uint8_t>& labels() const& { return labels_; }
  Grid<std::uint8_t> labels() && { return std::move(labels_); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return labels_.same_shape(other);
  }
  bool same_shape(const BinaryMap& other) const {
    return labels_.same_shape(other.labels());
  }

  bool operator==(const BinaryMap&) const = default;

 private:
  Grid<std::uint8_t> labels_;
};

}  // namespace ebt
