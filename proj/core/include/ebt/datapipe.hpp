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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ebt/grid.hpp"
#include "ebt/sample.hpp"

namespace ebt {

using ImageGtPair = std::pair<PixelGrid, BinaryMap>;

/// Synthetic scenes with exact edges: filled shapes at distinct
/// intensities on a flat background, ground truth the 1-pixel border
/// trace of every shape. Shapes are placed without overlap, so every gt
/// edge sits on a real intensity contrast.
struct SynthSpec {
  std::uint64_t seed = 0;
  int height = 64;
  int width = 64;
  int min_shapes = 1;
  int max_shapes = 4;
  bool rectangles = true;
  bool circles = true;
  bool polygons = true;
  double min_contrast = 0.25;  // |shape - background| intensity, at least
  double noise_level = 0.02;   // uniform additive noise amplitude

  void validate() const;  // DimensionError on a canvas below 16x16
};

/// Renders one scene. Deterministic in spec.seed.
ImageGtPair synth_scene(const SynthSpec& spec);

/// `count` scenes with per-index derived seeds and ids "synth_0000"...
SampleSet make_synth_set(const SynthSpec& base, int count);

/// The original pair plus successively half-resolution copies. A level is
/// produced while at least one of its dimensions is still >= 640; the
/// original is always included. Images are downsampled by 2x2 mean, gt by
/// 2x2 max so no edge presence is lost.
std::vector<ImageGtPair> halving_pyramid(const PixelGrid& image,
                                         const BinaryMap& gt);

/// Rotations {0, 90, 180, 270} degrees, each without and with horizontal
/// flip, in that order; the identity is first. Always 8 outputs.
std::vector<ImageGtPair> augment_8(const PixelGrid& image,
                                   const BinaryMap& gt);

/// Seeded uniform square crop, same offsets for image and gt. Inputs
/// smaller than `size` are first reflect-padded up to it.
ImageGtPair random_crop(const PixelGrid& image, const BinaryMap& gt, int size,
                        std::uint64_t seed);

/// Tiling of an H×W image by patch/stride; offsets cover every pixel and
/// the final tile per axis is clamped to the image edge.
struct PatchPlan {
  int patch = 320;
  int stride = 304;
  std::vector<std::pair<int, int>> offsets;  // (row, col) of each tile
};

PatchPlan make_patch_plan(int height, int width, int patch = 320,
                          int stride = 304);

using PredictFn = std::function<PixelGrid(const PixelGrid&)>;

/// Runs `predict` per tile and merges: pixels covered by several tiles
/// get the arithmetic mean of the tile predictions. Images smaller than
/// one patch are reflect-padded, predicted once, and cropped back.
PixelGrid patch_infer(const PredictFn& predict, const PixelGrid& image,
                      const PatchPlan& plan);

/// >127 maps to edge (midpoint convention for 8-bit files).
BinaryMap binarize_levels(const Grid<std::uint8_t>& levels);

/// Loads `<root>/images/*.png` with gt from `<root>/edges/*.png`;
/// stems must match one-to-one. UsageError on an empty or mismatched
/// layout, ShapeError when an image/gt pair disagrees in shape.
SampleSet load_sample_set(const std::string& root);

/// Writes the standard layout under `root` (images/ + edges/).
void save_sample_set(const std::string& root, const SampleSet& samples);

/// Predictions round-trip as round(p*255) grayscale PNGs.
void save_prediction(const std::string& path, const PixelGrid& pred);
PixelGrid load_prediction(const std::string& path);

}  // namespace ebt
