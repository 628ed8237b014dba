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

#include "ebt/datapipe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "ebt/png_io.hpp"
#include "ebt/rng.hpp"

namespace fs = std::filesystem;

namespace ebt {

namespace {

constexpr int kPyramidFloor = 640;

struct Coord {
  int row, col;
};

// Symmetric reflection index, periodic so targets beyond one mirror
// period (padding to more than twice the source extent) stay valid.
int mirror(int i, int n) {
  if (n == 1) return 0;
  i %= 2 * n;
  return i < n ? i : 2 * n - 1 - i;
}

PixelGrid reflect_pad(const PixelGrid& image, int min_h, int min_w) {
  const int h = std::max(image.height(), min_h);
  const int w = std::max(image.width(), min_w);
  if (h == image.height() && w == image.width()) return image;
  PixelGrid out(h, w, 0.0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      out.at(r, c) = image.at(mirror(r, image.height()), mirror(c, image.width()));
  return out;
}

BinaryMap reflect_pad(const BinaryMap& gt, int min_h, int min_w) {
  const int h = std::max(gt.height(), min_h);
  const int w = std::max(gt.width(), min_w);
  if (h == gt.height() && w == gt.width()) return gt;
  BinaryMap out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      out.set(r, c, gt.is_edge(mirror(r, gt.height()), mirror(c, gt.width())));
  return out;
}

// ---------------------------------------------------------------------
// Scene synthesis
// ---------------------------------------------------------------------

enum class ShapeKind { kRectangle, kCircle, kPolygon };

// Filled cell set of one shape, as a mask over the canvas.
struct ShapeFill {
  Grid<std::uint8_t> cells;
  int area = 0;
};

ShapeFill fill_rectangle(int h, int w, Rng& rng) {
  ShapeFill fill{Grid<std::uint8_t>(h, w, 0), 0};
  const int max_side_h = std::max(4, h / 2);
  const int max_side_w = std::max(4, w / 2);
  const int sh = rng.next_int(4, max_side_h);
  const int sw = rng.next_int(4, max_side_w);
  const int top = rng.next_int(2, h - sh - 2);
  const int left = rng.next_int(2, w - sw - 2);
  for (int r = top; r < top + sh; ++r)
    for (int c = left; c < left + sw; ++c) {
      fill.cells.at(r, c) = 1;
      ++fill.area;
    }
  return fill;
}

ShapeFill fill_circle(int h, int w, Rng& rng) {
  ShapeFill fill{Grid<std::uint8_t>(h, w, 0), 0};
  const int max_radius = std::max(3, std::min(h, w) / 4);
  const int radius = rng.next_int(3, max_radius);
  const int cy = rng.next_int(radius + 2, h - radius - 3);
  const int cx = rng.next_int(radius + 2, w - radius - 3);
  for (int r = cy - radius; r <= cy + radius; ++r)
    for (int c = cx - radius; c <= cx + radius; ++c)
      if ((r - cy) * (r - cy) + (c - cx) * (c - cx) <= radius * radius) {
        fill.cells.at(r, c) = 1;
        ++fill.area;
      }
  return fill;
}

ShapeFill fill_polygon(int h, int w, Rng& rng) {
  // Convex polygon: 3..5 vertices on a jittered circle, filled by
  // half-plane tests over the bounding box.
  ShapeFill fill{Grid<std::uint8_t>(h, w, 0), 0};
  const int max_radius = std::max(4, std::min(h, w) / 4);
  const double radius = 3.0 + rng.next_unit() * (max_radius - 3);
  const int margin = static_cast<int>(radius) + 3;
  const double cy = rng.next_int(margin, h - margin - 1);
  const double cx = rng.next_int(margin, w - margin - 1);
  const int n_vertices = rng.next_int(3, 5);

  std::vector<double> vy(n_vertices), vx(n_vertices);
  for (int i = 0; i < n_vertices; ++i) {
    const double angle =
        2.0 * M_PI * (i + 0.2 + 0.6 * rng.next_unit()) / n_vertices;
    const double rr = radius * (0.7 + 0.3 * rng.next_unit());
    vy[i] = cy + rr * std::sin(angle);
    vx[i] = cx + rr * std::cos(angle);
  }

  const int r0 = std::max(0, static_cast<int>(cy - radius) - 1);
  const int r1 = std::min(h - 1, static_cast<int>(cy + radius) + 1);
  const int c0 = std::max(0, static_cast<int>(cx - radius) - 1);
  const int c1 = std::min(w - 1, static_cast<int>(cx + radius) + 1);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      bool inside = true;
      for (int i = 0; i < n_vertices && inside; ++i) {
        const int j = (i + 1) % n_vertices;
        const double cross = (vx[j] - vx[i]) * (r - vy[i]) -
                             (vy[j] - vy[i]) * (c - vx[i]);
        if (cross < 0.0) inside = false;
      }
      if (inside) {
        fill.cells.at(r, c) = 1;
        ++fill.area;
      }
    }
  }
  return fill;
}

// True when `fill` keeps a 2-cell Chebyshev clearance from every cell
// already occupied, so outlines of distinct shapes never touch.
bool placement_clear(const Grid<std::uint8_t>& occupied, const ShapeFill& fill) {
  const int h = occupied.height(), w = occupied.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!fill.cells.at(r, c)) continue;
      for (int dr = -2; dr <= 2; ++dr)
        for (int dc = -2; dc <= 2; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          if (occupied.at(rr, cc)) return false;
        }
    }
  return true;
}

void trace_outline(const ShapeFill& fill, BinaryMap& gt) {
  const int h = gt.height(), w = gt.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!fill.cells.at(r, c)) continue;
      const bool border =
          r == 0 || r == h - 1 || c == 0 || c == w - 1 ||
          !fill.cells.at(r - 1, c) || !fill.cells.at(r + 1, c) ||
          !fill.cells.at(r, c - 1) || !fill.cells.at(r, c + 1);
      if (border) gt.set(r, c, true);
    }
}

double pick_contrasting_intensity(double background, double min_contrast,
                                  Rng& rng) {
  const double up_room = 1.0 - background - min_contrast;
  const double down_room = background - min_contrast;
  bool go_up;
  if (up_room < 0.0)
    go_up = false;
  else if (down_room < 0.0)
    go_up = true;
  else
    go_up = rng.next_bool(0.5);
  if (go_up)
    return background + min_contrast +
           rng.next_unit() * std::max(0.0, up_room);
  return background - min_contrast - rng.next_unit() * std::max(0.0, down_room);
}

// ---------------------------------------------------------------------
// Geometric transforms
// ---------------------------------------------------------------------

// quarter_turns in {0,1,2,3}, clockwise; flip mirrors columns afterwards.
ImageGtPair transformed(const PixelGrid& image, const BinaryMap& gt,
                        int quarter_turns, bool flip) {
  const int h = image.height(), w = image.width();
  const bool swap = quarter_turns % 2 == 1;
  const int oh = swap ? w : h;
  const int ow = swap ? h : w;
  PixelGrid out_img(oh, ow, 0.0);
  BinaryMap out_gt(oh, ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      const int cc = flip ? ow - 1 - c : c;
      int sr = 0, sc = 0;
      switch (quarter_turns) {
        case 0: sr = r; sc = cc; break;
        case 1: sr = h - 1 - cc; sc = r; break;
        case 2: sr = h - 1 - r; sc = w - 1 - cc; break;
        default: sr = cc; sc = w - 1 - r; break;
      }
      out_img.at(r, c) = image.at(sr, sc);
      out_gt.set(r, c, gt.is_edge(sr, sc));
    }
  }
  return {std::move(out_img), std::move(out_gt)};
}

std::vector<std::string> png_stems(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw UsageError("'" + dir.string() + "' is not a directory");
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      stems.push_back(entry.path().stem().string());
  std::sort(stems.begin(), stems.end());
  return stems;
}

}  // namespace

void SynthSpec::validate() const {
  if (height < 16 || width < 16)
    throw DimensionError("synthetic canvas must be at least 16x16");
  if (min_shapes < 0 || max_shapes < min_shapes)
    throw UsageError("invalid shape count range");
  if (!(min_contrast > 0.0 && min_contrast <= 0.5))
    throw UsageError("min_contrast must lie in (0, 0.5]");
  if (!(noise_level >= 0.0 && noise_level < 0.5))
    throw UsageError("noise_level must lie in [0, 0.5)");
  if (!rectangles && !circles && !polygons)
    throw UsageError("at least one shape kind must be enabled");
}

ImageGtPair synth_scene(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const double background = 0.3 + 0.4 * rng.next_unit();
  PixelGrid image(spec.height, spec.width, background);
  BinaryMap gt(spec.height, spec.width);
  Grid<std::uint8_t> occupied(spec.height, spec.width, 0);

  std::vector<ShapeKind> kinds;
  if (spec.rectangles) kinds.push_back(ShapeKind::kRectangle);
  if (spec.circles) kinds.push_back(ShapeKind::kCircle);
  if (spec.polygons) kinds.push_back(ShapeKind::kPolygon);

  const int target = rng.next_int(spec.min_shapes, spec.max_shapes);
  for (int s = 0; s < target; ++s) {
    // A crowded canvas can refuse a shape; give up after a few tries
    // rather than loop forever.
    for (int attempt = 0; attempt < 40; ++attempt) {
      const ShapeKind kind = kinds[static_cast<std::size_t>(
          rng.next_int(0, static_cast<int>(kinds.size()) - 1))];
      ShapeFill fill{Grid<std::uint8_t>(1, 1, 0), 0};
      switch (kind) {
        case ShapeKind::kRectangle:
          fill = fill_rectangle(spec.height, spec.width, rng);
          break;
        case ShapeKind::kCircle:
          fill = fill_circle(spec.height, spec.width, rng);
          break;
        case ShapeKind::kPolygon:
          fill = fill_polygon(spec.height, spec.width, rng);
          break;
      }
      if (fill.area < 4 || !placement_clear(occupied, fill)) continue;

      const double intensity =
          pick_contrasting_intensity(background, spec.min_contrast, rng);
      for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c)
          if (fill.cells.at(r, c)) {
            image.at(r, c) = intensity;
            occupied.at(r, c) = 1;
          }
      trace_outline(fill, gt);
      break;
    }
  }

  if (spec.noise_level > 0.0) {
    for (std::int64_t i = 0; i < image.size(); ++i) {
      const double noisy =
          image[i] + spec.noise_level * (2.0 * rng.next_unit() - 1.0);
      image[i] = std::min(1.0, std::max(0.0, noisy));
    }
  }
  return {std::move(image), std::move(gt)};
}

SampleSet make_synth_set(const SynthSpec& base, int count) {
  if (count < 1) throw UsageError("sample count must be >= 1");
  SampleSet set;
  set.reserve(count);
  for (int i = 0; i < count; ++i) {
    SynthSpec spec = base;
    spec.seed = Rng::mix(base.seed, static_cast<std::uint64_t>(i));
    auto [image, gt] = synth_scene(spec);
    char id[32];
    std::snprintf(id, sizeof id, "synth_%04d", i);
    set.push_back({id, std::move(image), std::move(gt)});
  }
  return set;
}

std::vector<ImageGtPair> halving_pyramid(const PixelGrid& image,
                                         const BinaryMap& gt) {
  if (!gt.same_shape(image))
    throw ShapeError("image and ground truth shapes differ");
  std::vector<ImageGtPair> levels;
  levels.emplace_back(image, gt);
  while (true) {
    const PixelGrid& prev_img = levels.back().first;
    const BinaryMap& prev_gt = levels.back().second;
    const int h2 = (prev_img.height() + 1) / 2;
    const int w2 = (prev_img.width() + 1) / 2;
    if (std::max(h2, w2) < kPyramidFloor) break;

    PixelGrid img(h2, w2, 0.0);
    BinaryMap next_gt(h2, w2);
    for (int r = 0; r < h2; ++r) {
      for (int c = 0; c < w2; ++c) {
        double sum = 0.0;
        int n = 0;
        bool any_edge = false;
        for (int dr = 0; dr < 2; ++dr)
          for (int dc = 0; dc < 2; ++dc) {
            const int rr = 2 * r + dr, cc = 2 * c + dc;
            if (rr >= prev_img.height() || cc >= prev_img.width()) continue;
            sum += prev_img.at(rr, cc);
            ++n;
            any_edge = any_edge || prev_gt.is_edge(rr, cc);
          }
        img.at(r, c) = sum / n;
        next_gt.set(r, c, any_edge);
      }
    }
    levels.emplace_back(std::move(img), std::move(next_gt));
  }
  return levels;
}

std::vector<ImageGtPair> augment_8(const PixelGrid& image,
                                   const BinaryMap& gt) {
  if (!gt.same_shape(image))
    throw ShapeError("image and ground truth shapes differ");
  std::vector<ImageGtPair> out;
  out.reserve(8);
  for (int turns = 0; turns < 4; ++turns)
    for (int flip = 0; flip < 2; ++flip)
      out.push_back(transformed(image, gt, turns, flip != 0));
  return out;
}

ImageGtPair random_crop(const PixelGrid& image, const BinaryMap& gt, int size,
                        std::uint64_t seed) {
  if (size < 1) throw UsageError("crop size must be >= 1");
  if (!gt.same_shape(image))
    throw ShapeError("image and ground truth shapes differ");
  const PixelGrid padded_img = reflect_pad(image, size, size);
  const BinaryMap padded_gt = reflect_pad(gt, size, size);

  Rng rng(seed);
  const int row0 = rng.next_int(0, padded_img.height() - size);
  const int col0 = rng.next_int(0, padded_img.width() - size);

  PixelGrid out_img(size, size, 0.0);
  BinaryMap out_gt(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      out_img.at(r, c) = padded_img.at(row0 + r, col0 + c);
      out_gt.set(r, c, padded_gt.is_edge(row0 + r, col0 + c));
    }
  return {std::move(out_img), std::move(out_gt)};
}

PatchPlan make_patch_plan(int height, int width, int patch, int stride) {
  if (height < 1 || width < 1)
    throw DimensionError("grid extent must be at least 1x1");
  if (patch < 1) throw UsageError("patch size must be >= 1");
  if (stride < 1 || stride > patch)
    throw UsageError("stride must lie in [1, patch]");

  const auto axis_offsets = [&](int extent) {
    std::vector<int> offsets;
    if (extent <= patch) {
      offsets.push_back(0);
      return offsets;
    }
    int pos = 0;
    while (true) {
      offsets.push_back(pos);
      if (pos + patch >= extent) break;
      pos = std::min(pos + stride, extent - patch);
    }
    return offsets;
  };

  PatchPlan plan;
  plan.patch = patch;
  plan.stride = stride;
  for (int r : axis_offsets(height))
    for (int c : axis_offsets(width)) plan.offsets.emplace_back(r, c);
  return plan;
}

PixelGrid patch_infer(const PredictFn& predict, const PixelGrid& image,
                      const PatchPlan& plan) {
  if (plan.patch < 1 || plan.offsets.empty())
    throw UsageError("patch plan is empty");
  const PixelGrid padded = reflect_pad(image, plan.patch, plan.patch);

  Grid<double> sum(padded.height(), padded.width(), 0.0);
  Grid<int> cover(padded.height(), padded.width(), 0);

  PixelGrid tile(plan.patch, plan.patch, 0.0);
  for (const auto& [row0, col0] : plan.offsets) {
    if (row0 < 0 || col0 < 0 || row0 + plan.patch > padded.height() ||
        col0 + plan.patch > padded.width())
      throw UsageError("patch plan does not fit the image");
    for (int r = 0; r < plan.patch; ++r)
      for (int c = 0; c < plan.patch; ++c)
        tile.at(r, c) = padded.at(row0 + r, col0 + c);
    const PixelGrid pred = predict(tile);
    if (pred.height() != plan.patch || pred.width() != plan.patch)
      throw ShapeError("patch prediction has the wrong shape");
    for (int r = 0; r < plan.patch; ++r)
      for (int c = 0; c < plan.patch; ++c) {
        sum.at(row0 + r, col0 + c) += pred.at(r, c);
        cover.at(row0 + r, col0 + c) += 1;
      }
  }

  PixelGrid out(image.height(), image.width(), 0.0);
  for (int r = 0; r < image.height(); ++r)
    for (int c = 0; c < image.width(); ++c) {
      if (cover.at(r, c) == 0)
        throw UsageError("patch plan does not cover the image");
      out.at(r, c) = sum.at(r, c) / cover.at(r, c);
    }
  return out;
}

BinaryMap binarize_levels(const Grid<std::uint8_t>& levels) {
  BinaryMap map(levels.height(), levels.width());
  for (int r = 0; r < levels.height(); ++r)
    for (int c = 0; c < levels.width(); ++c)
      map.set(r, c, levels.at(r, c) > 127);
  return map;
}

SampleSet load_sample_set(const std::string& root) {
  const fs::path images_dir = fs::path(root) / "images";
  const fs::path edges_dir = fs::path(root) / "edges";
  const std::vector<std::string> image_stems = png_stems(images_dir);
  const std::vector<std::string> edge_stems = png_stems(edges_dir);
  if (image_stems.empty()) throw UsageError("no PNG images under '" + root + "'");
  if (image_stems != edge_stems)
    throw UsageError("image and edge stems do not match under '" + root + "'");

  SampleSet set;
  set.reserve(image_stems.size());
  for (const std::string& stem : image_stems) {
    const Grid<std::uint8_t> img_levels =
        load_gray_png((images_dir / (stem + ".png")).string());
    const Grid<std::uint8_t> gt_levels =
        load_gray_png((edges_dir / (stem + ".png")).string());
    if (!img_levels.same_shape(gt_levels))
      throw ShapeError("image and ground truth shapes differ for '" + stem +
                       "'");
    PixelGrid image(img_levels.height(), img_levels.width(), 0.0);
    for (std::int64_t i = 0; i < image.size(); ++i)
      image[i] = img_levels[i] / 255.0;
    set.push_back({stem, std::move(image), binarize_levels(gt_levels)});
  }
  return set;
}

void save_sample_set(const std::string& root, const SampleSet& samples) {
  const fs::path images_dir = fs::path(root) / "images";
  const fs::path edges_dir = fs::path(root) / "edges";
  fs::create_directories(images_dir);
  fs::create_directories(edges_dir);
  for (const Sample& s : samples) {
    Grid<std::uint8_t> img_levels(s.image.height(), s.image.width(), 0);
    for (std::int64_t i = 0; i < s.image.size(); ++i)
      img_levels[i] = static_cast<std::uint8_t>(std::lround(s.image[i] * 255.0));
    Grid<std::uint8_t> gt_levels(s.gt.height(), s.gt.width(), 0);
    for (std::int64_t i = 0; i < s.gt.size(); ++i)
      gt_levels[i] = s.gt.is_edge(i) ? 255 : 0;
    save_gray_png((images_dir / (s.id + ".png")).string(), img_levels);
    save_gray_png((edges_dir / (s.id + ".png")).string(), gt_levels);
  }
}

void save_prediction(const std::string& path, const PixelGrid& pred) {
  Grid<std::uint8_t> levels(pred.height(), pred.width(), 0);
  for (std::int64_t i = 0; i < pred.size(); ++i) {
    const double v = std::min(1.0, std::max(0.0, pred[i]));
    levels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  save_gray_png(path, levels);
}

PixelGrid load_prediction(const std::string& path) {
  const Grid<std::uint8_t> levels = load_gray_png(path);
  PixelGrid pred(levels.height(), levels.width(), 0.0);
  for (std::int64_t i = 0; i < pred.size(); ++i) pred[i] = levels[i] / 255.0;
  return pred;
}

}  // namespace ebt
