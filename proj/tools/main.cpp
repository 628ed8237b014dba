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

// Command-line front end wiring the library into reproducible
// experiments. Every subcommand is deterministic given its flags and
// --seed; all numeric defaults are the unified hyperparameter setting
// (B_E/B_B/B_T = 1.0/0.8/0.5, r = 7, lambda = 1.1, 1-pixel tolerance).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebt/datapipe.hpp"
#include "ebt/evaluator.hpp"
#include "ebt/losses.hpp"
#include "ebt/png_io.hpp"
#include "ebt/regions.hpp"
#include "ebt/rng.hpp"
#include "ebt/toymodel.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonLossFlags {
  ebt::LossParams params;

  void attach(CLI::App* cmd) {
    cmd->add_option("--b-e", params.b_e, "Edge class coefficient")
        ->capture_default_str();
    cmd->add_option("--b-b", params.b_b, "Boundary class coefficient")
        ->capture_default_str();
    cmd->add_option("--b-t", params.b_t, "Texture class coefficient")
        ->capture_default_str();
    cmd->add_option("--r", params.radius, "Boundary radius (Chebyshev)")
        ->capture_default_str();
    cmd->add_option("--lambda", params.lambda, "WBCE non-edge balance factor")
        ->capture_default_str();
    cmd->add_option("--epsilon", params.epsilon, "Log clamp")
        ->capture_default_str();
  }
};

struct SynthFlags {
  int count = 32;
  ebt::SynthSpec spec;

  void attach(CLI::App* cmd) {
    cmd->add_option("--synth-count", count, "Synthetic scene count")
        ->capture_default_str();
    cmd->add_option("--synth-size", spec.height, "Synthetic canvas side")
        ->capture_default_str();
    cmd->add_option("--min-shapes", spec.min_shapes, "Fewest shapes per scene")
        ->capture_default_str();
    cmd->add_option("--max-shapes", spec.max_shapes, "Most shapes per scene")
        ->capture_default_str();
    cmd->add_option("--noise", spec.noise_level, "Additive noise amplitude")
        ->capture_default_str();
    cmd->add_option("--min-contrast", spec.min_contrast,
                    "Least shape/background intensity gap")
        ->capture_default_str();
  }

  ebt::SampleSet make(std::uint64_t seed) {
    spec.width = spec.height;
    spec.seed = seed;
    return ebt::make_synth_set(spec, count);
  }
};

std::vector<std::string> png_stems_sorted(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw ebt::UsageError("'" + dir.string() + "' is not a directory");
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      stems.push_back(entry.path().stem().string());
  std::sort(stems.begin(), stems.end());
  return stems;
}

void write_train_csv(const std::string& path, const ebt::TrainRecord& record) {
  std::ofstream out(path);
  if (!out) throw ebt::IoError("cannot open '" + path + "' for writing");
  out << "epoch,loss\n";
  char buf[64];
  for (std::size_t e = 0; e < record.epoch_loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", e + 1, record.epoch_loss[e]);
    out << buf;
  }
}

// ---------------------------------------------------------------------
// regions
// ---------------------------------------------------------------------

int run_regions(const std::string& gt_path, int radius,
                const std::string& out_path) {
  const ebt::BinaryMap gt =
      ebt::binarize_levels(ebt::load_gray_png(gt_path));
  const ebt::TriClassMask mask = ebt::classify(gt, radius);
  const ebt::ClassWeights w = ebt::class_weights(mask);

  ebt::Grid<std::uint8_t> viz(mask.height(), mask.width(), 0);
  for (std::int64_t i = 0; i < mask.size(); ++i) {
    switch (mask.classes[i]) {
      case ebt::PixelClass::kEdge: viz[i] = 255; break;
      case ebt::PixelClass::kBoundary: viz[i] = 128; break;
      case ebt::PixelClass::kTexture: viz[i] = 0; break;
    }
  }
  ebt::save_gray_png(out_path, viz);

  std::printf("count_e=%lld count_b=%lld count_t=%lld\n",
              static_cast<long long>(mask.count_edge),
              static_cast<long long>(mask.count_boundary),
              static_cast<long long>(mask.count_texture));
  std::printf("w_e=%.6f w_b=%.6f w_t=%.6f\n", w.w_e, w.w_b, w.w_t);
  return 0;
}

// ---------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------

int run_eval(const std::string& pred_dir, const std::string& gt_dir,
             double tolerance, int threshold_count,
             const std::string& out_csv) {
  const std::vector<std::string> pred_stems = png_stems_sorted(pred_dir);
  const std::vector<std::string> gt_stems = png_stems_sorted(gt_dir);
  if (pred_stems.empty())
    throw ebt::UsageError("no predictions under '" + pred_dir + "'");
  if (pred_stems != gt_stems)
    throw ebt::UsageError("prediction and ground-truth stems do not match");

  std::vector<ebt::PixelGrid> preds;
  std::vector<ebt::BinaryMap> gts;
  for (const std::string& stem : pred_stems) {
    preds.push_back(
        ebt::load_prediction((fs::path(pred_dir) / (stem + ".png")).string()));
    gts.push_back(ebt::binarize_levels(
        ebt::load_gray_png((fs::path(gt_dir) / (stem + ".png")).string())));
  }

  ebt::EvalConfig cfg;
  cfg.tolerance = tolerance;
  cfg.thresholds = ebt::uniform_thresholds(threshold_count);
  const ebt::EvalReport report = ebt::evaluate_dataset(preds, gts, cfg);

  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw ebt::IoError("cannot open '" + out_csv + "' for writing");
    ebt::write_report_csv(report, out);
  }
  std::printf("%s\n", ebt::summary_line(report).c_str());
  return 0;
}

// ---------------------------------------------------------------------
// train
// ---------------------------------------------------------------------

int run_train(const std::string& data_root, SynthFlags& synth,
              const std::string& loss_name, int epochs, std::uint64_t seed,
              double lr, int crop, const CommonLossFlags& loss_flags,
              const std::string& out_record, const std::string& out_weights) {
  const ebt::SampleSet dataset =
      data_root.empty() ? synth.make(seed) : ebt::load_sample_set(data_root);

  ebt::TrainConfig config;
  config.loss_kind = ebt::loss_kind_from_name(loss_name);
  config.params = loss_flags.params;
  config.epochs = epochs;
  config.seed = seed;
  config.optim.learning_rate = lr;
  config.crop = crop;

  const ebt::TrainRecord record = ebt::train(dataset, config);

  if (!out_record.empty()) write_train_csv(out_record, record);
  if (!out_weights.empty())
    ebt::save_model_weights(out_weights, record.final_weights);
  std::printf("trained %s for %d epochs: first_loss=%.6f last_loss=%.6f\n",
              loss_name.c_str(), epochs, record.epoch_loss.front(),
              record.epoch_loss.back());
  return 0;
}

// ---------------------------------------------------------------------
// infer
// ---------------------------------------------------------------------

int run_infer(const std::string& weights_path, const std::string& image_dir,
              int patch, int stride, const std::string& out_dir) {
  const ebt::ModelWeights weights = ebt::load_model_weights(weights_path);
  const std::vector<std::string> stems = png_stems_sorted(image_dir);
  if (stems.empty())
    throw ebt::UsageError("no images under '" + image_dir + "'");

  const fs::path pred_dir = fs::path(out_dir) / "pred";
  fs::create_directories(pred_dir);

  const ebt::PredictFn predict = [&](const ebt::PixelGrid& tile) {
    return ebt::forward(ebt::featurize(tile), weights);
  };

  for (const std::string& stem : stems) {
    const ebt::Grid<std::uint8_t> levels =
        ebt::load_gray_png((fs::path(image_dir) / (stem + ".png")).string());
    ebt::PixelGrid image(levels.height(), levels.width(), 0.0);
    for (std::int64_t i = 0; i < image.size(); ++i) image[i] = levels[i] / 255.0;
    const ebt::PatchPlan plan =
        ebt::make_patch_plan(image.height(), image.width(), patch, stride);
    const ebt::PixelGrid pred = ebt::patch_infer(predict, image, plan);
    ebt::save_prediction((pred_dir / (stem + ".png")).string(), pred);
  }
  std::printf("wrote %zu predictions to %s\n", stems.size(),
              pred_dir.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

int run_sweep(SynthFlags& synth, double b_e, std::vector<double> b_b_grid,
              std::vector<double> b_t_grid, int radius, double epsilon,
              int epochs, std::uint64_t seed, double lr, double tolerance,
              int threshold_count, const std::string& out_csv) {
  if (b_b_grid.empty() || b_t_grid.empty())
    throw ebt::UsageError("sweep grids must be nonempty");

  const ebt::SampleSet dataset = synth.make(seed);
  std::vector<ebt::BinaryMap> gts;
  for (const ebt::Sample& s : dataset) gts.push_back(s.gt);

  ebt::EvalConfig eval_cfg;
  eval_cfg.tolerance = tolerance;
  eval_cfg.thresholds = ebt::uniform_thresholds(threshold_count);

  std::ofstream out;
  if (!out_csv.empty()) {
    out.open(out_csv);
    if (!out) throw ebt::IoError("cannot open '" + out_csv + "' for writing");
  }
  std::string csv = "b_e,b_b,b_t,ods,ois,ap\n";

  char buf[160];
  for (double b_b : b_b_grid) {
    for (double b_t : b_t_grid) {
      ebt::TrainConfig config;
      config.loss_kind = ebt::LossKind::kEbt;
      config.params.b_e = b_e;
      config.params.b_b = b_b;
      config.params.b_t = b_t;
      config.params.radius = radius;
      config.params.epsilon = epsilon;
      config.epochs = epochs;
      config.seed = seed;
      config.optim.learning_rate = lr;
      const ebt::TrainRecord record = ebt::train(dataset, config);

      std::vector<ebt::PixelGrid> preds;
      preds.reserve(dataset.size());
      for (const ebt::Sample& s : dataset)
        preds.push_back(
            ebt::forward(ebt::featurize(s.image), record.final_weights));
      const ebt::EvalReport report =
          ebt::evaluate_dataset(preds, gts, eval_cfg);

      std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", b_e,
                    b_b, b_t, report.ods, report.ois, report.ap);
      csv += buf;
      std::printf("b_b=%.2f b_t=%.2f -> %s\n", b_b, b_t,
                  ebt::summary_line(report).c_str());
    }
  }
  if (out.is_open()) out << csv;
  return 0;
}

// ---------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------

double rel_err(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-12});
  return std::fabs(a - b) / denom;
}

int run_gradcheck(std::uint64_t seed, int size) {
  if (size < 2) throw ebt::UsageError("--size must be >= 2");
  constexpr double kStep = 1e-5;
  constexpr double kLimit = 1e-4;
  ebt::Rng rng(seed);
  ebt::LossParams params;
  params.radius = 2;

  double worst = 0.0;

  // Pixel-space gradients for both losses.
  for (int trial = 0; trial < 10; ++trial) {
    ebt::PixelGrid pred(size, size, 0.0);
    ebt::BinaryMap gt(size, size);
    for (std::int64_t i = 0; i < pred.size(); ++i) {
      pred[i] = 0.05 + 0.9 * rng.next_unit();
      gt.set(static_cast<int>(i / size), static_cast<int>(i % size),
             rng.next_bool(0.3));
    }
    for (int kind = 0; kind < 2; ++kind) {
      const bool use_ebt = kind == 1;
      const ebt::GradGrid grad =
          use_ebt ? ebt::ebt_loss_grad(pred, gt, params)
                  : ebt::wbce_loss_grad(pred, gt, params.lambda, params.epsilon);
      for (std::int64_t i = 0; i < pred.size(); ++i) {
        ebt::PixelGrid lo = pred, hi = pred;
        lo[i] -= kStep;
        hi[i] += kStep;
        const double f_lo =
            use_ebt ? ebt::ebt_loss(lo, gt, params).value
                    : ebt::wbce_loss(lo, gt, params.lambda, params.epsilon).value;
        const double f_hi =
            use_ebt ? ebt::ebt_loss(hi, gt, params).value
                    : ebt::wbce_loss(hi, gt, params.lambda, params.epsilon).value;
        const double fd = (f_hi - f_lo) / (2.0 * kStep);
        if (std::fabs(fd) < 1e-9 && std::fabs(grad[i]) < 1e-9) continue;
        worst = std::max(worst, rel_err(grad[i], fd));
      }
    }
  }

  // Weight-space gradients through the model.
  for (int trial = 0; trial < 5; ++trial) {
    ebt::SynthSpec spec;
    spec.height = spec.width = 16;
    spec.seed = ebt::Rng::mix(seed, 1000 + trial);
    auto [image, gt] = ebt::synth_scene(spec);
    if (gt.edge_count() == 0) continue;
    const ebt::FeatureStack features = ebt::featurize(image);
    ebt::ModelWeights weights;
    for (double& w : weights.w) w = rng.next_range(-0.5, 0.5);

    for (int kind = 0; kind < 2; ++kind) {
      const ebt::LossKind lk =
          kind == 1 ? ebt::LossKind::kEbt : ebt::LossKind::kWbce;
      const ebt::WeightGrad analytic =
          ebt::weight_grad(features, weights, gt, params, lk);
      for (int k = 0; k < ebt::kFeatureCount; ++k) {
        ebt::ModelWeights lo = weights, hi = weights;
        lo.w[k] -= kStep;
        hi.w[k] += kStep;
        const double f_lo =
            ebt::weight_grad(features, lo, gt, params, lk).loss;
        const double f_hi =
            ebt::weight_grad(features, hi, gt, params, lk).loss;
        const double fd = (f_hi - f_lo) / (2.0 * kStep);
        if (std::fabs(fd) < 1e-9 && std::fabs(analytic.grad[k]) < 1e-9)
          continue;
        worst = std::max(worst, rel_err(analytic.grad[k], fd));
      }
    }
  }

  std::printf("max relative error = %.3e (limit %.1e)\n", worst, kLimit);
  return worst <= kLimit ? 0 : 1;
}

// ---------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------

int run_synth(SynthFlags& synth, std::uint64_t seed,
              const std::string& out_root) {
  const ebt::SampleSet set = synth.make(seed);
  ebt::save_sample_set(out_root, set);
  std::printf("wrote %zu scenes under %s\n", set.size(), out_root.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-Boundary-Texture loss toolkit"};
  app.require_subcommand(1);

  // regions ------------------------------------------------------------
  auto* regions = app.add_subcommand(
      "regions", "Partition a ground-truth map into edge/boundary/texture");
  std::string regions_gt, regions_out;
  int regions_r = 7;
  regions->add_option("--gt", regions_gt, "Ground-truth PNG (binarized at >127)")
      ->required();
  regions->add_option("--r", regions_r, "Boundary radius")->capture_default_str();
  regions->add_option("--out", regions_out,
                      "Visualization PNG (edge=255, boundary=128, texture=0)")
      ->required();
  regions->set_config("--config");

  // eval ---------------------------------------------------------------
  auto* eval = app.add_subcommand(
      "eval", "Score predictions against ground truth (ODS/OIS/AP)");
  std::string eval_pred_dir, eval_gt_dir, eval_out;
  double eval_tolerance = 1.0;
  int eval_thresholds = 99;
  eval->add_option("--pred-dir", eval_pred_dir, "Directory of prediction PNGs")
      ->required();
  eval->add_option("--gt-dir", eval_gt_dir, "Directory of ground-truth PNGs")
      ->required();
  eval->add_option("--tolerance", eval_tolerance,
                   "Match tolerance in Euclidean pixels")
      ->capture_default_str();
  eval->add_option("--thresholds", eval_thresholds,
                   "Number of uniform thresholds i/(n+1)")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "Report CSV path");
  eval->set_config("--config");

  // train ----------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train the toy pixel classifier");
  std::string train_data, train_loss = "ebt", train_record, train_weights;
  SynthFlags train_synth;
  CommonLossFlags train_loss_flags;
  int train_epochs = 200, train_crop = 0;
  std::uint64_t train_seed = 0;
  double train_lr = 1e-4;
  train->add_option("--data", train_data,
                    "Dataset root (images/ + edges/); synthetic when omitted");
  train_synth.attach(train);
  train->add_option("--loss", train_loss, "Loss kind")
      ->check(CLI::IsMember({"wbce", "ebt"}))
      ->capture_default_str();
  train->add_option("--epochs", train_epochs, "Training epochs")
      ->capture_default_str();
  train->add_option("--seed", train_seed, "Seed")->capture_default_str();
  train->add_option("--lr", train_lr, "Adam learning rate")
      ->capture_default_str();
  train->add_option(
           "--crop", train_crop,
           "Square training crop, 0 = full images (48 suits 64x64 scenes)")
      ->capture_default_str();
  train_loss_flags.attach(train);
  train->add_option("--out-record", train_record, "Per-epoch loss CSV");
  train->add_option("--out-weights", train_weights, "Weight file");
  train->set_config("--config");

  // infer ----------------------------------------------------------------
  auto* infer = app.add_subcommand("infer", "Patchwise inference");
  std::string infer_weights, infer_images, infer_out;
  int infer_patch = 320, infer_stride = 304;
  infer->add_option("--weights", infer_weights, "Weight file")->required();
  infer->add_option("--image-dir", infer_images, "Directory of image PNGs")
      ->required();
  infer->add_option("--patch", infer_patch, "Patch side")->capture_default_str();
  infer->add_option("--stride", infer_stride, "Patch stride")
      ->capture_default_str();
  infer->add_option("--out-dir", infer_out, "Output root (pred/ is created)")
      ->required();
  infer->set_config("--config");

  // sweep ----------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Train/evaluate over a (b_b, b_t) coefficient grid");
  SynthFlags sweep_synth;
  std::vector<double> sweep_bb = {0.4, 0.6, 0.8, 1.0, 1.2};
  std::vector<double> sweep_bt = {0.1, 0.3, 0.5, 0.7, 0.9};
  double sweep_be = 1.0, sweep_eps = 1e-7, sweep_lr = 0.05,
         sweep_tolerance = 1.0;
  int sweep_r = 7, sweep_epochs = 200, sweep_thresholds = 99;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  sweep_synth.attach(sweep);
  sweep->add_option("--b-e", sweep_be, "Edge coefficient (held fixed)")
      ->capture_default_str();
  sweep->add_option("--b-b-grid", sweep_bb, "Boundary coefficient grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--b-t-grid", sweep_bt, "Texture coefficient grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--r", sweep_r, "Boundary radius")->capture_default_str();
  sweep->add_option("--epsilon", sweep_eps, "Log clamp")->capture_default_str();
  sweep->add_option("--epochs", sweep_epochs, "Epochs per cell")
      ->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "Seed")->capture_default_str();
  sweep->add_option("--lr", sweep_lr, "Adam learning rate")
      ->capture_default_str();
  sweep->add_option("--tolerance", sweep_tolerance, "Match tolerance")
      ->capture_default_str();
  sweep->add_option("--thresholds", sweep_thresholds, "Uniform threshold count")
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "Sweep CSV path");
  sweep->set_config("--config");

  // gradcheck ------------------------------------------------------------
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Finite-difference audit of every analytic gradient");
  std::uint64_t gc_seed = 0;
  int gc_size = 8;
  gradcheck->add_option("--seed", gc_seed, "Seed")->capture_default_str();
  gradcheck->add_option("--size", gc_size, "Grid side for the pixel checks")
      ->capture_default_str();
  gradcheck->set_config("--config");

  // synth ----------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "Materialize a synthetic dataset (images/ + edges/)");
  SynthFlags synth_flags;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth_flags.attach(synth);
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
  synth->add_option("--out-root", synth_out, "Output root")->required();
  synth->set_config("--config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (regions->parsed())
      return run_regions(regions_gt, regions_r, regions_out);
    if (eval->parsed())
      return run_eval(eval_pred_dir, eval_gt_dir, eval_tolerance,
                      eval_thresholds, eval_out);
    if (train->parsed())
      return run_train(train_data, train_synth, train_loss, train_epochs,
                       train_seed, train_lr, train_crop, train_loss_flags,
                       train_record, train_weights);
    if (infer->parsed())
      return run_infer(infer_weights, infer_images, infer_patch, infer_stride,
                       infer_out);
    if (sweep->parsed())
      return run_sweep(sweep_synth, sweep_be, sweep_bb, sweep_bt, sweep_r,
                       sweep_eps, sweep_epochs, sweep_seed, sweep_lr,
                       sweep_tolerance, sweep_thresholds, sweep_out);
    if (gradcheck->parsed()) return run_gradcheck(gc_seed, gc_size);
    if (synth->parsed()) return run_synth(synth_flags, synth_seed, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
