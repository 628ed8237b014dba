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

#include "ebt/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ebt {

namespace {

double ratio_or_zero(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double precision, double recall) {
  const double s = precision + recall;
  return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

struct Coord {
  int row, col;
};

std::vector<Coord> edge_pixels(const BinaryMap& map) {
  std::vector<Coord> out;
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c)
      if (map.is_edge(r, c)) out.push_back({r, c});
  return out;
}

// Offsets (dr, dc) with dr^2 + dc^2 <= tolerance^2, ordered by squared
// distance then row-major, so candidate enumeration is deterministic.
std::vector<Coord> disk_offsets(double tolerance) {
  const int reach = static_cast<int>(std::floor(tolerance));
  const double tol2 = tolerance * tolerance;
  std::vector<Coord> out;
  for (int dr = -reach; dr <= reach; ++dr)
    for (int dc = -reach; dc <= reach; ++dc)
      if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc <= tol2)
        out.push_back({dr, dc});
  std::sort(out.begin(), out.end(), [](const Coord& a, const Coord& b) {
    const int da = a.row * a.row + a.col * a.col;
    const int db = b.row * b.row + b.col * b.col;
    if (da != db) return da < db;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  return out;
}

// Tries to find an augmenting path from pred node `p`.
bool augment(int p, const std::vector<std::vector<int>>& candidates,
             std::vector<int>& pred_match, std::vector<int>& gt_match,
             std::vector<int>& visited, int stamp) {
  for (int g : candidates[p]) {
    if (visited[g] == stamp) continue;
    visited[g] = stamp;
    if (gt_match[g] < 0 ||
        augment(gt_match[g], candidates, pred_match, gt_match, visited,
                stamp)) {
      pred_match[p] = g;
      gt_match[g] = p;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<double> uniform_thresholds(int count) {
  if (count < 1) throw std::invalid_argument("threshold count must be >= 1");
  std::vector<double> out(count);
  for (int i = 1; i <= count; ++i)
    out[i - 1] = static_cast<double>(i) / static_cast<double>(count + 1);
  return out;
}

void EvalConfig::validate() const {
  if (!(tolerance >= 0.0))
    throw std::invalid_argument("tolerance must be nonnegative");
  if (thresholds.empty())
    throw std::invalid_argument("threshold grid must be nonempty");
  double prev = 0.0;
  for (double t : thresholds) {
    if (!(t > prev && t < 1.0))
      throw std::invalid_argument(
          "thresholds must be strictly increasing within (0,1)");
    prev = t;
  }
}

MatchCounts match_maps(const BinaryMap& pred_bin, const BinaryMap& gt,
                       double tolerance) {
  if (!pred_bin.same_shape(gt))
    throw ShapeError("prediction and ground truth shapes differ");
  if (!(tolerance >= 0.0))
    throw std::invalid_argument("tolerance must be nonnegative");

  const std::vector<Coord> preds = edge_pixels(pred_bin);
  const std::vector<Coord> gts = edge_pixels(gt);
  const int w = gt.width();

  // Dense gt lookup: row-major cell -> gt node id.
  Grid<int> gt_id(gt.height(), gt.width(), -1);
  for (int g = 0; g < static_cast<int>(gts.size()); ++g)
    gt_id.at(gts[g].row, gts[g].col) = g;

  const std::vector<Coord> offsets = disk_offsets(tolerance);

  // Per-pred candidate gt nodes. Also flatten every matchable pair for
  // the greedy pass, keyed for the (distance, pred index, gt index) sort.
  struct Pair {
    int dist2;
    std::int64_t pred_cell, gt_cell;
    int p, g;
  };
  std::vector<std::vector<int>> candidates(preds.size());
  std::vector<Pair> pairs;
  for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
    for (const Coord& d : offsets) {
      const int r = preds[p].row + d.row;
      const int c = preds[p].col + d.col;
      if (r < 0 || r >= gt.height() || c < 0 || c >= gt.width()) continue;
      const int g = gt_id.at(r, c);
      if (g < 0) continue;
      candidates[p].push_back(g);
      pairs.push_back({d.row * d.row + d.col * d.col,
                       static_cast<std::int64_t>(preds[p].row) * w +
                           preds[p].col,
                       static_cast<std::int64_t>(r) * w + c, p, g});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    if (a.pred_cell != b.pred_cell) return a.pred_cell < b.pred_cell;
    return a.gt_cell < b.gt_cell;
  });

  std::vector<int> pred_match(preds.size(), -1);
  std::vector<int> gt_match(gts.size(), -1);
  std::int64_t matched = 0;

  // Greedy seed in deterministic order.
  for (const Pair& pr : pairs) {
    if (pred_match[pr.p] >= 0 || gt_match[pr.g] >= 0) continue;
    pred_match[pr.p] = pr.g;
    gt_match[pr.g] = pr.p;
    ++matched;
  }

  // Greedy alone is not assignment-optimal (two preds contending for one
  // gt can strand a reachable partner), so grow to maximum cardinality
  // with augmenting paths.
  std::vector<int> visited(gts.size(), -1);
  int stamp = 0;
  for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
    if (pred_match[p] >= 0) continue;
    if (augment(p, candidates, pred_match, gt_match, visited, stamp++))
      ++matched;
  }

  MatchCounts counts;
  counts.matched_pred = matched;
  counts.matched_gt = matched;
  counts.unmatched_pred = static_cast<std::int64_t>(preds.size()) - matched;
  counts.unmatched_gt = static_cast<std::int64_t>(gts.size()) - matched;
  return counts;
}

PrPoint pr_at_threshold(const PixelGrid& pred, const BinaryMap& gt,
                        double threshold, double tolerance) {
  if (!gt.same_shape(pred))
    throw ShapeError("prediction and ground truth shapes differ");
  BinaryMap bin(pred.height(), pred.width());
  for (int r = 0; r < pred.height(); ++r)
    for (int c = 0; c < pred.width(); ++c)
      bin.set(r, c, pred.at(r, c) >= threshold);
  const MatchCounts m = match_maps(bin, gt, tolerance);

  PrPoint point;
  point.threshold = threshold;
  point.precision =
      ratio_or_zero(m.matched_pred, m.matched_pred + m.unmatched_pred);
  point.recall = ratio_or_zero(m.matched_gt, m.matched_gt + m.unmatched_gt);
  point.f1 = f1_of(point.precision, point.recall);
  return point;
}

EvalReport evaluate_dataset(const std::vector<PixelGrid>& preds,
                            const std::vector<BinaryMap>& gts,
                            const EvalConfig& cfg) {
  cfg.validate();
  if (preds.empty()) throw UsageError("dataset is empty");
  if (preds.size() != gts.size())
    throw UsageError("prediction and ground truth lists differ in length");

  const std::size_t n_images = preds.size();
  const std::size_t n_thresh = cfg.thresholds.size();

  std::vector<std::int64_t> pool_matched(n_thresh, 0), pool_pred(n_thresh, 0),
      pool_gt(n_thresh, 0);
  double ois_sum = 0.0;

  for (std::size_t img = 0; img < n_images; ++img) {
    if (!gts[img].same_shape(preds[img]))
      throw ShapeError("prediction and ground truth shapes differ");
    double best_image_f1 = 0.0;
    for (std::size_t t = 0; t < n_thresh; ++t) {
      BinaryMap bin(preds[img].height(), preds[img].width());
      for (int r = 0; r < bin.height(); ++r)
        for (int c = 0; c < bin.width(); ++c)
          bin.set(r, c, preds[img].at(r, c) >= cfg.thresholds[t]);
      const MatchCounts m = match_maps(bin, gts[img], cfg.tolerance);
      pool_matched[t] += m.matched_pred;
      pool_pred[t] += m.matched_pred + m.unmatched_pred;
      pool_gt[t] += m.matched_gt + m.unmatched_gt;
      const double f1 =
          f1_of(ratio_or_zero(m.matched_pred, m.matched_pred + m.unmatched_pred),
                ratio_or_zero(m.matched_gt, m.matched_gt + m.unmatched_gt));
      best_image_f1 = std::max(best_image_f1, f1);
    }
    ois_sum += best_image_f1;
  }

  EvalReport report;
  report.per_threshold.resize(n_thresh);
  for (std::size_t t = 0; t < n_thresh; ++t) {
    PrPoint& point = report.per_threshold[t];
    point.threshold = cfg.thresholds[t];
    point.precision = ratio_or_zero(pool_matched[t], pool_pred[t]);
    point.recall = ratio_or_zero(pool_matched[t], pool_gt[t]);
    point.f1 = f1_of(point.precision, point.recall);
    if (point.f1 > report.ods) {
      report.ods = point.f1;
      report.ods_threshold = point.threshold;
    }
  }
  if (!report.per_threshold.empty() && report.ods == 0.0)
    report.ods_threshold = report.per_threshold.front().threshold;
  report.ois = ois_sum / static_cast<double>(n_images);

  // AP: sort pooled points by recall, take the suffix-max precision
  // envelope, extend it flat to recall 0, integrate with trapezoids.
  std::vector<std::pair<double, double>> rp(n_thresh);
  for (std::size_t t = 0; t < n_thresh; ++t)
    rp[t] = {report.per_threshold[t].recall, report.per_threshold[t].precision};
  std::sort(rp.begin(), rp.end());
  std::vector<double> envelope(n_thresh);
  double running = 0.0;
  for (std::size_t i = n_thresh; i-- > 0;) {
    running = std::max(running, rp[i].second);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  double prev_precision = n_thresh > 0 ? envelope[0] : 0.0;
  for (std::size_t i = 0; i < n_thresh; ++i) {
    ap += (rp[i].first - prev_recall) * (envelope[i] + prev_precision) * 0.5;
    prev_recall = rp[i].first;
    prev_precision = envelope[i];
  }
  report.ap = ap;
  return report;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  char buf[160];
  out << "threshold,precision,recall,f1\n";
  for (const PrPoint& p : report.per_threshold) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", p.threshold,
                  p.precision, p.recall, p.f1);
    out << buf;
  }
  out << "ods,ods_threshold,ois,ap\n";
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", report.ods,
                report.ods_threshold, report.ois, report.ap);
  out << buf;
}

std::string summary_line(const EvalReport& report) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "ODS=%.6f OIS=%.6f AP=%.6f", report.ods,
                report.ois, report.ap);
  return buf;
}

}  // namespace ebt
