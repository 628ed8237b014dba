#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ebt/evaluator.hpp"
#include "ebt/rng.hpp"
#include "oracles.hpp"

using ebt::BinaryMap;
using ebt::EvalConfig;
using ebt::EvalReport;
using ebt::MatchCounts;
using ebt::PixelGrid;
using ebt::PrPoint;

namespace {

BinaryMap map_from(std::initializer_list<std::initializer_list<int>> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.begin()->size());
  BinaryMap map(h, w);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (int v : row) map.set(r, c++, v != 0);
    ++r;
  }
  return map;
}

PixelGrid grid_from(std::initializer_list<std::initializer_list<double>> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.begin()->size());
  PixelGrid grid(h, w, 0.0);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) grid.at(r, c++) = v;
    ++r;
  }
  return grid;
}

}  // namespace

TEST_CASE("match_maps: identical maps match fully at tolerance 0") {
  const BinaryMap gt = testsupport::random_map(12, 9, 0.3, 31);
  const MatchCounts m = ebt::match_maps(gt, gt, 0.0);
  CHECK(m.matched_pred == gt.edge_count());
  CHECK(m.matched_gt == gt.edge_count());
  CHECK(m.unmatched_pred == 0);
  CHECK(m.unmatched_gt == 0);
}

TEST_CASE("match_maps: one-column shift matches fully at tolerance 1") {
  BinaryMap gt(10, 10), pred(10, 10);
  for (int r = 0; r < 10; ++r) {
    gt.set(r, 5, true);
    pred.set(r, 6, true);
  }
  const MatchCounts m = ebt::match_maps(pred, gt, 1.0);
  CHECK(m.matched_pred == 10);
  CHECK(m.unmatched_pred == 0);
  CHECK(m.unmatched_gt == 0);
}

TEST_CASE("match_maps: diagonals are outside a 1-pixel tolerance") {
  BinaryMap gt(3, 3), pred(3, 3);
  gt.set(0, 0, true);
  pred.set(1, 1, true);  // distance sqrt(2)
  const MatchCounts m = ebt::match_maps(pred, gt, 1.0);
  CHECK(m.matched_pred == 0);
  CHECK(ebt::match_maps(pred, gt, 1.5).matched_pred == 1);
}

TEST_CASE("match_maps equals the assignment oracle on random pairs") {
  ebt::Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = rng.next_int(1, 20);
    const int w = rng.next_int(1, 20);
    const BinaryMap pred =
        testsupport::random_map(h, w, rng.next_range(0.05, 0.5), 900 + trial);
    const BinaryMap gt =
        testsupport::random_map(h, w, rng.next_range(0.05, 0.5), 1900 + trial);
    for (double tol : {0.0, 1.0, 2.0}) {
      const MatchCounts m = ebt::match_maps(pred, gt, tol);
      CHECK(m.matched_pred == m.matched_gt);
      CHECK(m.matched_pred == testsupport::max_matching_oracle(pred, gt, tol));
      CHECK(m.matched_pred + m.unmatched_pred == pred.edge_count());
      CHECK(m.matched_gt + m.unmatched_gt == gt.edge_count());
    }
  }
}

TEST_CASE("pr_at_threshold: exact prediction scores 1 everywhere") {
  const BinaryMap gt = testsupport::random_map(8, 8, 0.3, 53);
  PixelGrid pred(8, 8, 0.0);
  for (std::int64_t i = 0; i < gt.size(); ++i) pred[i] = gt.is_edge(i) ? 1.0 : 0.0;
  const PrPoint p = ebt::pr_at_threshold(pred, gt, 0.5, 1.0);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);
}

TEST_CASE("pr_at_threshold: the 0/0 convention") {
  BinaryMap gt(4, 4);
  gt.set(2, 2, true);
  const PrPoint p = ebt::pr_at_threshold(PixelGrid(4, 4, 0.0), gt, 0.5, 1.0);
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f1 == 0.0);
}

TEST_CASE("pr_at_threshold: three hits and one stray on four edges") {
  BinaryMap gt(8, 8);
  gt.set(1, 1, true);
  gt.set(3, 3, true);
  gt.set(5, 5, true);
  gt.set(7, 7, true);
  PixelGrid pred(8, 8, 0.0);
  pred.at(1, 1) = 0.9;
  pred.at(3, 3) = 0.9;
  pred.at(5, 5) = 0.9;
  pred.at(0, 7) = 0.9;  // farther than 1 pixel from every gt edge
  const PrPoint p = ebt::pr_at_threshold(pred, gt, 0.5, 1.0);
  CHECK(p.precision == doctest::Approx(0.75));
  CHECK(p.recall == doctest::Approx(0.75));
  CHECK(p.f1 == doctest::Approx(0.75));
}

TEST_CASE("evaluate_dataset: perfect predictions score 1/1/1") {
  std::vector<PixelGrid> preds;
  std::vector<BinaryMap> gts;
  for (int i = 0; i < 3; ++i) {
    const BinaryMap gt = testsupport::random_map(10, 14, 0.2, 70 + i);
    PixelGrid pred(10, 14, 0.0);
    for (std::int64_t k = 0; k < gt.size(); ++k)
      pred[k] = gt.is_edge(k) ? 1.0 : 0.0;
    gts.push_back(gt);
    preds.push_back(pred);
  }
  const EvalReport report = ebt::evaluate_dataset(preds, gts);
  CHECK(report.ods == 1.0);
  CHECK(report.ois == 1.0);
  CHECK(report.ap == 1.0);
}

TEST_CASE("evaluate_dataset: single image makes ODS equal OIS") {
  const BinaryMap gt = testsupport::random_map(12, 12, 0.15, 81);
  const PixelGrid pred = testsupport::random_pred(12, 12, 82);
  const EvalReport report = ebt::evaluate_dataset({pred}, {gt});
  CHECK(report.ods == doctest::Approx(report.ois).epsilon(1e-15));
}

// Two 1x4 images, tolerance 0, thresholds {0.25, 0.5, 0.75}. Counts by
// hand (matched/pred/gt pooled over both images):
//   t=0.25: A bin 1110 -> m=2,p=3; B bin 1100 -> m=1,p=2; pooled 3/5/4
//   t=0.50: A bin 1010 -> m=1,p=2; B bin 1100 -> m=1,p=2; pooled 2/4/4
//   t=0.75: A bin 1000 -> m=1,p=1; B bin 1100 -> m=1,p=2; pooled 2/3/4
// Pooled P/R/F1: (3/5, 3/4, 2/3), (1/2, 1/2, 1/2), (2/3, 1/2, 4/7).
// ODS = 2/3, uniquely at threshold 0.25.
// Per-image max F1: A 4/5 at t=0.25; B 1/2 everywhere -> OIS = 13/20.
// AP: points sorted by recall (1/2,1/2),(1/2,2/3),(3/4,3/5); envelope
// (2/3,2/3,3/5); extend (0,2/3); area = 1/2*2/3 + 1/4*(3/5+2/3)/2
// = 1/3 + 19/120 = 59/120.
TEST_CASE("evaluate_dataset: hand-aggregated two-image toy set") {
  const BinaryMap gt_a = map_from({{1, 1, 0, 0}});
  const PixelGrid pred_a = grid_from({{0.8, 0.3, 0.6, 0.1}});
  const BinaryMap gt_b = map_from({{1, 0, 1, 0}});
  const PixelGrid pred_b = grid_from({{0.9, 0.8, 0.2, 0.0}});

  EvalConfig cfg;
  cfg.tolerance = 0.0;
  cfg.thresholds = {0.25, 0.5, 0.75};
  const EvalReport report =
      ebt::evaluate_dataset({pred_a, pred_b}, {gt_a, gt_b}, cfg);

  REQUIRE(report.per_threshold.size() == 3);
  CHECK(report.per_threshold[0].precision == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(report.per_threshold[0].recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(report.per_threshold[0].f1 ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(report.per_threshold[1].precision == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.per_threshold[1].recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.per_threshold[2].precision ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(report.per_threshold[2].recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.per_threshold[2].f1 == doctest::Approx(4.0 / 7.0).epsilon(1e-12));

  CHECK(report.ods == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(report.ods_threshold == doctest::Approx(0.25));
  CHECK(report.ois == doctest::Approx(13.0 / 20.0).epsilon(1e-12));
  CHECK(report.ap == doctest::Approx(59.0 / 120.0).epsilon(1e-12));
}

// Pooling makes OIS >= ODS an empirical regularity, not a theorem (the
// counterexample below shows the reverse). On homogeneous noise
// predictions the ordering holds; these fixed seeds pin that behavior.
TEST_CASE("evaluate_dataset: OIS dominates ODS on homogeneous datasets") {
  ebt::Rng rng(59);
  EvalConfig cfg;
  cfg.thresholds = ebt::uniform_thresholds(19);
  for (int trial = 0; trial < 15; ++trial) {
    const int images = rng.next_int(2, 4);
    const int h = rng.next_int(8, 16);
    const int w = rng.next_int(8, 16);
    std::vector<PixelGrid> preds;
    std::vector<BinaryMap> gts;
    for (int i = 0; i < images; ++i) {
      gts.push_back(
          testsupport::random_map(h, w, 0.15, 3000 + 10 * trial + i));
      preds.push_back(testsupport::random_pred(h, w, 4000 + 10 * trial + i));
    }
    const EvalReport report = ebt::evaluate_dataset(preds, gts, cfg);
    CHECK(report.ois >= report.ods - 1e-12);
    CHECK(report.ods >= 0.0);
    CHECK(report.ods <= 1.0);
    CHECK(report.ap >= 0.0);
    CHECK(report.ap <= 1.0);
    for (const PrPoint& p : report.per_threshold) {
      CHECK(p.precision >= 0.0);
      CHECK(p.precision <= 1.0);
      CHECK(p.recall >= 0.0);
      CHECK(p.recall <= 1.0);
    }
  }
}

// Count pooling weights images by their pixel tallies, so a large easy
// image can pull the pooled F1 above the mean of per-image optima.
// Image A: 1 gt pixel buried under 9 predictions -> P=1/9, R=1, F1=1/5.
// Image B: 9 gt pixels predicted exactly -> F1 = 1. Pooled: P = 10/18,
// R = 1, F1 = 5/7, while OIS = (1/5 + 1)/2 = 3/5 < 5/7.
TEST_CASE("evaluate_dataset: pooled ODS can exceed OIS (documented)") {
  BinaryMap gt_a(4, 4), gt_b(4, 4);
  PixelGrid pred_a(4, 4, 0.0), pred_b(4, 4, 0.0);
  gt_a.set(0, 0, true);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) {
      pred_a.at(r, c) = 0.9;  // 9 predictions, 1 matchable gt pixel
      gt_b.set(r, c, true);
      pred_b.at(r, c) = 0.9;  // 9 predictions, all 9 gt pixels hit
    }

  EvalConfig cfg;
  cfg.tolerance = 0.0;
  cfg.thresholds = {0.5};
  const EvalReport report =
      ebt::evaluate_dataset({pred_a, pred_b}, {gt_a, gt_b}, cfg);
  CHECK(report.ods == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK(report.ois == doctest::Approx(3.0 / 5.0).epsilon(1e-12));
  CHECK(report.ods > report.ois);
}

TEST_CASE("binarization is monotone in the threshold") {
  const PixelGrid pred = testsupport::random_pred(10, 10, 61);
  const BinaryMap gt = testsupport::random_map(10, 10, 0.2, 62);
  std::int64_t prev = gt.size() + 1;
  for (double t : ebt::uniform_thresholds(9)) {
    BinaryMap bin(10, 10);
    for (int r = 0; r < 10; ++r)
      for (int c = 0; c < 10; ++c) bin.set(r, c, pred.at(r, c) >= t);
    const MatchCounts m = ebt::match_maps(bin, gt, 1.0);
    const std::int64_t total_pred = m.matched_pred + m.unmatched_pred;
    CHECK(total_pred <= prev);
    prev = total_pred;
  }
}

TEST_CASE("evaluate_dataset pools across images of different shapes") {
  // Perfect predictions on mixed extents still pool to 1/1/1.
  std::vector<PixelGrid> preds;
  std::vector<BinaryMap> gts;
  for (auto [h, w] : {std::pair{6, 10}, {15, 4}, {9, 9}}) {
    const BinaryMap gt = testsupport::random_map(h, w, 0.25, 7 * h + w);
    PixelGrid pred(h, w, 0.0);
    for (std::int64_t k = 0; k < gt.size(); ++k)
      pred[k] = gt.is_edge(k) ? 1.0 : 0.0;
    gts.push_back(gt);
    preds.push_back(std::move(pred));
  }
  const EvalReport report = ebt::evaluate_dataset(preds, gts);
  CHECK(report.ods == 1.0);
  CHECK(report.ois == 1.0);
  CHECK(report.ap == 1.0);
}

TEST_CASE("evaluator rejects malformed inputs") {
  CHECK_THROWS_AS(ebt::evaluate_dataset({}, {}), ebt::UsageError);
  const PixelGrid pred(3, 3, 0.5);
  const BinaryMap gt(3, 3);
  CHECK_THROWS_AS(ebt::evaluate_dataset({pred}, {gt, gt}), ebt::UsageError);
  CHECK_THROWS_AS(ebt::match_maps(BinaryMap(2, 2), BinaryMap(2, 3), 1.0),
                  ebt::ShapeError);
  EvalConfig bad;
  bad.thresholds = {0.5, 0.4};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("report CSV carries six fractional digits and a summary row") {
  const BinaryMap gt = testsupport::random_map(6, 6, 0.3, 91);
  PixelGrid pred(6, 6, 0.0);
  for (std::int64_t i = 0; i < gt.size(); ++i) pred[i] = gt.is_edge(i) ? 1.0 : 0.0;
  EvalConfig cfg;
  cfg.thresholds = {0.5};
  const EvalReport report = ebt::evaluate_dataset({pred}, {gt}, cfg);

  std::ostringstream out;
  ebt::write_report_csv(report, out);
  CHECK(out.str() ==
        "threshold,precision,recall,f1\n"
        "0.500000,1.000000,1.000000,1.000000\n"
        "ods,ods_threshold,ois,ap\n"
        "1.000000,0.500000,1.000000,1.000000\n");
  CHECK(ebt::summary_line(report) == "ODS=1.000000 OIS=1.000000 AP=1.000000");
}
