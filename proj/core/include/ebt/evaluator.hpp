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
#include <iosfwd>
#include <string>
#include <vector>

#include "ebt/grid.hpp"

namespace ebt {

/// `count` uniform threshold values i/(count+1), i = 1..count.
/// count = 99 gives the default grid 0.01, 0.02, ..., 0.99.
std::vector<double> uniform_thresholds(int count);

struct EvalConfig {
  double tolerance = 1.0;  // Euclidean pixels
  std::vector<double> thresholds = uniform_thresholds(99);

  /// Throws std::invalid_argument unless thresholds are strictly
  /// increasing within (0,1) and tolerance >= 0.
  void validate() const;
};

/// One-to-one correspondence tallies between predicted and ground-truth
/// edge pixels. matched_pred == matched_gt always.
struct MatchCounts {
  std::int64_t matched_pred = 0;
  std::int64_t unmatched_pred = 0;
  std::int64_t matched_gt = 0;
  std::int64_t unmatched_gt = 0;
};

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<PrPoint> per_threshold;  // dataset-pooled, one per threshold
  double ods = 0.0;
  double ods_threshold = 0.0;
  double ois = 0.0;
  double ap = 0.0;
};

/// Matches predicted against ground-truth edge pixels; a pair is
/// matchable iff their Euclidean distance is <= tolerance. Pairs are
/// first taken greedily in (distance, pred row-major index, gt row-major
/// index) order, then the matching is grown with augmenting paths until
/// it has maximum cardinality, so the returned counts are assignment-
/// optimal, not merely greedy.
MatchCounts match_maps(const BinaryMap& pred_bin, const BinaryMap& gt,
                       double tolerance);

/// Binarizes pred at `threshold` (>= means edge), matches, and reports
/// precision/recall/F1 with the 0/0 := 0 convention.
PrPoint pr_at_threshold(const PixelGrid& pred, const BinaryMap& gt,
                        double threshold, double tolerance);

/// Dataset scoring: match counts are pooled over images per threshold
/// before precision/recall are formed. ODS is the best pooled F1 over the
/// threshold grid (lowest such threshold on ties); OIS averages each
/// image's own best F1; AP integrates the pooled precision-recall curve
/// (monotone precision envelope, trapezoids over recall, extended to
/// recall 0 at the envelope's maximum).
EvalReport evaluate_dataset(const std::vector<PixelGrid>& preds,
                            const std::vector<BinaryMap>& gts,
                            const EvalConfig& cfg = {});

/// CSV form: header + one row per threshold, then a summary header and
/// row (ods, ods_threshold, ois, ap). All values carry exactly six
/// fractional digits; separator ',', decimal point '.', LF endings.
void write_report_csv(const EvalReport& report, std::ostream& out);

/// "ODS=... OIS=... AP=..." with six fractional digits.
std::string summary_line(const EvalReport& report);

}  // namespace ebt
