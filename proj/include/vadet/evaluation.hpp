// Copyright 2026 The vadet Authors
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

/// \file
/// \brief Detection matching, average precision and subset metrics.
///
/// Subset evaluation splits false positives into those overlapping some ground truth
/// (charged to the subset of the best-overlapping ground truth) and those overlapping
/// nothing ("unknown"). The Waymo-style precision charges every unknown false positive
/// to every subset; the corrected precision charges a subset only its population share
/// n_subset / n_total of them, which makes subset APs comparable and averageable.
#ifndef VADET__EVALUATION_HPP_
#define VADET__EVALUATION_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vadet/geometry.hpp"

namespace vadet {

inline constexpr double kMatchIouThreshold = 0.7;

struct MatchPair {
  std::size_t detection = 0;
  std::size_t ground_truth = 0;
  double iou = 0.0;
};

struct UnmatchedDetection {
  std::size_t detection = 0;
  /// Ground truth of maximum IoU, if any overlaps at all (IoU > 0).
  std::optional<std::size_t> best_ground_truth;
  double best_iou = 0.0;
};

struct Matching {
  std::vector<MatchPair> pairs;
  std::vector<UnmatchedDetection> unmatched_detections;
  std::vector<std::size_t> unmatched_ground_truths;
};

/// Greedy matching in descending score order (ties by detection index). Each detection
/// takes the still-unmatched ground truth of the same class with highest IoU (ties by
/// index) when that IoU reaches `iou_threshold`.
Matching match_detections(std::span<const DetectedBox> detections,
                          std::span<const DetectedBox> ground_truths,
                          double iou_threshold = kMatchIouThreshold);

/// One ranked detection; tp / fp are weights so fractional false positives can enter.
struct RankedOutcome {
  double score = 0.0;
  double tp = 0.0;
  double fp = 0.0;
};

/// Area under the non-increasing precision envelope over recall (all-point
/// interpolation). Outcomes are ranked by descending score, stable for ties.
/// Absent when there are no ground truths.
std::optional<double> average_precision(std::span<const RankedOutcome> outcomes,
                                        double num_ground_truths);

struct SubsetCounts {
  std::size_t tp_subset = 0;
  std::size_t fp_subset = 0;
  std::size_t fn_subset = 0;
  std::size_t fp_unknown = 0;
  std::size_t n_subset = 0;
  std::size_t n_total = 0;

  SubsetCounts& operator+=(const SubsetCounts& o);
  friend bool operator==(const SubsetCounts&, const SubsetCounts&) = default;
};

/// Tallies one frame. `in_subset(g)` tells whether ground truth g belongs to the subset.
SubsetCounts classify_subset_outcomes(const Matching& matching,
                                      const std::function<bool(std::size_t)>& in_subset,
                                      std::span<const DetectedBox> detections,
                                      std::span<const DetectedBox> ground_truths);

std::optional<double> subset_precision_waymo(const SubsetCounts& c);
std::optional<double> subset_precision_corrected(const SubsetCounts& c);
std::optional<double> subset_recall(const SubsetCounts& c);

struct EvalFrame {
  std::vector<DetectedBox> detections;
  std::vector<DetectedBox> ground_truths;
};

using GroundTruthPredicate = std::function<bool(const DetectedBox&)>;

struct SubsetEvaluation {
  SubsetCounts counts;
  std::optional<double> ap_waymo;
  std::optional<double> ap_corrected;
  std::optional<double> precision_waymo;
  std::optional<double> precision_corrected;
  std::optional<double> recall;
};

/// A matched evaluation set over many frames; subsets are evaluated on demand.
class Evaluation {
 public:
  explicit Evaluation(std::vector<EvalFrame> frames, double iou_threshold = kMatchIouThreshold,
                      unsigned threads = 1);

  SubsetEvaluation evaluate(const GroundTruthPredicate& in_subset) const;
  SubsetEvaluation evaluate_all() const;

  std::size_t total_ground_truths() const noexcept { return total_ground_truths_; }
  const std::vector<EvalFrame>& frames() const noexcept { return frames_; }

 private:
  enum class Outcome { kTruePositive, kOverlapFalsePositive, kUnknownFalsePositive };
  struct Record {
    double score;
    std::size_t frame;
    std::size_t detection;
    Outcome outcome;
    std::size_t ground_truth;  // matched or best-overlapping; unused for unknown
  };

  std::vector<EvalFrame> frames_;
  std::vector<Record> records_;
  std::size_t total_ground_truths_ = 0;
};

/// Speed and density categories for breakdown reports.
struct BreakdownCategories {
  double stationary_below = 0.2;  // m/s
  double fast_from = 10.0;        // m/s
  double sparse_below = 2.0;      // pts/m^2
  double dense_from = 100.0;      // pts/m^2

  std::string speed_category(double speed) const;
  std::string density_category(double density) const;
};

struct BreakdownSelection {
  bool speed = true;
  bool density = true;
  bool cross = true;
};

struct ReportRow {
  std::string breakdown;  // "overall", "speed", "density" or "cross"
  std::string category;   // e.g. "fast", "sparse", "slow/dense", "weighted_average"
  std::string frame_config;
  SubsetEvaluation result;
};

/// Per-category subset metrics with both precision formulations, plus a size-weighted
/// average row per breakdown. Ground-truth density uses its single-frame point count.
std::vector<ReportRow> breakdown_report(const Evaluation& evaluation,
                                        const BreakdownSelection& selection,
                                        const BreakdownCategories& categories,
                                        const std::string& frame_config);

/// Mean of the present subset APs weighted by subset size.
struct WeightedAverage {
  std::optional<double> ap_waymo;
  std::optional<double> ap_corrected;
  std::size_t n = 0;
};
WeightedAverage weighted_average(std::span<const SubsetEvaluation> subsets);

}  // namespace vadet

#endif  // VADET__EVALUATION_HPP_
