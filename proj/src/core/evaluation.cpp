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

#include "vadet/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "vadet/parallel.hpp"

namespace vadet {

Matching match_detections(std::span<const DetectedBox> detections,
                          std::span<const DetectedBox> ground_truths, double iou_threshold) {
  const std::size_t nd = detections.size();
  const std::size_t ng = ground_truths.size();
  std::vector<double> iou(nd * ng, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t g = 0; g < ng; ++g) {
      if (detections[d].class_id == ground_truths[g].class_id) {
        iou[d * ng + g] = iou_3d(detections[d].box, ground_truths[g].box);
      }
    }
  }

  std::vector<std::size_t> order(nd);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  Matching matching;
  std::vector<bool> taken(ng, false);
  for (const std::size_t d : order) {
    std::optional<std::size_t> best_free;
    double best_free_iou = -1.0;
    std::optional<std::size_t> best_any;
    double best_any_iou = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      const double v = iou[d * ng + g];
      if (!taken[g] && v > best_free_iou) {
        best_free = g;
        best_free_iou = v;
      }
      if (v > best_any_iou) {
        best_any = g;
        best_any_iou = v;
      }
    }
    if (best_free && best_free_iou >= iou_threshold) {
      taken[*best_free] = true;
      matching.pairs.push_back({d, *best_free, best_free_iou});
    } else {
      matching.unmatched_detections.push_back({d, best_any, best_any_iou});
    }
  }
  for (std::size_t g = 0; g < ng; ++g) {
    if (!taken[g]) {
      matching.unmatched_ground_truths.push_back(g);
    }
  }
  return matching;
}

std::optional<double> average_precision(std::span<const RankedOutcome> outcomes,
                                        double num_ground_truths) {
  if (!(num_ground_truths > 0.0)) {
    return std::nullopt;
  }
  std::vector<RankedOutcome> ranked(outcomes.begin(), outcomes.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedOutcome& a, const RankedOutcome& b) { return a.score > b.score; });

  std::vector<double> recall;
  std::vector<double> precision;
  recall.reserve(ranked.size());
  precision.reserve(ranked.size());
  double tp = 0.0;
  double fp = 0.0;
  for (const auto& o : ranked) {
    if (o.tp == 0.0 && o.fp == 0.0) {
      continue;
    }
    tp += o.tp;
    fp += o.fp;
    recall.push_back(tp / num_ground_truths);
    precision.push_back(tp / (tp + fp));
  }
  // Non-increasing envelope from the right.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double previous_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    if (recall[i] > previous_recall) {
      ap += (recall[i] - previous_recall) * precision[i];
      previous_recall = recall[i];
    }
  }
  return std::clamp(ap, 0.0, 1.0);
}

SubsetCounts& SubsetCounts::operator+=(const SubsetCounts& o) {
  tp_subset += o.tp_subset;
  fp_subset += o.fp_subset;
  fn_subset += o.fn_subset;
  fp_unknown += o.fp_unknown;
  n_subset += o.n_subset;
  n_total += o.n_total;
  return *this;
}

SubsetCounts classify_subset_outcomes(const Matching& matching,
                                      const std::function<bool(std::size_t)>& in_subset,
                                      std::span<const DetectedBox> /*detections*/,
                                      std::span<const DetectedBox> ground_truths) {
  SubsetCounts c;
  c.n_total = ground_truths.size();
  for (std::size_t g = 0; g < ground_truths.size(); ++g) {
    if (in_subset(g)) {
      ++c.n_subset;
    }
  }
  for (const auto& p : matching.pairs) {
    if (in_subset(p.ground_truth)) {
      ++c.tp_subset;
    }
  }
  c.fn_subset = c.n_subset - c.tp_subset;
  for (const auto& u : matching.unmatched_detections) {
    if (!u.best_ground_truth) {
      ++c.fp_unknown;
    } else if (in_subset(*u.best_ground_truth)) {
      ++c.fp_subset;
    }
  }
  return c;
}

std::optional<double> subset_precision_waymo(const SubsetCounts& c) {
  const double denom = static_cast<double>(c.tp_subset + c.fp_subset + c.fp_unknown);
  if (denom <= 0.0) {
    return std::nullopt;
  }
  return static_cast<double>(c.tp_subset) / denom;
}

std::optional<double> subset_precision_corrected(const SubsetCounts& c) {
  if (c.n_total == 0) {
    return std::nullopt;
  }
  const double share = static_cast<double>(c.n_subset) / static_cast<double>(c.n_total);
  const double denom = static_cast<double>(c.tp_subset + c.fp_subset) +
                       share * static_cast<double>(c.fp_unknown);
  if (denom <= 0.0) {
    return std::nullopt;
  }
  return static_cast<double>(c.tp_subset) / denom;
}

std::optional<double> subset_recall(const SubsetCounts& c) {
  const std::size_t denom = c.tp_subset + c.fn_subset;
  if (denom == 0) {
    return std::nullopt;
  }
  return static_cast<double>(c.tp_subset) / static_cast<double>(denom);
}

Evaluation::Evaluation(std::vector<EvalFrame> frames, double iou_threshold, unsigned threads)
    : frames_(std::move(frames)) {
  std::vector<std::vector<Record>> per_frame(frames_.size());
  parallel_for(frames_.size(), threads, [&](std::size_t f) {
    const auto& frame = frames_[f];
    const Matching m = match_detections(frame.detections, frame.ground_truths, iou_threshold);
    auto& out = per_frame[f];
    for (const auto& p : m.pairs) {
      out.push_back({frame.detections[p.detection].score, f, p.detection,
                     Outcome::kTruePositive, p.ground_truth});
    }
    for (const auto& u : m.unmatched_detections) {
      out.push_back({frame.detections[u.detection].score, f, u.detection,
                     u.best_ground_truth ? Outcome::kOverlapFalsePositive
                                         : Outcome::kUnknownFalsePositive,
                     u.best_ground_truth.value_or(0)});
    }
  });
  for (std::size_t f = 0; f < frames_.size(); ++f) {
    total_ground_truths_ += frames_[f].ground_truths.size();
    records_.insert(records_.end(), per_frame[f].begin(), per_frame[f].end());
  }
  std::sort(records_.begin(), records_.end(), [](const Record& a, const Record& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.detection < b.detection;
  });
}

SubsetEvaluation Evaluation::evaluate(const GroundTruthPredicate& in_subset) const {
  std::vector<std::vector<char>> member(frames_.size());
  SubsetEvaluation result;
  SubsetCounts& c = result.counts;
  c.n_total = total_ground_truths_;
  for (std::size_t f = 0; f < frames_.size(); ++f) {
    const auto& gts = frames_[f].ground_truths;
    member[f].resize(gts.size());
    for (std::size_t g = 0; g < gts.size(); ++g) {
      member[f][g] = in_subset(gts[g]) ? 1 : 0;
      c.n_subset += static_cast<std::size_t>(member[f][g]);
    }
  }
  const double share =
      c.n_total == 0 ? 0.0 : static_cast<double>(c.n_subset) / static_cast<double>(c.n_total);

  std::vector<RankedOutcome> waymo;
  std::vector<RankedOutcome> corrected;
  for (const auto& r : records_) {
    switch (r.outcome) {
      case Outcome::kTruePositive:
        if (member[r.frame][r.ground_truth] != 0) {
          ++c.tp_subset;
          waymo.push_back({r.score, 1.0, 0.0});
          corrected.push_back({r.score, 1.0, 0.0});
        }
        break;
      case Outcome::kOverlapFalsePositive:
        if (member[r.frame][r.ground_truth] != 0) {
          ++c.fp_subset;
          waymo.push_back({r.score, 0.0, 1.0});
          corrected.push_back({r.score, 0.0, 1.0});
        }
        break;
      case Outcome::kUnknownFalsePositive:
        ++c.fp_unknown;
        waymo.push_back({r.score, 0.0, 1.0});
        corrected.push_back({r.score, 0.0, share});
        break;
    }
  }
  c.fn_subset = c.n_subset - c.tp_subset;
  const double n = static_cast<double>(c.n_subset);
  result.ap_waymo = average_precision(waymo, n);
  result.ap_corrected = average_precision(corrected, n);
  result.precision_waymo = subset_precision_waymo(c);
  result.precision_corrected = subset_precision_corrected(c);
  result.recall = subset_recall(c);
  if (c.n_subset == 0) {
    result.precision_waymo.reset();
    result.precision_corrected.reset();
  }
  return result;
}

SubsetEvaluation Evaluation::evaluate_all() const {
  return evaluate([](const DetectedBox&) { return true; });
}

std::string BreakdownCategories::speed_category(double speed) const {
  if (speed < stationary_below) return "stationary";
  if (speed < fast_from) return "slow";
  return "fast";
}

std::string BreakdownCategories::density_category(double density) const {
  if (density < sparse_below) return "sparse";
  if (density < dense_from) return "medium";
  return "dense";
}

WeightedAverage weighted_average(std::span<const SubsetEvaluation> subsets) {
  WeightedAverage avg;
  double wsum_w = 0.0;
  double sum_w = 0.0;
  double wsum_c = 0.0;
  double sum_c = 0.0;
  for (const auto& s : subsets) {
    const double n = static_cast<double>(s.counts.n_subset);
    avg.n += s.counts.n_subset;
    if (s.ap_waymo) {
      wsum_w += n * *s.ap_waymo;
      sum_w += n;
    }
    if (s.ap_corrected) {
      wsum_c += n * *s.ap_corrected;
      sum_c += n;
    }
  }
  if (sum_w > 0.0) avg.ap_waymo = wsum_w / sum_w;
  if (sum_c > 0.0) avg.ap_corrected = wsum_c / sum_c;
  return avg;
}

namespace {

double gt_density(const DetectedBox& gt) {
  return point_density(gt.point_count, gt.box.length, gt.box.width, gt.box.height);
}

void append_group(std::vector<ReportRow>& rows, const std::string& breakdown,
                  const std::vector<std::string>& names,
                  const std::function<std::string(const DetectedBox&)>& categorize,
                  const Evaluation& evaluation, const std::string& frame_config) {
  std::vector<SubsetEvaluation> results;
  for (const auto& name : names) {
    auto r = evaluation.evaluate(
        [&](const DetectedBox& gt) { return categorize(gt) == name; });
    rows.push_back({breakdown, name, frame_config, r});
    results.push_back(r);
  }
  const WeightedAverage avg = weighted_average(results);
  ReportRow row{breakdown, "weighted_average", frame_config, {}};
  row.result.counts.n_subset = avg.n;
  row.result.counts.n_total = evaluation.total_ground_truths();
  row.result.ap_waymo = avg.ap_waymo;
  row.result.ap_corrected = avg.ap_corrected;
  rows.push_back(row);
}

}  // namespace

std::vector<ReportRow> breakdown_report(const Evaluation& evaluation,
                                        const BreakdownSelection& selection,
                                        const BreakdownCategories& categories,
                                        const std::string& frame_config) {
  std::vector<ReportRow> rows;
  rows.push_back({"overall", "all", frame_config, evaluation.evaluate_all()});

  const std::vector<std::string> speeds{"stationary", "slow", "fast"};
  const std::vector<std::string> densities{"sparse", "medium", "dense"};
  if (selection.speed) {
    append_group(
        rows, "speed", speeds,
        [&](const DetectedBox& gt) { return categories.speed_category(gt.speed()); }, evaluation,
        frame_config);
  }
  if (selection.density) {
    append_group(
        rows, "density", densities,
        [&](const DetectedBox& gt) { return categories.density_category(gt_density(gt)); },
        evaluation, frame_config);
  }
  if (selection.cross) {
    std::vector<std::string> cells;
    for (const auto& s : speeds) {
      for (const auto& d : densities) {
        cells.push_back(s + "/" + d);
      }
    }
    append_group(
        rows, "cross", cells,
        [&](const DetectedBox& gt) {
          return categories.speed_category(gt.speed()) + "/" +
                 categories.density_category(gt_density(gt));
        },
        evaluation, frame_config);
  }
  return rows;
}

}  // namespace vadet
