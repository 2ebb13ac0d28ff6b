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

#include "vadet/eta_builder.hpp"

#include <algorithm>
#include <string>

#include "vadet/error.hpp"
#include "vadet/evaluation.hpp"
#include "vadet/parallel.hpp"

namespace vadet {

void BinEdges::validate() const {
  validate_bin_edges(speed_edges, "speed_edges");
  validate_bin_edges(density_edges, "density_edges");
}

BinIndex bin_object(double speed, double density, const BinEdges& edges) {
  return {bin_index(edges.speed_edges, speed), bin_index(edges.density_edges, density)};
}

SweepResult::SweepResult(BinEdges edges, std::size_t n_min, std::size_t n_max)
    : edges_(std::move(edges)), n_min_(n_min), n_max_(n_max) {
  edges_.validate();
  if (n_min_ == 0 || n_min_ > n_max_) {
    throw DomainError("sweep frame range requires 1 <= n_min <= n_max");
  }
  const std::size_t cells = edges_.speed_bins() * edges_.density_bins();
  ap_.resize(cells * (n_max_ - n_min_ + 1));
  sample_counts_.resize(cells, 0);
}

std::size_t SweepResult::cell(std::size_t speed_bin, std::size_t density_bin) const {
  if (speed_bin >= edges_.speed_bins() || density_bin >= edges_.density_bins()) {
    throw DomainError("sweep bin index out of range");
  }
  return speed_bin * edges_.density_bins() + density_bin;
}

std::size_t SweepResult::slot(std::size_t speed_bin, std::size_t density_bin,
                              std::size_t frames) const {
  if (frames < n_min_ || frames > n_max_) {
    throw DomainError("frame count " + std::to_string(frames) + " outside the sweep range");
  }
  return cell(speed_bin, density_bin) * (n_max_ - n_min_ + 1) + (frames - n_min_);
}

std::optional<double> SweepResult::ap(std::size_t speed_bin, std::size_t density_bin,
                                      std::size_t frames) const {
  return ap_[slot(speed_bin, density_bin, frames)];
}

void SweepResult::set_ap(std::size_t speed_bin, std::size_t density_bin, std::size_t frames,
                         std::optional<double> value) {
  if (value && !(*value >= 0.0 && *value <= 1.0)) {
    throw DomainError("AP values must lie in [0, 1]");
  }
  ap_[slot(speed_bin, density_bin, frames)] = value;
}

std::size_t SweepResult::sample_count(std::size_t speed_bin, std::size_t density_bin) const {
  return sample_counts_[cell(speed_bin, density_bin)];
}

void SweepResult::set_sample_count(std::size_t speed_bin, std::size_t density_bin,
                                   std::size_t count) {
  sample_counts_[cell(speed_bin, density_bin)] = count;
}

namespace {

BinIndex gt_bin(const DetectedBox& gt, const BinEdges& edges) {
  const double density =
      point_density(gt.point_count, gt.box.length, gt.box.width, gt.box.height);
  return bin_object(gt.speed(), density, edges);
}

std::vector<EvalFrame> evaluate_frame_count(std::span<const SweepSequence> sequences,
                                            const DetectionSource& detector, std::size_t n,
                                            std::size_t history) {
  std::vector<EvalFrame> frames;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const SweepSequence& seq = sequences[s];
    FrameBuffer buffer(history, seq.frame_rate);
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
      buffer.push(seq.frames[t]);
      if (t + 1 < history) {
        continue;
      }
      const PointCloud input = fixed_aggregate(buffer, n);
      const SweepSample sample{s,     t,   seq.frames[t].frame_index, n, seq.frame_rate,
                               input, seq.ground_truth[t]};
      frames.push_back({detector(sample), seq.ground_truth[t]});
    }
  }
  return frames;
}

}  // namespace

SweepResult run_sweep(std::span<const SweepSequence> sequences, const DetectionSource& detector,
                      const BinEdges& edges, std::size_t n_min, std::size_t n_max,
                      unsigned threads) {
  SweepResult result(edges, n_min, n_max);
  for (const auto& seq : sequences) {
    if (seq.ground_truth.size() != seq.frames.size()) {
      throw InvalidArgumentError("sweep sequence needs ground truth for every frame");
    }
    for (std::size_t t = n_max - 1; t < seq.frames.size(); ++t) {
      for (const auto& gt : seq.ground_truth[t]) {
        const BinIndex b = gt_bin(gt, edges);
        result.set_sample_count(b.speed_bin, b.density_bin,
                                result.sample_count(b.speed_bin, b.density_bin) + 1);
      }
    }
  }

  const std::size_t counts = n_max - n_min + 1;
  std::vector<std::vector<std::optional<double>>> per_count(counts);
  parallel_for(counts, threads, [&](std::size_t k) {
    const std::size_t n = n_min + k;
    const Evaluation evaluation(evaluate_frame_count(sequences, detector, n, n_max));
    auto& aps = per_count[k];
    aps.resize(edges.speed_bins() * edges.density_bins());
    for (std::size_t sb = 0; sb < edges.speed_bins(); ++sb) {
      for (std::size_t db = 0; db < edges.density_bins(); ++db) {
        if (result.sample_count(sb, db) == 0) {
          continue;
        }
        const BinIndex target{sb, db};
        aps[sb * edges.density_bins() + db] =
            evaluation.evaluate([&](const DetectedBox& gt) { return gt_bin(gt, edges) == target; })
                .ap_corrected;
      }
    }
  });
  for (std::size_t k = 0; k < counts; ++k) {
    for (std::size_t sb = 0; sb < edges.speed_bins(); ++sb) {
      for (std::size_t db = 0; db < edges.density_bins(); ++db) {
        result.set_ap(sb, db, n_min + k, per_count[k][sb * edges.density_bins() + db]);
      }
    }
  }
  return result;
}

EtaTable build_eta_table(const SweepResult& sweep, const VadetConfig& cfg) {
  const BinEdges& edges = sweep.edges();
  std::vector<std::vector<int>> frames(edges.speed_bins(),
                                       std::vector<int>(edges.density_bins(), 0));
  for (std::size_t sb = 0; sb < edges.speed_bins(); ++sb) {
    for (std::size_t db = 0; db < edges.density_bins(); ++db) {
      std::optional<std::size_t> best;
      double best_ap = -1.0;
      for (std::size_t n = sweep.n_min(); n <= sweep.n_max(); ++n) {
        const auto ap = sweep.ap(sb, db, n);
        // Strict comparison while ascending in n keeps the smallest count on ties.
        if (ap && *ap > best_ap) {
          best_ap = *ap;
          best = n;
        }
      }
      const std::size_t fallback =
          std::clamp(cfg.background_frames, sweep.n_min(), sweep.n_max());
      frames[sb][db] = static_cast<int>(best.value_or(fallback));
    }
  }
  return EtaTable(edges.speed_edges, edges.density_edges, std::move(frames), sweep.n_min(),
                  sweep.n_max());
}

}  // namespace vadet
