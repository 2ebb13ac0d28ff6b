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
/// \brief Building the frame-count lookup table from per-subcategory AP sweeps.
#ifndef VADET__ETA_BUILDER_HPP_
#define VADET__ETA_BUILDER_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vadet/frame_buffer.hpp"
#include "vadet/geometry.hpp"
#include "vadet/variable_aggregation.hpp"

namespace vadet {

struct BinEdges {
  // Index 5 is 8.16, not 81.6: the edges must ascend.
  std::vector<double> speed_edges{0.00, 0.20, 1.55, 3.63, 5.90, 8.16, 11.34, 17.53};
  std::vector<double> density_edges{0.00, 0.68, 1.86, 3.86, 8.02, 18.81, 71.37};

  std::size_t speed_bins() const noexcept { return speed_edges.size(); }
  std::size_t density_bins() const noexcept { return density_edges.size(); }
  void validate() const;

  friend bool operator==(const BinEdges&, const BinEdges&) = default;
};

struct BinIndex {
  std::size_t speed_bin = 0;
  std::size_t density_bin = 0;

  friend bool operator==(const BinIndex&, const BinIndex&) = default;
};

BinIndex bin_object(double speed, double density, const BinEdges& edges);

/// AP per (speed bin, density bin, frame count); absent where a bin had no objects.
class SweepResult {
 public:
  SweepResult(BinEdges edges, std::size_t n_min, std::size_t n_max);

  const BinEdges& edges() const noexcept { return edges_; }
  std::size_t n_min() const noexcept { return n_min_; }
  std::size_t n_max() const noexcept { return n_max_; }

  std::optional<double> ap(std::size_t speed_bin, std::size_t density_bin,
                           std::size_t frames) const;
  void set_ap(std::size_t speed_bin, std::size_t density_bin, std::size_t frames,
              std::optional<double> value);

  /// Ground-truth objects that fell in the bin (counted once, not per frame count).
  std::size_t sample_count(std::size_t speed_bin, std::size_t density_bin) const;
  void set_sample_count(std::size_t speed_bin, std::size_t density_bin, std::size_t count);

  friend bool operator==(const SweepResult&, const SweepResult&) = default;

 private:
  std::size_t cell(std::size_t speed_bin, std::size_t density_bin) const;
  std::size_t slot(std::size_t speed_bin, std::size_t density_bin, std::size_t frames) const;

  BinEdges edges_;
  std::size_t n_min_;
  std::size_t n_max_;
  std::vector<std::optional<double>> ap_;
  std::vector<std::size_t> sample_counts_;
};

/// One evaluation sequence: frames plus per-frame ground truth in ego coordinates.
struct SweepSequence {
  std::vector<LidarFrame> frames;
  std::vector<std::vector<DetectedBox>> ground_truth;
  double frame_rate = 10.0;
};

/// What a detection source sees for one (sequence, frame, frame count) evaluation.
struct SweepSample {
  std::size_t sequence = 0;
  std::size_t frame = 0;
  std::uint64_t frame_index = 0;
  std::size_t frame_count = 0;
  double frame_rate = 10.0;
  const PointCloud& input;
  std::span<const DetectedBox> ground_truth;
};

/// Must be deterministic and safe to call concurrently.
using DetectionSource = std::function<std::vector<DetectedBox>(const SweepSample&)>;

/// Evaluates the detection source on fixed n-frame aggregation for every n in
/// [n_min, n_max] and records the corrected subset AP of each (speed, density) bin.
/// Every n is evaluated on the same frames: those with at least n_max frames of history.
/// Objects are binned by ground-truth speed and single-frame density.
SweepResult run_sweep(std::span<const SweepSequence> sequences, const DetectionSource& detector,
                      const BinEdges& edges, std::size_t n_min, std::size_t n_max,
                      unsigned threads = 1);

/// Per bin, the frame count of highest AP (ties to the smaller count); bins without
/// any AP fall back to cfg.background_frames, clamped into the sweep range.
EtaTable build_eta_table(const SweepResult& sweep, const VadetConfig& cfg);

}  // namespace vadet

#endif  // VADET__ETA_BUILDER_HPP_
