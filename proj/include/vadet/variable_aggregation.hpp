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
/// \brief Per-object variable aggregation.
///
/// Every detection from the previous frame is turned into an aggregation region: the
/// box is advanced one frame under a constant-velocity model, stretched backwards along
/// its heading to cover the trail it left over the past frames, and assigned a frame
/// count looked up from its speed and point density. Past frames are then cropped by
/// the regions still "alive" at their age and concatenated with a short fixed
/// aggregation of everything outside the regions.
#ifndef VADET__VARIABLE_AGGREGATION_HPP_
#define VADET__VARIABLE_AGGREGATION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "vadet/frame_buffer.hpp"
#include "vadet/geometry.hpp"

namespace vadet {

/// Index of the half-open bin [edges[k], edges[k+1]) holding `value`; the last bin is
/// unbounded above. Throws DomainError for negative or NaN values.
std::size_t bin_index(std::span<const double> edges, double value);

/// Throws DomainError unless `edges` is non-empty, starts at 0 and strictly ascends.
void validate_bin_edges(std::span<const double> edges, const char* name);

struct VadetConfig {
  /// Multiplicative margin on every region dimension; must be >= 1.
  double sigma = 1.1;
  std::size_t background_frames = 3;
  double frame_rate = 10.0;
  std::size_t n_min = 3;
  std::size_t n_max = 16;
  /// Worker threads for crop passes; 0 selects hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

/// Speed-bin x density-bin lookup from object properties to a frame count.
class EtaTable {
 public:
  EtaTable(std::vector<double> speed_edges, std::vector<double> density_edges,
           std::vector<std::vector<int>> frames, std::size_t n_min, std::size_t n_max);

  /// Frame count for an object; bins are lower-inclusive, top bins unbounded.
  std::size_t lookup(double speed, double density) const;

  const std::vector<double>& speed_edges() const noexcept { return speed_edges_; }
  const std::vector<double>& density_edges() const noexcept { return density_edges_; }
  const std::vector<std::vector<int>>& frames() const noexcept { return frames_; }
  std::size_t n_min() const noexcept { return n_min_; }
  std::size_t n_max() const noexcept { return n_max_; }

  friend bool operator==(const EtaTable&, const EtaTable&) = default;

 private:
  std::vector<double> speed_edges_;
  std::vector<double> density_edges_;
  std::vector<std::vector<int>> frames_;
  std::size_t n_min_;
  std::size_t n_max_;
};

struct AggregationRegion {
  OrientedBox box;
  std::size_t frame_count = 1;
  std::size_t source_id = 0;
};

/// Region for a previous-frame detection expressed in current ego coordinates.
/// Throws DomainError when `eta` < 1.
AggregationRegion predict_region(const DetectedBox& previous, std::size_t eta,
                                 const VadetConfig& cfg, std::size_t source_id = 0);

/// Crops of past frames by the regions alive at each age (frame_count > age).
///
/// Output is ordered by frame age, then by the lowest-indexed region containing the
/// point, then by point ordinal. A point inside several regions is emitted once.
/// Throws InsufficientHistoryError if any region wants more frames than are buffered.
PointCloud aggregate_objects(const FrameBuffer& buffer, std::span<const AggregationRegion> regions,
                             unsigned threads = 0);

/// Fixed aggregation of the newest cfg.background_frames frames with every point lying
/// inside any region removed.
PointCloud aggregate_background(const FrameBuffer& buffer,
                                std::span<const AggregationRegion> regions,
                                const VadetConfig& cfg);

/// Regions for all previous detections. Frame counts are clamped to the buffered
/// history so a pipeline can run from the start of a sequence.
std::vector<AggregationRegion> plan_regions(const FrameBuffer& buffer,
                                            std::span<const DetectedBox> previous,
                                            const EtaTable& table, const VadetConfig& cfg);

/// Object points followed by background points.
PointCloud build_vadet_input(const FrameBuffer& buffer, std::span<const DetectedBox> previous,
                             const EtaTable& table, const VadetConfig& cfg);

}  // namespace vadet

#endif  // VADET__VARIABLE_AGGREGATION_HPP_
