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
/// \brief Sliding window of recent LiDAR sweeps and fixed multi-frame aggregation.
#ifndef VADET__FRAME_BUFFER_HPP_
#define VADET__FRAME_BUFFER_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>

#include "vadet/geometry.hpp"
#include "vadet/random.hpp"

namespace vadet {

/// One sensor sweep. Positions are in ego coordinates; `pose` maps ego to world.
struct LidarFrame {
  PointCloud cloud;
  Pose pose;
  std::uint64_t timestamp_us = 0;
  std::uint64_t frame_index = 0;
};

/// Holds at most `capacity` consecutive frames, newest last. Copies are cheap
/// snapshots sharing the immutable frames, so a copy may be handed to another thread
/// while the original keeps receiving frames.
class FrameBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 16;
  static constexpr double kDefaultFrameRate = 10.0;

  explicit FrameBuffer(std::size_t capacity = kDefaultCapacity,
                       double frame_rate_hz = kDefaultFrameRate);

  /// Appends `frame`, evicting the oldest frame when full. Throws SequenceGapError
  /// unless frame_index is exactly one past the newest buffered index.
  void push(LidarFrame frame);
  void clear() noexcept { frames_.clear(); }

  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  double frame_rate() const noexcept { return frame_rate_; }

  /// Frame `age` steps before the newest one (age 0 is the newest).
  const LidarFrame& at_age(std::size_t age) const;
  const LidarFrame& newest() const { return at_age(0); }

  /// Transform taking frame `age`'s ego coordinates into the newest ego frame.
  Pose correction(std::size_t age) const;

 private:
  std::size_t capacity_;
  double frame_rate_;
  std::deque<std::shared_ptr<const LidarFrame>> frames_;
};

/// Relative-timestamp value assigned to points of a frame `age` steps old.
double relative_timestamp(std::size_t age, double frame_rate_hz);

/// Concatenates the `n` newest frames, each corrected into the newest ego frame,
/// newest first with within-frame order preserved. The timestamp channel is set to
/// -age / frame_rate. Throws InsufficientHistoryError when n exceeds the buffer.
PointCloud fixed_aggregate(const FrameBuffer& buffer, std::size_t n);

/// Uniform integer in [n_min, n_max] (random-aggregation training).
std::size_t sample_rat_count(Rng& rng, std::size_t n_min, std::size_t n_max);

enum class RatGranularity { kPerScene, kPerIteration };

/// Frame-count schedule for random-aggregation training. Per-scene granularity fixes
/// one count per scene for the whole run; per-iteration redraws on every call.
class RatSampler {
 public:
  RatSampler(std::size_t n_min, std::size_t n_max, RatGranularity granularity,
             std::uint64_t seed);

  std::size_t next(std::uint64_t scene_id);

  std::size_t n_min() const noexcept { return n_min_; }
  std::size_t n_max() const noexcept { return n_max_; }
  RatGranularity granularity() const noexcept { return granularity_; }

 private:
  std::size_t n_min_;
  std::size_t n_max_;
  RatGranularity granularity_;
  std::uint64_t seed_;
  Rng rng_;
};

}  // namespace vadet

#endif  // VADET__FRAME_BUFFER_HPP_
