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

#include "vadet/frame_buffer.hpp"

#include <limits>
#include <utility>

#include "vadet/error.hpp"

namespace vadet {

FrameBuffer::FrameBuffer(std::size_t capacity, double frame_rate_hz)
    : capacity_(capacity), frame_rate_(frame_rate_hz) {
  if (capacity == 0) {
    throw DomainError("frame buffer capacity must be at least 1");
  }
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
    throw DomainError("frame rate must be positive");
  }
}

void FrameBuffer::push(LidarFrame frame) {
  if (!frames_.empty()) {
    const std::uint64_t expected = frames_.back()->frame_index + 1;
    if (frame.frame_index != expected) {
      throw SequenceGapError(expected, frame.frame_index);
    }
  }
  if (!frame.pose.is_valid(1e-6)) {
    throw DomainError("frame " + std::to_string(frame.frame_index) + " has an invalid pose");
  }
  frames_.push_back(std::make_shared<const LidarFrame>(std::move(frame)));
  if (frames_.size() > capacity_) {
    frames_.pop_front();
  }
}

const LidarFrame& FrameBuffer::at_age(std::size_t age) const {
  if (age >= frames_.size()) {
    throw InsufficientHistoryError(age + 1, frames_.size());
  }
  return *frames_[frames_.size() - 1 - age];
}

Pose FrameBuffer::correction(std::size_t age) const {
  if (age == 0) {
    return Pose::identity();
  }
  return relative_pose(newest().pose, at_age(age).pose);
}

double relative_timestamp(std::size_t age, double frame_rate_hz) {
  return age == 0 ? 0.0 : -static_cast<double>(age) / frame_rate_hz;
}

PointCloud fixed_aggregate(const FrameBuffer& buffer, std::size_t n) {
  if (n == 0) {
    throw DomainError("fixed_aggregate: frame count must be at least 1");
  }
  if (n > buffer.size()) {
    throw InsufficientHistoryError(n, buffer.size());
  }
  std::size_t total = 0;
  for (std::size_t age = 0; age < n; ++age) {
    total += buffer.at_age(age).cloud.size();
  }
  PointCloud out;
  out.resize(total);
  auto dst_pos = out.positions();
  auto dst_feat = out.features();
  std::size_t k = 0;
  for (std::size_t age = 0; age < n; ++age) {
    const LidarFrame& frame = buffer.at_age(age);
    const Pose correction = buffer.correction(age);
    const double stamp = relative_timestamp(age, buffer.frame_rate());
    const auto src_pos = frame.cloud.positions();
    const auto src_feat = frame.cloud.features();
    for (std::size_t i = 0; i < src_pos.size(); ++i, ++k) {
      dst_pos[k] = correction.apply(src_pos[i]);
      dst_feat[k] = src_feat[i];
      dst_feat[k].rel_timestamp = stamp;
    }
  }
  return out;
}

std::size_t sample_rat_count(Rng& rng, std::size_t n_min, std::size_t n_max) {
  if (n_min > n_max) {
    throw DomainError("sample_rat_count: n_min must not exceed n_max");
  }
  const std::uint64_t range = static_cast<std::uint64_t>(n_max - n_min) + 1;
  // Rejection keeps the draw unbiased and independent of the standard library.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % range);
  std::uint64_t draw = rng();
  while (draw >= limit) {
    draw = rng();
  }
  return n_min + static_cast<std::size_t>(draw % range);
}

RatSampler::RatSampler(std::size_t n_min, std::size_t n_max, RatGranularity granularity,
                       std::uint64_t seed)
    : n_min_(n_min), n_max_(n_max), granularity_(granularity), seed_(seed), rng_(seed) {
  if (n_min == 0 || n_min > n_max) {
    throw DomainError("RatSampler: require 1 <= n_min <= n_max");
  }
}

std::size_t RatSampler::next(std::uint64_t scene_id) {
  if (granularity_ == RatGranularity::kPerScene) {
    Rng scene_rng(substream_seed(seed_, {scene_id}));
    return sample_rat_count(scene_rng, n_min_, n_max_);
  }
  return sample_rat_count(rng_, n_min_, n_max_);
}

}  // namespace vadet
