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

#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "vadet/error.hpp"
#include "vadet/frame_buffer.hpp"

namespace vadet {
namespace {

LidarFrame make_frame(std::uint64_t index, std::size_t points, const Pose& pose = Pose::identity()) {
  LidarFrame f;
  f.frame_index = index;
  f.timestamp_us = index * 100000;
  f.pose = pose;
  for (std::size_t i = 0; i < points; ++i) {
    f.cloud.push_back(Vec3(static_cast<double>(i), 1.0, 0.0),
                      {static_cast<float>(index), 0.5F, 0.0});
  }
  return f;
}

TEST(FrameBuffer, PushAndEvict) {
  FrameBuffer buf(16);
  buf.push(make_frame(0, 1));
  EXPECT_EQ(buf.size(), 1U);
  for (std::uint64_t i = 1; i <= 16; ++i) buf.push(make_frame(i, 1));
  EXPECT_EQ(buf.size(), 16U);
  EXPECT_EQ(buf.newest().frame_index, 16U);
  EXPECT_EQ(buf.at_age(15).frame_index, 1U);
  EXPECT_THROW(buf.at_age(16), InsufficientHistoryError);
}

TEST(FrameBuffer, GapIsRejected) {
  FrameBuffer buf;
  buf.push(make_frame(3, 1));
  try {
    buf.push(make_frame(5, 1));
    FAIL() << "expected a sequence gap";
  } catch (const SequenceGapError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSequenceGap);
  }
  EXPECT_EQ(buf.size(), 1U);
  EXPECT_THROW(buf.push(make_frame(3, 1)), SequenceGapError);
  EXPECT_NO_THROW(buf.push(make_frame(4, 1)));
}

TEST(FrameBuffer, RejectsInvalidConstruction) {
  EXPECT_THROW(FrameBuffer(0), DomainError);
  EXPECT_THROW(FrameBuffer(4, 0.0), DomainError);
}

TEST(FixedAggregate, CountsAndTimestamps) {
  FrameBuffer buf(16, 10.0);
  buf.push(make_frame(0, 100));
  buf.push(make_frame(1, 150));
  const PointCloud agg = fixed_aggregate(buf, 2);
  ASSERT_EQ(agg.size(), 250U);
  std::size_t newest = 0;
  std::size_t older = 0;
  for (const auto& f : agg.features()) {
    if (f.rel_timestamp == 0.0) {
      EXPECT_FALSE(std::signbit(f.rel_timestamp));
      ++newest;
    } else if (f.rel_timestamp == -0.1) {
      ++older;
    }
  }
  EXPECT_EQ(newest, 150U);
  EXPECT_EQ(older, 100U);
  // Newest first, order within a frame kept.
  EXPECT_EQ(agg.features()[0].intensity, 1.0F);
  EXPECT_EQ(agg.positions()[149].x(), 149.0);
  EXPECT_EQ(agg.features()[150].intensity, 0.0F);
}

TEST(FixedAggregate, SingleFrameUnchanged) {
  FrameBuffer buf;
  buf.push(make_frame(0, 10, Pose::from_yaw(0.4, Vec3(3, 2, 1))));
  const PointCloud agg = fixed_aggregate(buf, 1);
  const PointCloud& src = buf.newest().cloud;
  ASSERT_EQ(agg.size(), src.size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    EXPECT_EQ(agg.positions()[i], src.positions()[i]);
    EXPECT_EQ(agg.features()[i].rel_timestamp, 0.0);
  }
}

TEST(FixedAggregate, EgoMotionCorrection) {
  FrameBuffer buf;
  LidarFrame old;
  old.frame_index = 0;
  old.cloud.push_back(Vec3::Zero());
  buf.push(old);
  LidarFrame now;
  now.frame_index = 1;
  now.pose = Pose::from_translation(1, 0, 0);
  buf.push(now);
  const PointCloud agg = fixed_aggregate(buf, 2);
  ASSERT_EQ(agg.size(), 1U);
  EXPECT_LT((agg.positions()[0] - Vec3(-1, 0, 0)).norm(), 1e-15);
}

TEST(FixedAggregate, Errors) {
  FrameBuffer buf;
  buf.push(make_frame(0, 3));
  EXPECT_THROW(fixed_aggregate(buf, 0), DomainError);
  try {
    fixed_aggregate(buf, 4);
    FAIL();
  } catch (const InsufficientHistoryError& e) {
    EXPECT_EQ(e.shortfall(), 3U);
  }
}

TEST(FixedAggregate, RelativeTimestampHelper) {
  EXPECT_EQ(relative_timestamp(0, 10), 0.0);
  EXPECT_FALSE(std::signbit(relative_timestamp(0, 10)));
  EXPECT_DOUBLE_EQ(relative_timestamp(3, 10), -0.3);
  EXPECT_DOUBLE_EQ(relative_timestamp(1, 20), -0.05);
}

TEST(Rat, DegenerateRange) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_rat_count(rng, 3, 3), 3U);
  EXPECT_THROW(sample_rat_count(rng, 5, 4), DomainError);
}

TEST(Rat, UniformFrequencies) {
  Rng rng(2024);
  std::array<std::size_t, 17> hist{};
  const std::size_t draws = 130000;
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t n = sample_rat_count(rng, 3, 16);
    ASSERT_GE(n, 3U);
    ASSERT_LE(n, 16U);
    ++hist[n];
  }
  for (std::size_t n = 3; n <= 16; ++n) {
    EXPECT_NEAR(static_cast<double>(hist[n]) / draws, 1.0 / 14.0, 0.02) << n;
  }
}

TEST(Rat, DeterministicPerSeed) {
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_rat_count(a, 3, 16), sample_rat_count(b, 3, 16));
}

TEST(Rat, SamplerGranularity) {
  RatSampler per_scene(3, 16, RatGranularity::kPerScene, 7);
  const std::size_t first = per_scene.next(42);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(per_scene.next(42), first);

  RatSampler per_iter(3, 16, RatGranularity::kPerIteration, 7);
  std::array<bool, 17> seen{};
  for (int i = 0; i < 500; ++i) seen[per_iter.next(42)] = true;
  int distinct = 0;
  for (bool s : seen) distinct += s ? 1 : 0;
  EXPECT_EQ(distinct, 14);

  RatSampler again(3, 16, RatGranularity::kPerIteration, 7);
  RatSampler twin(3, 16, RatGranularity::kPerIteration, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(again.next(i), twin.next(i));
}

}  // namespace
}  // namespace vadet
