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

#include <random>

#include "oracles.hpp"
#include "scenes.hpp"
#include "vadet/error.hpp"
#include "vadet/variable_aggregation.hpp"

namespace vadet {
namespace {

EtaTable constant_table(int frames, std::size_t n_min = 1, std::size_t n_max = 16) {
  const std::vector<double> speed{0.0, 0.2, 5.0};
  const std::vector<double> density{0.0, 1.0, 10.0};
  return EtaTable(speed, density, std::vector<std::vector<int>>(3, std::vector<int>(3, frames)),
                  n_min, n_max);
}

TEST(EtaTable, Lookup) {
  std::vector<std::vector<int>> f(3, std::vector<int>(3, 3));
  f[0][1] = 16;
  f[2][2] = 9;
  const EtaTable t({0.0, 0.2, 5.0}, {0.0, 1.0, 10.0}, f, 3, 16);
  EXPECT_EQ(t.lookup(0.1, 1.0), 16U);
  EXPECT_EQ(t.lookup(0.2, 0.5), 3U);   // edge goes to the upper bin
  EXPECT_EQ(t.lookup(25.0, 200.0), 9U);  // top bins unbounded
  EXPECT_THROW(t.lookup(-0.1, 1.0), DomainError);
  EXPECT_THROW(t.lookup(1.0, -1.0), DomainError);
}

TEST(EtaTable, Validation) {
  EXPECT_THROW(EtaTable({0.0, 1.0}, {0.0}, {{3, 3}, {3}}, 3, 16), DomainError);  // row width
  EXPECT_THROW(EtaTable({0.0, 1.0}, {0.0}, {{3}}, 3, 16), DomainError);        // row count
  EXPECT_THROW(EtaTable({0.0, 1.0}, {0.0}, {{3}, {17}}, 3, 16), DomainError);  // range
  EXPECT_THROW(EtaTable({1.0, 0.5}, {0.0}, {{3}, {3}}, 3, 16), DomainError);   // order
  EXPECT_THROW(EtaTable({0.0}, {0.0}, {{3}}, 5, 4), DomainError);
}

TEST(PredictRegion, WorkedExample) {
  DetectedBox d;
  d.box = OrientedBox::make(Vec3(0, 0, 1), 4, 2, 1.5, 0);
  d.velocity = Vec2(10, 0);
  VadetConfig cfg;
  cfg.frame_rate = 10;
  const AggregationRegion r = predict_region(d, 5, cfg);
  EXPECT_NEAR((r.box.center - Vec3(-1, 0, 1)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.box.length, 8.4, 1e-12);
  EXPECT_NEAR(r.box.width, 2.2, 1e-12);
  EXPECT_NEAR(r.box.height, 1.65, 1e-12);
  EXPECT_EQ(r.box.yaw, 0.0);
  EXPECT_EQ(r.frame_count, 5U);
}

TEST(PredictRegion, VelocityTermsVanish) {
  DetectedBox d;
  d.box = OrientedBox::make(Vec3(3, 4, 0), 4, 2, 1.5, 0.7);
  VadetConfig cfg;
  const AggregationRegion still = predict_region(d, 16, cfg);
  EXPECT_EQ(still.box.center, d.box.center);
  EXPECT_NEAR(still.box.length, 1.1 * 4, 1e-12);
  EXPECT_EQ(still.box.yaw, 0.7);

  d.velocity = Vec2(5, 0);
  const AggregationRegion one = predict_region(d, 1, cfg);
  EXPECT_NEAR((one.box.center - Vec3(3.5, 4, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(one.box.length, 1.1 * 4, 1e-12);
  EXPECT_THROW(predict_region(d, 0, cfg), DomainError);
}

TEST(PredictRegion, HeadingIndependentOfVelocityDirection) {
  // Length grows with |v|; heading comes from the box alone.
  DetectedBox d;
  d.box = OrientedBox::make(Vec3::Zero(), 4, 2, 1.5, 0.3);
  d.velocity = Vec2(0, -3);
  VadetConfig cfg;
  const AggregationRegion r = predict_region(d, 4, cfg);
  EXPECT_NEAR(r.box.length, 1.1 * 4 + 3 * 3 / 10.0, 1e-12);
  EXPECT_EQ(r.box.yaw, 0.3);
  EXPECT_NEAR((r.box.center - Vec3(0, -0.3 + 0.45, 0)).norm(), 0.0, 1e-12);
}

TEST(AggregateObjects, EmptyRegionsGiveEmptyCloud) {
  std::mt19937_64 rng(1);
  auto scene = testing::random_scene(rng, 5, 0, 200);
  EXPECT_TRUE(aggregate_objects(scene.buffer, {}).empty());
}

TEST(AggregateObjects, MatchesBruteForceOracle) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 25; ++t) {
    std::uniform_int_distribution<std::size_t> nf(3, 16);
    std::uniform_int_distribution<std::size_t> nr(1, 50);
    auto scene = testing::random_scene(rng, nf(rng), nr(rng), 4000);
    const PointCloud got = aggregate_objects(scene.buffer, scene.regions, 2);
    const PointCloud want = testing::brute_force_object_crop(scene.buffer, scene.regions);
    ASSERT_EQ(got.size(), want.size()) << t;
    EXPECT_EQ(testing::sorted_keys(got), testing::sorted_keys(want)) << t;
  }
}

TEST(AggregateObjects, ThreadCountDoesNotChangeOutput) {
  std::mt19937_64 rng(8);
  auto scene = testing::random_scene(rng, 10, 20, 3000);
  const auto one = testing::keys(aggregate_objects(scene.buffer, scene.regions, 1));
  const auto four = testing::keys(aggregate_objects(scene.buffer, scene.regions, 4));
  EXPECT_EQ(one, four);
}

TEST(AggregateObjects, OrderAndDeduplication) {
  FrameBuffer buf(4, 10.0);
  for (std::uint64_t k = 0; k < 2; ++k) {
    LidarFrame f;
    f.frame_index = k;
    f.cloud.push_back(Vec3(5, 0, 0), {1.0F, 0.0F, 0.0});   // only region 1
    f.cloud.push_back(Vec3(0, 0, 0), {2.0F, 0.0F, 0.0});   // regions 0 and 1
    f.cloud.push_back(Vec3(-5, 0, 0), {3.0F, 0.0F, 0.0});  // only region 0
    f.cloud.push_back(Vec3(50, 0, 0), {4.0F, 0.0F, 0.0});  // neither
    buf.push(std::move(f));
  }
  const std::vector<AggregationRegion> regions{
      {OrientedBox::make(Vec3(-3, 0, 0), 8, 2, 2, 0), 2, 0},
      {OrientedBox::make(Vec3(3, 0, 0), 8, 2, 2, 0), 1, 1}};
  const PointCloud out = aggregate_objects(buf, regions);
  // Age 0: region 0 first (points 1, 2), then region 1 (point 0). Age 1: region 0 only.
  std::vector<float> order;
  for (const auto& f : out.features()) order.push_back(f.intensity);
  EXPECT_EQ(order, (std::vector<float>{2, 3, 1, 2, 3}));
  EXPECT_EQ(out.features()[0].rel_timestamp, 0.0);
  EXPECT_EQ(out.features()[4].rel_timestamp, -0.1);
}

TEST(AggregateObjects, InsufficientHistory) {
  std::mt19937_64 rng(2);
  auto scene = testing::random_scene(rng, 4, 1, 10);
  scene.regions[0].frame_count = 5;
  try {
    aggregate_objects(scene.buffer, scene.regions);
    FAIL();
  } catch (const InsufficientHistoryError& e) {
    EXPECT_EQ(e.shortfall(), 1U);
  }
}

TEST(AggregateBackground, NoRegionsEqualsFixedThree) {
  std::mt19937_64 rng(3);
  auto scene = testing::random_scene(rng, 6, 0, 500);
  VadetConfig cfg;
  EXPECT_EQ(testing::keys(aggregate_background(scene.buffer, {}, cfg)),
            testing::keys(fixed_aggregate(scene.buffer, 3)));
}

TEST(AggregateBackground, CoveringRegionEmptiesBackground) {
  std::mt19937_64 rng(4);
  auto scene = testing::random_scene(rng, 4, 0, 500, 10.0);
  const std::vector<AggregationRegion> all{{OrientedBox::make(Vec3::Zero(), 500, 500, 50, 0), 1, 0}};
  VadetConfig cfg;
  EXPECT_TRUE(aggregate_background(scene.buffer, all, cfg).empty());
}

TEST(AggregateBackground, PartitionAccounting) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    auto scene = testing::random_scene(rng, 12, 15, 3000);
    for (auto& r : scene.regions) r.frame_count = std::max<std::size_t>(r.frame_count, 3);
    VadetConfig cfg;
    const PointCloud bg = aggregate_background(scene.buffer, scene.regions, cfg);
    const PointCloud obj = aggregate_objects(scene.buffer, scene.regions);
    std::size_t recent_obj = 0;
    std::size_t older_obj = 0;
    for (const auto& f : obj.features()) {
      (f.rel_timestamp > -0.25 ? recent_obj : older_obj) += 1;
    }
    EXPECT_EQ(bg.size() + recent_obj, fixed_aggregate(scene.buffer, 3).size());
    EXPECT_EQ(bg.size() + obj.size(), fixed_aggregate(scene.buffer, 3).size() + older_obj);
    for (const auto& p : bg.positions()) {
      for (const auto& r : scene.regions) ASSERT_FALSE(BoxMembership(r.box).contains(p));
    }
  }
}

TEST(BuildInput, NoDetectionsEqualsFixedThree) {
  std::mt19937_64 rng(5);
  auto scene = testing::random_scene(rng, 16, 0, 1000);
  VadetConfig cfg;
  EXPECT_EQ(testing::keys(build_vadet_input(scene.buffer, {}, constant_table(16), cfg)),
            testing::keys(fixed_aggregate(scene.buffer, 3)));
}

TEST(BuildInput, EtaClampedToHistory) {
  std::mt19937_64 rng(6);
  auto scene = testing::random_scene(rng, 4, 0, 100);
  DetectedBox d;
  d.box = OrientedBox::make(Vec3::Zero(), 6, 6, 4, 0);
  d.point_count = 5;
  VadetConfig cfg;
  const auto regions = plan_regions(scene.buffer, std::vector<DetectedBox>{d}, constant_table(16), cfg);
  ASSERT_EQ(regions.size(), 1U);
  EXPECT_EQ(regions[0].frame_count, 4U);
  EXPECT_NO_THROW(build_vadet_input(scene.buffer, std::vector<DetectedBox>{d}, constant_table(16), cfg));
}

TEST(BuildInput, NeedsBackgroundHistory) {
  std::mt19937_64 rng(7);
  auto scene = testing::random_scene(rng, 2, 0, 10);
  VadetConfig cfg;
  EXPECT_THROW(build_vadet_input(scene.buffer, {}, constant_table(3), cfg), InsufficientHistoryError);
  FrameBuffer empty;
  EXPECT_THROW(build_vadet_input(empty, {}, constant_table(3), cfg), InsufficientHistoryError);
}

TEST(Config, Validation) {
  VadetConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.sigma = 0.9;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = VadetConfig{};
  cfg.background_frames = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = VadetConfig{};
  cfg.frame_rate = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

}  // namespace
}  // namespace vadet
