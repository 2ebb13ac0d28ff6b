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

// Randomized invariants across modules.
#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "scenes.hpp"
#include "vadet/eta_builder.hpp"
#include "vadet/evaluation.hpp"
#include "vadet/simulator.hpp"
#include "vadet/variable_aggregation.hpp"

namespace vadet {
namespace {

TEST(Property, PoseComposeIsAssociative) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const Pose a = testing::random_pose(rng, 50);
    const Pose b = testing::random_pose(rng, 50);
    const Pose c = testing::random_pose(rng, 50);
    const Pose l = compose(compose(a, b), c);
    const Pose r = compose(a, compose(b, c));
    EXPECT_LT((l.matrix() - r.matrix()).norm(), 1e-9);
    EXPECT_TRUE(l.is_valid(1e-9));
  }
}

TEST(Property, IouBoundsAndSymmetry) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 2000; ++t) {
    const OrientedBox a = testing::random_box(rng, 2.0);
    const OrientedBox b = testing::random_box(rng, 2.0);
    const double v = iou_3d(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, iou_3d(b, a), 1e-12);
    EXPECT_NEAR(iou_3d(a, a), 1.0, 1e-12);
    const double area = bev_intersection_area(a, b);
    EXPECT_LE(area, std::min(a.length * a.width, b.length * b.width) + 1e-9);
  }
}

TEST(Property, IouInvariantUnderRigidMotion) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const OrientedBox a = testing::random_box(rng, 2.0);
    const OrientedBox b = testing::random_box(rng, 2.0);
    const Pose p = testing::random_pose(rng, 100);
    EXPECT_NEAR(iou_3d(transform_box(a, p), transform_box(b, p)), iou_3d(a, b), 1e-9);
  }
}

TEST(Property, CorrectedPrecisionNeverBelowWaymo) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> small(0, 50);
  for (int t = 0; t < 20000; ++t) {
    SubsetCounts c;
    c.n_total = 1 + small(rng) * 4;
    c.n_subset = std::uniform_int_distribution<std::size_t>(0, c.n_total)(rng);
    c.tp_subset = std::uniform_int_distribution<std::size_t>(0, c.n_subset)(rng);
    c.fn_subset = c.n_subset - c.tp_subset;
    c.fp_subset = small(rng);
    c.fp_unknown = small(rng);
    const auto w = subset_precision_waymo(c);
    const auto k = subset_precision_corrected(c);
    if (w && k) {
      EXPECT_GE(*k, *w);
    }
    if (c.n_subset == c.n_total && w) {
      EXPECT_EQ(*k, *w);
    }
  }
}

TEST(Property, AddingATruePositiveNeverLowersAp) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(0, 1);
  std::bernoulli_distribution hit(0.6);
  for (int t = 0; t < 500; ++t) {
    std::vector<RankedOutcome> list;
    for (int i = 0; i < 20; ++i) {
      const bool tp = hit(rng);
      list.push_back({score(rng), tp ? 1.0 : 0.0, tp ? 0.0 : 1.0});
    }
    const double before = *average_precision(list, 25);
    list.push_back({score(rng), 1.0, 0.0});
    EXPECT_GE(*average_precision(list, 25) + 1e-12, before);
    EXPECT_LE(before, 1.0);
  }
}

TEST(Property, ObjectCropIsSubsetWithoutDuplicates) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    auto scene = testing::random_scene(rng, 8, 30, 2000);
    const auto crop = testing::sorted_keys(aggregate_objects(scene.buffer, scene.regions));
    auto all = testing::sorted_keys(fixed_aggregate(scene.buffer, 8));
    EXPECT_TRUE(std::includes(all.begin(), all.end(), crop.begin(), crop.end()));
    EXPECT_EQ(std::adjacent_find(crop.begin(), crop.end()), crop.end());
  }
}

TEST(Property, FixedAggregateTimestampsNonIncreasing) {
  std::mt19937_64 rng(7);
  auto scene = testing::random_scene(rng, 16, 0, 100);
  for (std::size_t n = 1; n <= 16; ++n) {
    const PointCloud agg = fixed_aggregate(scene.buffer, n);
    EXPECT_EQ(agg.size(), 100 * n);
    for (std::size_t i = 1; i < agg.size(); ++i) {
      ASSERT_LE(agg.features()[i].rel_timestamp, agg.features()[i - 1].rel_timestamp);
      ASSERT_LE(agg.features()[i].rel_timestamp, 0.0);
    }
  }
}

TEST(Property, PredictedRegionsContainConstantVelocityHistory) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(-12, 12);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  std::uniform_int_distribution<std::size_t> eta(1, 16);
  for (int t = 0; t < 40; ++t) {
    ScenarioSpec spec;
    spec.duration = 17;
    spec.seed = static_cast<std::uint64_t>(t);
    spec.ego.speed = v(rng);
    ScenarioObject o;
    const Vec2 vel(v(rng), v(rng));
    // Boxes heading along their motion, as tracked vehicles do.
    o.box = OrientedBox::make(Vec3(20, 5, -1), 4.5, 2.0, 1.6, std::atan2(vel.y(), vel.x()));
    o.velocity = vel;
    o.budget.points = 60;
    spec.objects.push_back(o);
    const auto sim = simulate_sequence(spec);
    FrameBuffer buf(16);
    for (std::size_t k = 0; k + 1 < sim.frames.size(); ++k) buf.push(sim.frames[k]);
    const Pose to_current = relative_pose(sim.frames.back().pose, sim.frames[15].pose);
    buf.push(sim.frames.back());
    const DetectedBox prev = transform_detection(sim.ground_truth[15][0], to_current);
    const std::size_t n = eta(rng);
    VadetConfig cfg;
    const AggregationRegion r = predict_region(prev, n, cfg);
    const PointCloud crop = aggregate_objects(buf, std::vector<AggregationRegion>{r});
    EXPECT_EQ(crop.size(), 60 * n) << t;
  }
}

TEST(Property, EtaArgmaxRecovery) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(3, 16);
  std::uniform_real_distribution<double> u(0, 0.8);
  for (int t = 0; t < 200; ++t) {
    SweepResult s(BinEdges{}, 3, 16);
    std::vector<std::vector<int>> want(8, std::vector<int>(7));
    for (std::size_t sb = 0; sb < 8; ++sb) {
      for (std::size_t db = 0; db < 7; ++db) {
        const int best = pick(rng);
        const int tie = pick(rng);
        for (int n = 3; n <= 16; ++n) s.set_ap(sb, db, n, u(rng));
        s.set_ap(sb, db, best, 0.9);
        s.set_ap(sb, db, tie, 0.9);
        want[sb][db] = std::min(best, tie);
      }
    }
    EXPECT_EQ(build_eta_table(s, VadetConfig{}).frames(), want);
  }
}

}  // namespace
}  // namespace vadet
