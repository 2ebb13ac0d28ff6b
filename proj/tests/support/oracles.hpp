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

// Independent reference implementations used to check the library.
#ifndef VADET_TESTS_ORACLES_HPP_
#define VADET_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "vadet/frame_buffer.hpp"
#include "vadet/geometry.hpp"
#include "vadet/variable_aggregation.hpp"

namespace vadet::testing {

// Ground-plane corners from the yaw by hand, then a point is inside when it lies on
// the inner side of all four edge lines and within the vertical slab.
inline bool halfspace_contains(const OrientedBox& b, const Vec3& p, double eps = 0.0) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hl = b.length / 2;
  const double hw = b.width / 2;
  const std::array<std::array<double, 2>, 4> local{{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<std::array<double, 2>, 4> w{};
  for (int i = 0; i < 4; ++i) {
    w[i] = {b.center.x() + c * local[i][0] - s * local[i][1],
            b.center.y() + s * local[i][0] + c * local[i][1]};
  }
  for (int i = 0; i < 4; ++i) {
    const auto& a = w[i];
    const auto& e = w[(i + 1) % 4];
    const double ex = e[0] - a[0];
    const double ey = e[1] - a[1];
    const double len = std::hypot(ex, ey);
    // Counter-clockwise corners: inside is on the left of every edge.
    const double cross = (ex * (p.y() - a[1]) - ey * (p.x() - a[0])) / len;
    if (cross < -eps) {
      return false;
    }
  }
  return std::abs(p.z() - b.center.z()) <= b.height / 2 + eps;
}

// Volume of a ∩ b by sampling uniformly inside a.
inline double monte_carlo_iou(const OrientedBox& a, const OrientedBox& b, std::size_t samples,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double lx = u(rng) * a.length;
    const double ly = u(rng) * a.width;
    const double lz = u(rng) * a.height;
    const Vec3 p(a.center.x() + c * lx - s * ly, a.center.y() + s * lx + c * ly,
                 a.center.z() + lz);
    hits += halfspace_contains(b, p) ? 1 : 0;
  }
  const double inter = a.volume() * static_cast<double>(hits) / static_cast<double>(samples);
  return inter / (a.volume() + b.volume() - inter);
}

using PointKey = std::tuple<double, double, double, float, float, double>;

inline std::vector<PointKey> keys(const PointCloud& cloud) {
  std::vector<PointKey> out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions()[i];
    const auto& f = cloud.features()[i];
    out.emplace_back(p.x(), p.y(), p.z(), f.intensity, f.elongation, f.rel_timestamp);
  }
  return out;
}

inline std::vector<PointKey> sorted_keys(const PointCloud& cloud) {
  auto k = keys(cloud);
  std::sort(k.begin(), k.end());
  return k;
}

// Every point of every buffered frame tested against every region on its own.
inline PointCloud brute_force_object_crop(const FrameBuffer& buffer,
                                          const std::vector<AggregationRegion>& regions) {
  std::size_t depth = 0;
  for (const auto& r : regions) depth = std::max(depth, r.frame_count);
  PointCloud out;
  for (std::size_t age = 0; age < depth; ++age) {
    const LidarFrame& frame = buffer.at_age(age);
    const Pose corr = relative_pose(buffer.newest().pose, frame.pose);
    PointCloud moved = transform_points(frame.cloud, age == 0 ? Pose::identity() : corr);
    std::vector<char> keep(moved.size(), 0);
    for (const auto& r : regions) {
      if (r.frame_count <= age) continue;
      for (std::size_t idx : points_in_box(moved, r.box)) keep[idx] = 1;
    }
    moved.set_rel_timestamp(age == 0 ? 0.0 : -static_cast<double>(age) / buffer.frame_rate());
    for (std::size_t i = 0; i < moved.size(); ++i) {
      if (keep[i]) out.push_back(moved.positions()[i], moved.features()[i]);
    }
  }
  return out;
}

inline OrientedBox random_box(std::mt19937_64& rng, double spread, double min_dim = 0.5,
                              double max_dim = 5.0) {
  std::uniform_real_distribution<double> pos(-spread, spread);
  std::uniform_real_distribution<double> dim(min_dim, max_dim);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  return OrientedBox::make(Vec3(pos(rng), pos(rng), pos(rng) * 0.1), dim(rng), dim(rng),
                           dim(rng), yaw(rng));
}

inline Pose random_pose(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> pos(-spread, spread);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  return Pose::from_yaw(yaw(rng), Vec3(pos(rng), pos(rng), pos(rng) * 0.05));
}

}  // namespace vadet::testing

#endif  // VADET_TESTS_ORACLES_HPP_
