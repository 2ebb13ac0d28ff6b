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
/// \brief Synthetic LiDAR sequences and a noise-model mock detector.
///
/// The simulator samples points on box surfaces (no occlusion, no beam pattern) for
/// objects moving at constant velocity past an ego vehicle with an exactly known pose.
/// Sensor noise is Gaussian along the ray from the sensor to each point.
#ifndef VADET__SIMULATOR_HPP_
#define VADET__SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vadet/frame_buffer.hpp"
#include "vadet/geometry.hpp"
#include "vadet/random.hpp"

namespace vadet {

enum class BudgetModel { kConstant, kInverseSquare };

/// Points emitted per object per frame.
struct PointBudget {
  BudgetModel model = BudgetModel::kConstant;
  /// Constant count, or the count at `reference_range` for the inverse-square model.
  double points = 100.0;
  double reference_range = 10.0;

  std::size_t count_at(double range) const;
};

struct ScenarioObject {
  OrientedBox box;  // pose at frame 0, world frame
  Vec2 velocity = Vec2::Zero();
  PointBudget budget;
  ObjectClass class_id = ObjectClass::kVehicle;
};

enum class EgoMotion { kStraight, kArc };

struct EgoTrajectory {
  EgoMotion motion = EgoMotion::kStraight;
  double speed = 0.0;     // m/s along the ego heading
  double yaw_rate = 0.0;  // rad/s, arcs only

  /// Ego-to-world pose at time t seconds; the ego starts at the world origin.
  Pose pose_at(double t) const;
};

struct ScenarioSpec {
  std::string sequence_id = "sim";
  std::size_t duration = 1;  // frames
  double frame_rate = 10.0;
  EgoTrajectory ego;
  std::vector<ScenarioObject> objects;
  double noise_sigma = 0.0;  // meters, along the sensor ray
  std::uint64_t seed = 0;
  /// Uniform ground-plane clutter per frame, kept clear of every object.
  std::size_t background_points = 0;
  double background_range = 50.0;
  double ground_z = -2.0;

  void validate() const;
};

/// Points on the five faces of `box` other than the bottom, area weighted. The count
/// comes from `budget` at the sensor-to-center range; noise is applied along each ray.
PointCloud sample_object_surface(const OrientedBox& box, const Vec3& sensor_origin,
                                 const PointBudget& budget, double noise_sigma, Rng& rng);

struct SimulatedSequence {
  std::string sequence_id;
  double frame_rate = 10.0;
  std::vector<LidarFrame> frames;
  /// Per frame, in ego coordinates; velocities over ground in ego axes, point_count
  /// from that frame's cloud.
  std::vector<std::vector<DetectedBox>> ground_truth;
  /// Per frame and point: index of the emitting object, or -1 for clutter.
  std::vector<std::vector<std::int32_t>> point_labels;
};

/// Deterministic for a given spec; each frame draws from its own substream.
SimulatedSequence simulate_sequence(const ScenarioSpec& spec, unsigned threads = 1);

/// Clamped piecewise-linear curve through (x, y) knots sorted by x.
struct PiecewiseLinear {
  std::vector<std::pair<double, double>> knots;

  double operator()(double x) const;
  void validate(const char* name) const;
};

/// Planted dependence of detection quality on the aggregation depth for objects whose
/// ground-truth speed and single-frame density fall in the given half-open ranges.
struct FrameResponse {
  double speed_min = 0.0;
  double speed_max = 1e300;
  double density_min = 0.0;
  double density_max = 1e300;
  std::size_t best_frames = 1;
  double falloff = 0.0;  // quality lost per frame of distance from best_frames

  bool applies(double speed, double density) const;
  double quality(std::size_t frames) const;
};

struct NoiseModel {
  double center_sigma = 0.0;  // m, horizontal
  double dimension_sigma = 0.0;
  double yaw_sigma = 0.0;
  double velocity_sigma = 0.0;
  double score_sigma = 0.0;
  /// Point count -> probability that the object is detected.
  PiecewiseLinear detection_curve{{{0.0, 1.0}}};
  /// Density (pts/m^2) -> confidence score.
  PiecewiseLinear score_curve{{{0.0, 1.0}}};
  double false_positives_per_frame = 0.0;
  double false_positive_range = 50.0;
  double false_positive_score = 0.3;  // upper bound of spurious scores
  /// Length error per meter of motion trail in an aggregated input.
  double smudge_gain = 0.0;
  std::vector<FrameResponse> frame_response;

  void validate() const;
};

/// Single-frame mock detection: every ground truth is kept with probability
/// detection_curve(point_count), perturbed and scored by score_curve(density).
std::vector<DetectedBox> mock_detect(std::span<const DetectedBox> ground_truth,
                                     const NoiseModel& noise, Rng& rng);

/// Mock detection on an aggregated cloud. Support and density are measured from the
/// cloud inside each ground-truth box; the aggregation depth an object received is
/// read off the distinct timestamps along its motion trail, which drives the smudge
/// penalty and any planted frame response. Object g draws from substream (seed, g),
/// so outcomes are coupled across aggregation depths.
std::vector<DetectedBox> mock_detect_aggregated(std::span<const DetectedBox> ground_truth,
                                                const PointCloud& input, double frame_rate,
                                                const NoiseModel& noise, std::uint64_t seed);

}  // namespace vadet

#endif  // VADET__SIMULATOR_HPP_
