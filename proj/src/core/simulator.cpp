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

#include "vadet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "vadet/error.hpp"
#include "vadet/parallel.hpp"

namespace vadet {

std::size_t PointBudget::count_at(double range) const {
  if (!(range > 0.0)) {
    throw DomainError("point budget requires a positive range");
  }
  switch (model) {
    case BudgetModel::kConstant:
      return static_cast<std::size_t>(std::llround(points));
    case BudgetModel::kInverseSquare: {
      const double ratio = reference_range / range;
      return static_cast<std::size_t>(std::llround(points * ratio * ratio));
    }
  }
  return 0;
}

Pose EgoTrajectory::pose_at(double t) const {
  if (motion == EgoMotion::kArc && std::abs(yaw_rate) > 1e-12) {
    const double yaw = yaw_rate * t;
    const double radius = speed / yaw_rate;
    return Pose::from_yaw(yaw, Vec3(radius * std::sin(yaw), radius * (1.0 - std::cos(yaw)), 0.0));
  }
  return Pose::from_translation(speed * t, 0.0, 0.0);
}

void ScenarioSpec::validate() const {
  if (duration < 1) {
    throw DomainError("scenario duration must be at least one frame");
  }
  if (!(frame_rate > 0.0)) {
    throw DomainError("scenario frame_rate must be positive");
  }
  if (!(noise_sigma >= 0.0)) {
    throw DomainError("scenario noise_sigma must be non-negative");
  }
  if (!(background_range > 0.0)) {
    throw DomainError("scenario background_range must be positive");
  }
  for (const auto& o : objects) {
    if (!o.box.is_valid()) {
      throw DomainError("scenario object box is invalid");
    }
    if (!(o.budget.points >= 0.0) || !(o.budget.reference_range > 0.0)) {
      throw DomainError("scenario object budget is invalid");
    }
  }
}

PointCloud sample_object_surface(const OrientedBox& box, const Vec3& sensor_origin,
                                 const PointBudget& budget, double noise_sigma, Rng& rng) {
  const std::size_t count = budget.count_at((box.center - sensor_origin).norm());
  const double l = box.length;
  const double w = box.width;
  const double h = box.height;
  // front, back, left, right, top
  const double areas[5] = {w * h, w * h, l * h, l * h, l * w};
  const double total = areas[0] + areas[1] + areas[2] + areas[3] + areas[4];
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);

  PointCloud cloud;
  cloud.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double pick = uniform01(rng) * total;
    int face = 0;
    while (face < 4 && pick >= areas[face]) {
      pick -= areas[face];
      ++face;
    }
    const double a = uniform01(rng) - 0.5;
    const double b = uniform01(rng) - 0.5;
    Vec3 local;
    switch (face) {
      case 0: local = Vec3(0.5 * l, a * w, b * h); break;
      case 1: local = Vec3(-0.5 * l, a * w, b * h); break;
      case 2: local = Vec3(a * l, 0.5 * w, b * h); break;
      case 3: local = Vec3(a * l, -0.5 * w, b * h); break;
      default: local = Vec3(a * l, b * w, 0.5 * h); break;
    }
    Vec3 p(box.center.x() + c * local.x() - s * local.y(),
           box.center.y() + s * local.x() + c * local.y(), box.center.z() + local.z());
    const double z = standard_normal(rng);
    if (noise_sigma > 0.0) {
      const Vec3 ray = p - sensor_origin;
      const double range = ray.norm();
      if (range > 0.0) {
        p += (noise_sigma * z / range) * ray;
      }
    }
    PointFeatures f;
    f.intensity = static_cast<float>(uniform01(rng));
    f.elongation = static_cast<float>(0.1 * uniform01(rng));
    cloud.push_back(p, f);
  }
  return cloud;
}

namespace {

constexpr std::uint64_t kClutterStream = 1ULL << 40U;
constexpr std::uint64_t kFalsePositiveStream = 1ULL << 41U;
// Boundary tolerance when counting a ground truth's supporting points.
constexpr double kSupportTolerance = 1e-6;

OrientedBox grown(const OrientedBox& box, double margin) {
  OrientedBox out = box;
  out.length += 2.0 * margin;
  out.width += 2.0 * margin;
  out.height += 2.0 * margin;
  return out;
}

OrientedBox scaled(const OrientedBox& box, double factor) {
  OrientedBox out = box;
  out.length *= factor;
  out.width *= factor;
  out.height *= factor;
  return out;
}

}  // namespace

SimulatedSequence simulate_sequence(const ScenarioSpec& spec, unsigned threads) {
  spec.validate();
  SimulatedSequence seq;
  seq.sequence_id = spec.sequence_id;
  seq.frame_rate = spec.frame_rate;
  seq.frames.resize(spec.duration);
  seq.ground_truth.resize(spec.duration);
  seq.point_labels.resize(spec.duration);

  parallel_for(spec.duration, threads, [&](std::size_t k) {
    const double t = static_cast<double>(k) / spec.frame_rate;
    const Pose ego = spec.ego.pose_at(t);
    const Pose world_to_ego = invert(ego);

    LidarFrame& frame = seq.frames[k];
    frame.frame_index = k;
    frame.timestamp_us = static_cast<std::uint64_t>(std::llround(t * 1e6));
    frame.pose = ego;
    auto& labels = seq.point_labels[k];
    auto& gts = seq.ground_truth[k];

    for (std::size_t o = 0; o < spec.objects.size(); ++o) {
      const ScenarioObject& obj = spec.objects[o];
      OrientedBox world_box = obj.box;
      world_box.center += Vec3(obj.velocity.x() * t, obj.velocity.y() * t, 0.0);
      Rng rng(substream_seed(spec.seed, {k, o}));
      const PointCloud sampled =
          sample_object_surface(world_box, ego.translation, obj.budget, spec.noise_sigma, rng);
      frame.cloud.append(transform_points(sampled, world_to_ego));
      labels.insert(labels.end(), sampled.size(), static_cast<std::int32_t>(o));

      DetectedBox gt;
      gt.box = transform_box(world_box, world_to_ego);
      const Vec3 v = world_to_ego.rotation * Vec3(obj.velocity.x(), obj.velocity.y(), 0.0);
      gt.velocity = Vec2(v.x(), v.y());
      gt.score = 1.0;
      gt.class_id = obj.class_id;
      gts.push_back(gt);
    }

    if (spec.background_points > 0) {
      Rng rng(substream_seed(spec.seed, {k, kClutterStream}));
      std::vector<BoxMembership> keep_out;
      for (const auto& gt : gts) {
        keep_out.emplace_back(grown(gt.box, 0.5));
      }
      const double r = spec.background_range;
      for (std::size_t j = 0; j < spec.background_points; ++j) {
        Vec3 p;
        for (int attempt = 0; attempt < 1000; ++attempt) {
          p = Vec3((2.0 * uniform01(rng) - 1.0) * r, (2.0 * uniform01(rng) - 1.0) * r,
                   spec.ground_z);
          const bool blocked = std::any_of(keep_out.begin(), keep_out.end(),
                                           [&](const BoxMembership& m) { return m.contains(p); });
          if (!blocked) {
            break;
          }
        }
        PointFeatures f;
        f.intensity = static_cast<float>(uniform01(rng));
        f.elongation = static_cast<float>(0.1 * uniform01(rng));
        frame.cloud.push_back(p, f);
        labels.push_back(-1);
      }
    }

    for (auto& gt : gts) {
      const BoxMembership support(grown(gt.box, kSupportTolerance));
      std::uint32_t n = 0;
      for (const auto& p : frame.cloud.positions()) {
        n += support.contains(p) ? 1U : 0U;
      }
      gt.point_count = n;
    }
  });
  return seq;
}

double PiecewiseLinear::operator()(double x) const {
  if (knots.empty()) {
    return 0.0;
  }
  if (x <= knots.front().first) {
    return knots.front().second;
  }
  if (x >= knots.back().first) {
    return knots.back().second;
  }
  const auto it = std::upper_bound(knots.begin(), knots.end(), x,
                                   [](double v, const auto& k) { return v < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (x - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

void PiecewiseLinear::validate(const char* name) const {
  if (knots.empty()) {
    throw DomainError(std::string(name) + " needs at least one knot");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].second >= 0.0 && knots[i].second <= 1.0)) {
      throw DomainError(std::string(name) + " values must lie in [0, 1]");
    }
    if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
      throw DomainError(std::string(name) + " knots must have ascending x");
    }
  }
}

bool FrameResponse::applies(double speed, double density) const {
  return speed >= speed_min && speed < speed_max && density >= density_min &&
         density < density_max;
}

double FrameResponse::quality(std::size_t frames) const {
  const double distance =
      std::abs(static_cast<double>(frames) - static_cast<double>(best_frames));
  return std::max(0.0, 1.0 - falloff * distance);
}

void NoiseModel::validate() const {
  for (const double s : {center_sigma, dimension_sigma, yaw_sigma, velocity_sigma, score_sigma,
                         false_positives_per_frame, smudge_gain}) {
    if (!(s >= 0.0)) {
      throw DomainError("noise model sigmas, rates and gains must be non-negative");
    }
  }
  if (!(false_positive_range > 0.0) ||
      !(false_positive_score >= 0.0 && false_positive_score <= 1.0)) {
    throw DomainError("noise model false-positive settings are invalid");
  }
  detection_curve.validate("detection_curve");
  score_curve.validate("score_curve");
  for (const auto& r : frame_response) {
    if (r.best_frames < 1 || !(r.falloff >= 0.0)) {
      throw DomainError("frame_response entries need best_frames >= 1 and falloff >= 0");
    }
  }
}

namespace {

struct Support {
  double count = 0.0;
  double density = 0.0;
  std::size_t frames = 1;
};

// Draws a fixed number of variates regardless of the outcome so substreams stay aligned.
std::optional<DetectedBox> detect_one(const DetectedBox& gt, const Support& support,
                                      double quality, double frame_rate, const NoiseModel& noise,
                                      Rng& rng) {
  const double u = uniform01(rng);
  const double dx = standard_normal(rng);
  const double dy = standard_normal(rng);
  const double dl = standard_normal(rng);
  const double dw = standard_normal(rng);
  const double dh = standard_normal(rng);
  const double dyaw = standard_normal(rng);
  const double dvx = standard_normal(rng);
  const double dvy = standard_normal(rng);
  const double dscore = standard_normal(rng);

  const double p = noise.detection_curve(support.count) * quality;
  if (!(u < p)) {
    return std::nullopt;
  }
  DetectedBox det = gt;
  det.box.center.x() += noise.center_sigma * dx;
  det.box.center.y() += noise.center_sigma * dy;
  det.box.length = std::max(0.05 * gt.box.length, gt.box.length + noise.dimension_sigma * dl);
  det.box.width = std::max(0.05 * gt.box.width, gt.box.width + noise.dimension_sigma * dw);
  det.box.height = std::max(0.05 * gt.box.height, gt.box.height + noise.dimension_sigma * dh);
  det.box.yaw = normalize_angle(gt.box.yaw + noise.yaw_sigma * dyaw);
  det.velocity += Vec2(noise.velocity_sigma * dvx, noise.velocity_sigma * dvy);

  const double speed = gt.speed();
  if (noise.smudge_gain > 0.0 && support.frames > 1 && speed > 0.0) {
    const double trail = speed * static_cast<double>(support.frames - 1) / frame_rate;
    const double stretch = noise.smudge_gain * trail;
    const Vec2 back = -gt.velocity / speed;
    det.box.length += stretch;
    det.box.center.x() += 0.5 * stretch * back.x();
    det.box.center.y() += 0.5 * stretch * back.y();
  }
  det.score = std::clamp(noise.score_curve(support.density) + noise.score_sigma * dscore, 0.0, 1.0);
  return det;
}

void append_false_positives(std::vector<DetectedBox>& out, const NoiseModel& noise, Rng& rng) {
  if (noise.false_positives_per_frame <= 0.0) {
    return;
  }
  // Knuth's Poisson sampler; rates here are small.
  const double limit = std::exp(-noise.false_positives_per_frame);
  std::size_t count = 0;
  for (double prod = uniform01(rng); prod > limit; prod *= uniform01(rng)) {
    ++count;
  }
  const double r = noise.false_positive_range;
  for (std::size_t i = 0; i < count; ++i) {
    DetectedBox fp;
    fp.box.center = Vec3((2.0 * uniform01(rng) - 1.0) * r, (2.0 * uniform01(rng) - 1.0) * r, 0.0);
    fp.box.length = 4.0 + uniform01(rng);
    fp.box.width = 1.8 + 0.4 * uniform01(rng);
    fp.box.height = 1.5 + 0.3 * uniform01(rng);
    fp.box.yaw = normalize_angle((2.0 * uniform01(rng) - 1.0) * 3.141592653589793);
    fp.score = noise.false_positive_score * uniform01(rng);
    fp.point_count = 0;
    out.push_back(fp);
  }
}

double gt_density(const DetectedBox& gt) {
  return point_density(gt.point_count, gt.box.length, gt.box.width, gt.box.height);
}

}  // namespace

std::vector<DetectedBox> mock_detect(std::span<const DetectedBox> ground_truth,
                                     const NoiseModel& noise, Rng& rng) {
  noise.validate();
  const std::uint64_t base = rng();
  std::vector<DetectedBox> out;
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    const DetectedBox& gt = ground_truth[g];
    Rng gt_rng(substream_seed(base, {g}));
    const Support support{static_cast<double>(gt.point_count), gt_density(gt), 1};
    if (auto det = detect_one(gt, support, 1.0, 10.0, noise, gt_rng)) {
      out.push_back(*det);
    }
  }
  Rng fp_rng(substream_seed(base, {kFalsePositiveStream}));
  append_false_positives(out, noise, fp_rng);
  return out;
}

std::vector<DetectedBox> mock_detect_aggregated(std::span<const DetectedBox> ground_truth,
                                                const PointCloud& input, double frame_rate,
                                                const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  double oldest = 0.0;
  for (const auto& f : input.features()) {
    oldest = std::min(oldest, f.rel_timestamp);
  }
  const double window = std::round(-oldest * frame_rate);  // frames before the newest

  std::vector<DetectedBox> out;
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    const DetectedBox& gt = ground_truth[g];
    const double speed = gt.speed();

    const BoxMembership body(scaled(gt.box, 1.1));
    OrientedBox trail_box = scaled(gt.box, 1.1);
    if (speed > 0.0) {
      const Vec3 v(gt.velocity.x(), gt.velocity.y(), 0.0);
      trail_box.center -= v * window / (2.0 * frame_rate);
      trail_box.length += speed * window / frame_rate;
    }
    const BoxMembership trail(trail_box);

    std::size_t count = 0;
    std::vector<double> stamps;
    const auto positions = input.positions();
    const auto features = input.features();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (body.contains(positions[i])) {
        ++count;
      }
      if (trail.contains(positions[i])) {
        stamps.push_back(features[i].rel_timestamp);
      }
    }
    std::sort(stamps.begin(), stamps.end());
    const auto distinct =
        static_cast<std::size_t>(std::unique(stamps.begin(), stamps.end()) - stamps.begin());

    Support support;
    support.count = static_cast<double>(count);
    support.density =
        static_cast<double>(count) / half_surface_area(gt.box.length, gt.box.width, gt.box.height);
    support.frames = std::max<std::size_t>(1, distinct);

    double quality = 1.0;
    const double single_density = gt_density(gt);
    for (const auto& r : noise.frame_response) {
      if (r.applies(speed, single_density)) {
        quality *= r.quality(support.frames);
      }
    }
    Rng gt_rng(substream_seed(seed, {g}));
    if (auto det = detect_one(gt, support, quality, frame_rate, noise, gt_rng)) {
      out.push_back(*det);
    }
  }
  Rng fp_rng(substream_seed(seed, {kFalsePositiveStream}));
  append_false_positives(out, noise, fp_rng);
  return out;
}

}  // namespace vadet
