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
/// \brief Rigid transforms, point clouds, yaw-oriented boxes and box overlap.
#ifndef VADET__GEOMETRY_HPP_
#define VADET__GEOMETRY_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vadet {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rigid transform in SE(3). Maps points from its source frame into its target frame.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(double x, double y, double z);
  /// Rotation about +z by `yaw`, followed by `translation`.
  static Pose from_yaw(double yaw, const Vec3& translation = Vec3::Zero());
  /// Validates that the upper-left block is a proper rotation within `tolerance`.
  static Pose from_matrix(const Mat4& m, double tolerance = 1e-6);

  Mat4 matrix() const;
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  /// Heading of the rotated +x axis projected on the ground plane.
  double yaw() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }
  bool is_valid(double tolerance = 1e-9) const;
};

/// (a ∘ b)·p == a·(b·p)
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);
/// invert(target) ∘ source: re-expresses source-frame data in the target frame.
Pose relative_pose(const Pose& target, const Pose& source);

struct PointFeatures {
  float intensity = 0.0F;
  float elongation = 0.0F;
  /// Seconds relative to the newest frame of an aggregate; never positive.
  double rel_timestamp = 0.0;

  friend bool operator==(const PointFeatures&, const PointFeatures&) = default;
};

/// Structure-of-arrays point set; positions and features always have equal length.
class PointCloud {
 public:
  PointCloud() = default;

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  void reserve(std::size_t n);
  void resize(std::size_t n);
  void clear() noexcept;

  void push_back(const Vec3& position, const PointFeatures& features = {});
  void append(const PointCloud& other);

  std::span<const Vec3> positions() const noexcept { return positions_; }
  std::span<Vec3> positions() noexcept { return positions_; }
  std::span<const PointFeatures> features() const noexcept { return features_; }
  std::span<PointFeatures> features() noexcept { return features_; }

  /// Overwrites the relative-timestamp channel of every point.
  void set_rel_timestamp(double value) noexcept;

 private:
  std::vector<Vec3> positions_;
  std::vector<PointFeatures> features_;
};

PointCloud transform_points(const PointCloud& cloud, const Pose& pose);

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

/// Box with yaw-only orientation. Dimensions are full extents in meters.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double yaw = 0.0;

  /// Checked constructor: positive dimensions, yaw normalized.
  static OrientedBox make(const Vec3& center, double length, double width, double height,
                          double yaw);
  double volume() const { return length * width * height; }
  bool is_valid() const;
};

/// Precomputed membership test for one box. Boundary points are inside.
class BoxMembership {
 public:
  explicit BoxMembership(const OrientedBox& box)
      : center_(box.center),
        cos_(std::cos(box.yaw)),
        sin_(std::sin(box.yaw)),
        half_length_(0.5 * box.length),
        half_width_(0.5 * box.width),
        half_height_(0.5 * box.height) {}

  bool contains(const Vec3& p) const {
    const double dx = p.x() - center_.x();
    const double dy = p.y() - center_.y();
    const double dz = p.z() - center_.z();
    const double along = cos_ * dx + sin_ * dy;
    const double across = -sin_ * dx + cos_ * dy;
    return std::abs(along) <= half_length_ && std::abs(across) <= half_width_ &&
           std::abs(dz) <= half_height_;
  }

 private:
  Vec3 center_;
  double cos_;
  double sin_;
  double half_length_;
  double half_width_;
  double half_height_;
};

std::vector<std::size_t> points_in_box(const PointCloud& cloud, const OrientedBox& box);

/// l·w + l·h + w·h, half the surface area of an l×w×h box.
double half_surface_area(double length, double width, double height);
/// Points per square meter of half surface area.
double point_density(std::uint64_t point_count, double length, double width, double height);

/// Ground-plane footprint corners in counter-clockwise order.
std::array<Vec2, 4> bev_corners(const OrientedBox& box);
double bev_intersection_area(const OrientedBox& a, const OrientedBox& b);
double iou_3d(const OrientedBox& a, const OrientedBox& b);

enum class ObjectClass : std::uint8_t { kVehicle, kPedestrian, kCyclist, kUnknown };

std::string to_string(ObjectClass c);
/// Throws InvalidArgumentError on an unrecognized name.
ObjectClass object_class_from_string(const std::string& name);

/// A detection (or ground-truth annotation) with motion and support.
struct DetectedBox {
  OrientedBox box;
  double score = 1.0;
  /// Over-ground velocity, expressed in the axes of the box's frame.
  Vec2 velocity = Vec2::Zero();
  /// Points of the frame the box was estimated on lying inside it.
  std::uint32_t point_count = 0;
  ObjectClass class_id = ObjectClass::kVehicle;

  double speed() const { return velocity.norm(); }
};

/// Re-expresses a box (center, heading, velocity) in another frame.
OrientedBox transform_box(const OrientedBox& box, const Pose& pose);
DetectedBox transform_detection(const DetectedBox& det, const Pose& pose);

}  // namespace vadet

#endif  // VADET__GEOMETRY_HPP_
