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

#include "vadet/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "vadet/error.hpp"

namespace vadet {

Pose Pose::from_translation(double x, double y, double z) {
  Pose p;
  p.translation = Vec3(x, y, z);
  return p;
}

Pose Pose::from_yaw(double yaw, const Vec3& translation) {
  Pose p;
  p.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  p.translation = translation;
  return p;
}

Pose Pose::from_matrix(const Mat4& m, double tolerance) {
  Pose p;
  p.rotation = m.topLeftCorner<3, 3>();
  p.translation = m.topRightCorner<3, 1>();
  if (!m.allFinite()) {
    throw DomainError("pose matrix contains non-finite values");
  }
  if (!p.is_valid(tolerance)) {
    throw DomainError("pose rotation block is not orthonormal with determinant +1");
  }
  return p;
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

bool Pose::is_valid(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    return false;
  }
  const double orthogonality = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orthogonality <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Pose invert(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.transpose();
  out.translation = -(out.rotation * p.translation);
  return out;
}

Pose relative_pose(const Pose& target, const Pose& source) {
  return compose(invert(target), source);
}

void PointCloud::reserve(std::size_t n) {
  positions_.reserve(n);
  features_.reserve(n);
}

void PointCloud::resize(std::size_t n) {
  positions_.resize(n, Vec3::Zero());
  features_.resize(n);
}

void PointCloud::clear() noexcept {
  positions_.clear();
  features_.clear();
}

void PointCloud::push_back(const Vec3& position, const PointFeatures& features) {
  positions_.push_back(position);
  features_.push_back(features);
}

void PointCloud::append(const PointCloud& other) {
  positions_.insert(positions_.end(), other.positions_.begin(), other.positions_.end());
  features_.insert(features_.end(), other.features_.begin(), other.features_.end());
}

void PointCloud::set_rel_timestamp(double value) noexcept {
  for (auto& f : features_) {
    f.rel_timestamp = value;
  }
}

PointCloud transform_points(const PointCloud& cloud, const Pose& pose) {
  PointCloud out;
  out.resize(cloud.size());
  const auto src = cloud.positions();
  auto dst = out.positions();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = pose.apply(src[i]);
  }
  std::copy(cloud.features().begin(), cloud.features().end(), out.features().begin());
  return out;
}

double normalize_angle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, kTwoPi);
  if (a <= -std::numbers::pi) {
    a += kTwoPi;
  } else if (a > std::numbers::pi) {
    a -= kTwoPi;
  }
  return a;
}

OrientedBox OrientedBox::make(const Vec3& center, double length, double width, double height,
                              double yaw) {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw DomainError("box dimensions must be strictly positive");
  }
  if (!center.allFinite() || !std::isfinite(yaw)) {
    throw DomainError("box center and yaw must be finite");
  }
  return OrientedBox{center, length, width, height, normalize_angle(yaw)};
}

bool OrientedBox::is_valid() const {
  return length > 0.0 && width > 0.0 && height > 0.0 && center.allFinite() &&
         yaw > -std::numbers::pi && yaw <= std::numbers::pi;
}

std::vector<std::size_t> points_in_box(const PointCloud& cloud, const OrientedBox& box) {
  const BoxMembership membership(box);
  std::vector<std::size_t> inside;
  const auto positions = cloud.positions();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (membership.contains(positions[i])) {
      inside.push_back(i);
    }
  }
  return inside;
}

double half_surface_area(double length, double width, double height) {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw DomainError("half_surface_area: dimensions must be strictly positive");
  }
  return length * width + length * height + width * height;
}

double point_density(std::uint64_t point_count, double length, double width, double height) {
  return static_cast<double>(point_count) / half_surface_area(length, width, height);
}

std::array<Vec2, 4> bev_corners(const OrientedBox& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Vec2 center(box.center.x(), box.center.y());
  const Vec2 along = Vec2(c, s) * (0.5 * box.length);
  const Vec2 across = Vec2(-s, c) * (0.5 * box.width);
  return {center - along - across, center + along - across, center + along + across,
          center - along + across};
}

namespace {

constexpr double kAreaEpsilon = 1e-12;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

// Sutherland-Hodgman: clip `subject` against the left half-plane of every edge of the
// counter-clockwise convex polygon `clip`.
std::vector<Vec2> clip_convex(std::vector<Vec2> subject, const std::array<Vec2, 4>& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2 edge = clip[(e + 1) % clip.size()] - a;
    std::vector<Vec2> kept;
    kept.reserve(subject.size() + 2);
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Vec2& p = subject[i];
      const Vec2& q = subject[(i + 1) % subject.size()];
      const double sp = cross(edge, p - a);
      const double sq = cross(edge, q - a);
      if (sp >= 0.0) {
        kept.push_back(p);
      }
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        kept.push_back(p + t * (q - p));
      }
    }
    subject = std::move(kept);
  }
  return subject;
}

}  // namespace

double bev_intersection_area(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  const double area = polygon_area(clip_convex({ca.begin(), ca.end()}, cb));
  return area < kAreaEpsilon ? 0.0 : area;
}

double iou_3d(const OrientedBox& a, const OrientedBox& b) {
  const double bottom = std::max(a.center.z() - 0.5 * a.height, b.center.z() - 0.5 * b.height);
  const double top = std::min(a.center.z() + 0.5 * a.height, b.center.z() + 0.5 * b.height);
  const double vertical = std::max(0.0, top - bottom);
  if (vertical <= 0.0) {
    return 0.0;
  }
  const double intersection = bev_intersection_area(a, b) * vertical;
  if (intersection <= 0.0) {
    return 0.0;
  }
  const double uni = a.volume() + b.volume() - intersection;
  return std::clamp(intersection / uni, 0.0, 1.0);
}

std::string to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::kVehicle:
      return "vehicle";
    case ObjectClass::kPedestrian:
      return "pedestrian";
    case ObjectClass::kCyclist:
      return "cyclist";
    case ObjectClass::kUnknown:
      break;
  }
  return "unknown";
}

ObjectClass object_class_from_string(const std::string& name) {
  if (name == "vehicle") return ObjectClass::kVehicle;
  if (name == "pedestrian") return ObjectClass::kPedestrian;
  if (name == "cyclist") return ObjectClass::kCyclist;
  if (name == "unknown") return ObjectClass::kUnknown;
  throw InvalidArgumentError("unknown object class '" + name + "'");
}

OrientedBox transform_box(const OrientedBox& box, const Pose& pose) {
  OrientedBox out = box;
  out.center = pose.apply(box.center);
  out.yaw = normalize_angle(box.yaw + pose.yaw());
  return out;
}

DetectedBox transform_detection(const DetectedBox& det, const Pose& pose) {
  DetectedBox out = det;
  out.box = transform_box(det.box, pose);
  const Vec3 v = pose.rotation * Vec3(det.velocity.x(), det.velocity.y(), 0.0);
  out.velocity = Vec2(v.x(), v.y());
  return out;
}

}  // namespace vadet
