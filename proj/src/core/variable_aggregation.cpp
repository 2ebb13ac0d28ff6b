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

#include "vadet/variable_aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vadet/error.hpp"
#include "vadet/parallel.hpp"

namespace vadet {

std::size_t bin_index(std::span<const double> edges, double value) {
  if (!(value >= 0.0)) {
    throw DomainError("bin lookup requires a non-negative value");
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
}

void validate_bin_edges(std::span<const double> edges, const char* name) {
  if (edges.empty() || edges.front() != 0.0) {
    throw DomainError(std::string(name) + " must start at 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1]) || !std::isfinite(edges[i])) {
      throw DomainError(std::string(name) + " must be strictly ascending (index " +
                        std::to_string(i) + ")");
    }
  }
}

void VadetConfig::validate() const {
  if (!(sigma >= 1.0)) {
    throw DomainError("sigma must be >= 1");
  }
  if (!(frame_rate > 0.0)) {
    throw DomainError("frame_rate must be positive");
  }
  if (n_min == 0 || n_min > n_max) {
    throw DomainError("require 1 <= n_min <= n_max");
  }
  if (background_frames == 0 || background_frames > n_max) {
    throw DomainError("require 1 <= background_frames <= n_max");
  }
}

EtaTable::EtaTable(std::vector<double> speed_edges, std::vector<double> density_edges,
                   std::vector<std::vector<int>> frames, std::size_t n_min, std::size_t n_max)
    : speed_edges_(std::move(speed_edges)),
      density_edges_(std::move(density_edges)),
      frames_(std::move(frames)),
      n_min_(n_min),
      n_max_(n_max) {
  validate_bin_edges(speed_edges_, "speed_edges");
  validate_bin_edges(density_edges_, "density_edges");
  if (n_min_ == 0 || n_min_ > n_max_) {
    throw DomainError("eta table requires 1 <= n_min <= n_max");
  }
  if (frames_.size() != speed_edges_.size()) {
    throw DomainError("eta table needs one row per speed bin");
  }
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].size() != density_edges_.size()) {
      throw DomainError("eta table row " + std::to_string(i) + " needs one entry per density bin");
    }
    for (const int f : frames_[i]) {
      if (f < static_cast<int>(n_min_) || f > static_cast<int>(n_max_)) {
        throw DomainError("eta table entry " + std::to_string(f) + " outside [n_min, n_max]");
      }
    }
  }
}

std::size_t EtaTable::lookup(double speed, double density) const {
  return static_cast<std::size_t>(
      frames_[bin_index(speed_edges_, speed)][bin_index(density_edges_, density)]);
}

AggregationRegion predict_region(const DetectedBox& previous, std::size_t eta,
                                 const VadetConfig& cfg, std::size_t source_id) {
  if (eta < 1) {
    throw DomainError("predict_region: eta must be at least 1");
  }
  const double f = cfg.frame_rate;
  const Vec3 velocity(previous.velocity.x(), previous.velocity.y(), 0.0);
  const double trail_frames = static_cast<double>(eta - 1);

  // Constant-velocity advance to the current frame, then recenter on the trail.
  const Vec3 advanced = previous.box.center + velocity / f;
  AggregationRegion region;
  region.box.center = advanced - velocity * trail_frames / (2.0 * f);
  region.box.length = cfg.sigma * previous.box.length + velocity.norm() * trail_frames / f;
  region.box.width = cfg.sigma * previous.box.width;
  region.box.height = cfg.sigma * previous.box.height;
  region.box.yaw = previous.box.yaw;
  region.frame_count = eta;
  region.source_id = source_id;
  return region;
}

namespace {

struct Aabb2 {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void extend(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  void inflate(double margin) {
    min_x -= margin;
    min_y -= margin;
    max_x += margin;
    max_y += margin;
  }
};

// Slack on conservative bounds; far larger than any rounding in the corrections.
constexpr double kBoundsSlack = 1e-6;

// Ground-plane bounds of a box after mapping its corners through `pose`.
Aabb2 mapped_bounds(const OrientedBox& box, const Pose& pose) {
  Aabb2 bounds;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  for (const double a : {-0.5, 0.5}) {
    for (const double b : {-0.5, 0.5}) {
      for (const double h : {-0.5, 0.5}) {
        const Vec3 corner(box.center.x() + c * a * box.length - s * b * box.width,
                          box.center.y() + s * a * box.length + c * b * box.width,
                          box.center.z() + h * box.height);
        const Vec3 mapped = pose.apply(corner);
        bounds.extend(mapped.x(), mapped.y());
      }
    }
  }
  bounds.inflate(kBoundsSlack);
  return bounds;
}

// Uniform ground-plane grid listing, per cell, the candidate slots (ascending) whose
// bounds touch the cell. Only a prefilter: exact membership is tested afterwards.
class CandidateGrid {
 public:
  explicit CandidateGrid(const std::vector<Aabb2>& slots) {
    for (const auto& b : slots) {
      extent_.extend(b.min_x, b.min_y);
      extent_.extend(b.max_x, b.max_y);
    }
    if (slots.empty()) {
      return;
    }
    constexpr std::size_t kMaxCellsPerAxis = 512;
    constexpr double kMinCell = 1.0;
    const double span_x = extent_.max_x - extent_.min_x;
    const double span_y = extent_.max_y - extent_.min_y;
    cell_ = std::max({kMinCell, span_x / kMaxCellsPerAxis, span_y / kMaxCellsPerAxis});
    nx_ = static_cast<std::size_t>(span_x / cell_) + 1;
    ny_ = static_cast<std::size_t>(span_y / cell_) + 1;
    cells_.resize(nx_ * ny_);
    for (std::size_t slot = 0; slot < slots.size(); ++slot) {
      const auto& b = slots[slot];
      const std::size_t x0 = clamp_x(b.min_x);
      const std::size_t x1 = clamp_x(b.max_x);
      const std::size_t y0 = clamp_y(b.min_y);
      const std::size_t y1 = clamp_y(b.max_y);
      for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) {
          cells_[y * nx_ + x].push_back(static_cast<std::uint32_t>(slot));
        }
      }
    }
  }

  /// Candidate slots for a ground-plane location, or nullptr when there are none.
  const std::vector<std::uint32_t>* candidates(double x, double y) const {
    if (!(x >= extent_.min_x && x <= extent_.max_x && y >= extent_.min_y && y <= extent_.max_y)) {
      return nullptr;
    }
    const auto& cell = cells_[clamp_y(y) * nx_ + clamp_x(x)];
    return cell.empty() ? nullptr : &cell;
  }

 private:
  std::size_t clamp_x(double x) const {
    return std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, (x - extent_.min_x) / cell_)));
  }
  std::size_t clamp_y(double y) const {
    return std::min(ny_ - 1, static_cast<std::size_t>(std::max(0.0, (y - extent_.min_y) / cell_)));
  }

  Aabb2 extent_;
  double cell_ = 1.0;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

void require_history(const FrameBuffer& buffer, std::span<const AggregationRegion> regions) {
  std::size_t deepest = 0;
  for (const auto& r : regions) {
    if (r.frame_count == 0) {
      throw DomainError("aggregation region frame_count must be at least 1");
    }
    deepest = std::max(deepest, r.frame_count);
  }
  if (deepest > buffer.size()) {
    throw InsufficientHistoryError(deepest, buffer.size());
  }
}

// Object crop of one frame age. Candidate selection runs on raw source-frame
// coordinates; membership itself is decided on the corrected point exactly as a
// standalone transform-then-crop would.
PointCloud crop_age(const FrameBuffer& buffer, std::span<const AggregationRegion> regions,
                    std::size_t age) {
  std::vector<std::size_t> alive;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (regions[r].frame_count > age) {
      alive.push_back(r);
    }
  }
  PointCloud out;
  if (alive.empty()) {
    return out;
  }

  const LidarFrame& frame = buffer.at_age(age);
  const Pose correction = buffer.correction(age);
  const Pose to_source = invert(correction);

  std::vector<Aabb2> bounds;
  std::vector<BoxMembership> members;
  bounds.reserve(alive.size());
  members.reserve(alive.size());
  for (const std::size_t r : alive) {
    bounds.push_back(mapped_bounds(regions[r].box, to_source));
    members.emplace_back(regions[r].box);
  }
  const CandidateGrid grid(bounds);

  std::vector<std::vector<std::size_t>> hits(alive.size());
  const auto positions = frame.cloud.positions();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec3& p = positions[i];
    const auto* candidates = grid.candidates(p.x(), p.y());
    if (candidates == nullptr) {
      continue;
    }
    bool corrected_ready = false;
    Vec3 corrected;
    for (const std::uint32_t slot : *candidates) {
      const Aabb2& b = bounds[slot];
      if (p.x() < b.min_x || p.x() > b.max_x || p.y() < b.min_y || p.y() > b.max_y) {
        continue;
      }
      if (!corrected_ready) {
        corrected = correction.apply(p);
        corrected_ready = true;
      }
      if (members[slot].contains(corrected)) {
        hits[slot].push_back(i);
        break;
      }
    }
  }

  std::size_t total = 0;
  for (const auto& h : hits) {
    total += h.size();
  }
  out.reserve(total);
  const auto features = frame.cloud.features();
  const double stamp = relative_timestamp(age, buffer.frame_rate());
  for (const auto& h : hits) {
    for (const std::size_t i : h) {
      PointFeatures f = features[i];
      f.rel_timestamp = stamp;
      out.push_back(correction.apply(positions[i]), f);
    }
  }
  return out;
}

}  // namespace

PointCloud aggregate_objects(const FrameBuffer& buffer, std::span<const AggregationRegion> regions,
                             unsigned threads) {
  require_history(buffer, regions);
  std::size_t deepest = 0;
  for (const auto& r : regions) {
    deepest = std::max(deepest, r.frame_count);
  }
  std::vector<PointCloud> per_age(deepest);
  parallel_for(deepest, threads,
               [&](std::size_t age) { per_age[age] = crop_age(buffer, regions, age); });

  PointCloud out;
  std::size_t total = 0;
  for (const auto& c : per_age) {
    total += c.size();
  }
  out.reserve(total);
  for (const auto& c : per_age) {
    out.append(c);
  }
  return out;
}

PointCloud aggregate_background(const FrameBuffer& buffer,
                                std::span<const AggregationRegion> regions,
                                const VadetConfig& cfg) {
  if (cfg.background_frames == 0) {
    throw DomainError("background_frames must be at least 1");
  }
  if (cfg.background_frames > buffer.size()) {
    throw InsufficientHistoryError(cfg.background_frames, buffer.size());
  }
  std::vector<Aabb2> bounds;
  std::vector<BoxMembership> members;
  for (const auto& r : regions) {
    bounds.push_back(mapped_bounds(r.box, Pose::identity()));
    members.emplace_back(r.box);
  }
  const CandidateGrid grid(bounds);

  std::vector<PointCloud> per_age(cfg.background_frames);
  parallel_for(cfg.background_frames, cfg.threads, [&](std::size_t age) {
    const LidarFrame& frame = buffer.at_age(age);
    const Pose correction = buffer.correction(age);
    const double stamp = relative_timestamp(age, buffer.frame_rate());
    const auto positions = frame.cloud.positions();
    const auto features = frame.cloud.features();
    PointCloud kept;
    kept.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const Vec3 q = correction.apply(positions[i]);
      bool inside = false;
      if (const auto* candidates = grid.candidates(q.x(), q.y())) {
        for (const std::uint32_t slot : *candidates) {
          if (members[slot].contains(q)) {
            inside = true;
            break;
          }
        }
      }
      if (!inside) {
        PointFeatures f = features[i];
        f.rel_timestamp = stamp;
        kept.push_back(q, f);
      }
    }
    per_age[age] = std::move(kept);
  });

  PointCloud out;
  std::size_t total = 0;
  for (const auto& c : per_age) {
    total += c.size();
  }
  out.reserve(total);
  for (const auto& c : per_age) {
    out.append(c);
  }
  return out;
}

std::vector<AggregationRegion> plan_regions(const FrameBuffer& buffer,
                                            std::span<const DetectedBox> previous,
                                            const EtaTable& table, const VadetConfig& cfg) {
  std::vector<AggregationRegion> regions;
  regions.reserve(previous.size());
  for (std::size_t k = 0; k < previous.size(); ++k) {
    const DetectedBox& det = previous[k];
    const double density =
        point_density(det.point_count, det.box.length, det.box.width, det.box.height);
    const std::size_t eta = std::min(table.lookup(det.speed(), density), buffer.size());
    regions.push_back(predict_region(det, eta, cfg, k));
  }
  return regions;
}

PointCloud build_vadet_input(const FrameBuffer& buffer, std::span<const DetectedBox> previous,
                             const EtaTable& table, const VadetConfig& cfg) {
  cfg.validate();
  if (buffer.empty()) {
    throw InsufficientHistoryError(1, 0);
  }
  if (cfg.background_frames > buffer.size()) {
    throw InsufficientHistoryError(cfg.background_frames, buffer.size());
  }
  const auto regions = plan_regions(buffer, previous, table, cfg);
  PointCloud out = aggregate_objects(buffer, regions, cfg.threads);
  out.append(aggregate_background(buffer, regions, cfg));
  return out;
}

}  // namespace vadet
