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

#include "vadet/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "vadet/error.hpp"

namespace vadet::io {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

constexpr double kUnbounded = 1e300;

// ---------------------------------------------------------------------------
// Little-endian primitives

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }

  void raw(const char* s, std::size_t n) { bytes_.insert(bytes_.end(), s, s + n); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return offset_; }
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - offset_ < n) {
      throw FormatError(std::string("truncated data: incomplete ") + what, offset_);
    }
  }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get(4, what)); }
  std::uint64_t u64(const char* what) { return get(8, what); }
  float f32(const char* what) { return std::bit_cast<float>(static_cast<std::uint32_t>(get(4, what))); }
  double f64(const char* what) { return std::bit_cast<double>(get(8, what)); }
  // Caller has already checked the whole record fits.
  float f32_unchecked() { return std::bit_cast<float>(static_cast<std::uint32_t>(take(4))); }
  std::string raw(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + offset_), n);
    offset_ += n;
    return s;
  }
  bool at_end() const { return offset_ == bytes_.size(); }

 private:
  std::uint64_t get(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    return take(n);
  }
  std::uint64_t take(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[offset_ + static_cast<std::size_t>(i)]) << (8 * i);
    }
    offset_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

struct Header {
  std::uint64_t frame_index = 0;
  std::uint64_t timestamp_us = 0;
  Pose pose;
  std::uint32_t point_count = 0;
};

void write_header(ByteWriter& w, const char* magic, const Header& h) {
  w.raw(magic, 4);
  w.u32(kFormatVersion);
  w.u64(h.frame_index);
  w.u64(h.timestamp_us);
  const Mat4 m = h.pose.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      w.f64(m(r, c));
    }
  }
  w.u32(h.point_count);
}

Header read_header(ByteReader& r, const char* magic) {
  Header h;
  const std::string got = r.raw(4, "magic");
  if (got != std::string(magic, 4)) {
    throw FormatError(std::string("bad magic, expected '") + std::string(magic, 4) + "'", 0);
  }
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported version " + std::to_string(version), version_at);
  }
  h.frame_index = r.u64("frame_index");
  h.timestamp_us = r.u64("timestamp_us");
  const std::size_t pose_at = r.offset();
  Mat4 m;
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      m(row, col) = r.f64("pose");
    }
  }
  try {
    h.pose = Pose::from_matrix(m, 1e-6);
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid pose: ") + e.what(), pose_at);
  }
  h.point_count = r.u32("point_count");
  return h;
}

std::uint32_t checked_count(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgumentError("point count exceeds the 32-bit format limit");
  }
  return static_cast<std::uint32_t>(n);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("short write to '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------------------
// JSON schema reading

class Node {
 public:
  Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *value_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw SchemaError(path_.empty() ? "/" : path_, what);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_->is_object()) {
      fail("expected an object");
    }
    for (const auto& item : value_->items()) {
      bool known = false;
      for (const char* k : allowed) {
        known = known || item.key() == k;
      }
      if (!known) {
        throw SchemaError(child_path(item.key()), "unexpected key");
      }
    }
  }

  bool has(const char* key) const { return value_->contains(key); }

  Node at(const char* key) const {
    const auto it = value_->find(key);
    if (it == value_->end()) {
      throw SchemaError(child_path(key), "missing key");
    }
    return Node(*it, child_path(key));
  }

  std::vector<Node> items() const {
    if (!value_->is_array()) {
      fail("expected an array");
    }
    std::vector<Node> out;
    out.reserve(value_->size());
    for (std::size_t i = 0; i < value_->size(); ++i) {
      out.emplace_back((*value_)[i], path_ + "/" + std::to_string(i));
    }
    return out;
  }

  double number() const {
    if (!value_->is_number()) {
      fail("expected a number");
    }
    const double v = value_->get<double>();
    if (!std::isfinite(v)) {
      fail("expected a finite number");
    }
    return v;
  }

  /// A number, or kUnbounded when the value is null.
  double number_or_unbounded() const {
    return value_->is_null() ? kUnbounded : number();
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) {
      fail("expected a strictly positive number");
    }
    return v;
  }

  double non_negative() const {
    const double v = number();
    if (!(v >= 0.0)) {
      fail("expected a non-negative number");
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (value_->is_number_unsigned()) {
      return value_->get<std::uint64_t>();
    }
    if (value_->is_number_integer() && value_->get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(value_->get<std::int64_t>());
    }
    fail("expected a non-negative integer");
  }

  std::string string() const {
    if (!value_->is_string()) {
      fail("expected a string");
    }
    return value_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const auto& n : items()) {
      out.push_back(n.number());
    }
    return out;
  }

  std::vector<double> numbers(std::size_t expected) const {
    auto out = numbers();
    if (out.size() != expected) {
      fail("expected an array of " + std::to_string(expected) + " numbers");
    }
    return out;
  }

 private:
  std::string child_path(const std::string& key) const { return path_ + "/" + key; }

  const json* value_;
  std::string path_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
}

json unbounded_to_json(double v) { return v >= kUnbounded ? json(nullptr) : json(v); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// Frames and aggregated clouds

std::vector<std::uint8_t> encode_frame(const LidarFrame& frame) {
  const std::size_t n = frame.cloud.size();
  ByteWriter w(kHeaderBytes + 20 * n);
  write_header(w, "VAGF", {frame.frame_index, frame.timestamp_us, frame.pose, checked_count(n)});
  const auto pos = frame.cloud.positions();
  const auto feat = frame.cloud.features();
  for (std::size_t i = 0; i < n; ++i) {
    w.f32(static_cast<float>(pos[i].x()));
    w.f32(static_cast<float>(pos[i].y()));
    w.f32(static_cast<float>(pos[i].z()));
    w.f32(feat[i].intensity);
    w.f32(feat[i].elongation);
  }
  return w.take();
}

LidarFrame decode_frame(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const Header h = read_header(r, "VAGF");
  LidarFrame frame;
  frame.frame_index = h.frame_index;
  frame.timestamp_us = h.timestamp_us;
  frame.pose = h.pose;
  frame.cloud.resize(h.point_count);
  auto pos = frame.cloud.positions();
  auto feat = frame.cloud.features();
  for (std::size_t i = 0; i < h.point_count; ++i) {
    r.need(20, "point record");
    const float x = r.f32_unchecked();
    const float y = r.f32_unchecked();
    const float z = r.f32_unchecked();
    pos[i] = Vec3(x, y, z);
    feat[i].intensity = r.f32_unchecked();
    feat[i].elongation = r.f32_unchecked();
  }
  if (!r.at_end()) {
    throw FormatError("trailing bytes after the last point record", r.offset());
  }
  return frame;
}

void write_frame(const LidarFrame& frame, const std::filesystem::path& path) {
  write_bytes(encode_frame(frame), path);
}

LidarFrame read_frame(const std::filesystem::path& path) { return decode_frame(read_bytes(path)); }

std::vector<std::uint8_t> encode_aggregated(const AggregatedCloud& cloud) {
  const std::size_t n = cloud.cloud.size();
  ByteWriter w(kHeaderBytes + 24 * n);
  write_header(w, "VAGC", {cloud.frame_index, cloud.timestamp_us, cloud.pose, checked_count(n)});
  const auto pos = cloud.cloud.positions();
  const auto feat = cloud.cloud.features();
  for (std::size_t i = 0; i < n; ++i) {
    w.f32(static_cast<float>(pos[i].x()));
    w.f32(static_cast<float>(pos[i].y()));
    w.f32(static_cast<float>(pos[i].z()));
    w.f32(feat[i].intensity);
    w.f32(feat[i].elongation);
    w.f32(static_cast<float>(feat[i].rel_timestamp));
  }
  return w.take();
}

AggregatedCloud decode_aggregated(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const Header h = read_header(r, "VAGC");
  AggregatedCloud out;
  out.frame_index = h.frame_index;
  out.timestamp_us = h.timestamp_us;
  out.pose = h.pose;
  out.cloud.resize(h.point_count);
  auto pos = out.cloud.positions();
  auto feat = out.cloud.features();
  for (std::size_t i = 0; i < h.point_count; ++i) {
    r.need(24, "point record");
    const float x = r.f32_unchecked();
    const float y = r.f32_unchecked();
    const float z = r.f32_unchecked();
    pos[i] = Vec3(x, y, z);
    feat[i].intensity = r.f32_unchecked();
    feat[i].elongation = r.f32_unchecked();
    feat[i].rel_timestamp = r.f32_unchecked();
  }
  if (!r.at_end()) {
    throw FormatError("trailing bytes after the last point record", r.offset());
  }
  return out;
}

void write_aggregated(const AggregatedCloud& cloud, const std::filesystem::path& path) {
  write_bytes(encode_aggregated(cloud), path);
}

AggregatedCloud read_aggregated(const std::filesystem::path& path) {
  return decode_aggregated(read_bytes(path));
}

// ---------------------------------------------------------------------------
// Text helpers

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw IoError("short write to '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------------------
// Manifest

void write_manifest(const SequenceManifest& manifest, const std::filesystem::path& dir) {
  json j;
  j["sequence_id"] = manifest.sequence_id;
  j["frame_rate_hz"] = manifest.frame_rate_hz;
  j["frame_files"] = manifest.frame_files;
  write_text(dump(j), dir / kManifestName);
}

SequenceManifest read_manifest(const std::filesystem::path& dir) {
  const json j = parse_json(read_text(dir / kManifestName));
  const Node root(j, "");
  root.expect_object({"sequence_id", "frame_rate_hz", "frame_files"});
  SequenceManifest m;
  m.sequence_id = root.at("sequence_id").string();
  m.frame_rate_hz = root.at("frame_rate_hz").positive();
  for (const auto& f : root.at("frame_files").items()) {
    m.frame_files.push_back(f.string());
  }
  if (m.frame_files.empty()) {
    root.at("frame_files").fail("expected at least one frame file");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Detections

const std::vector<DetectedBox>* DetectionSet::find(std::uint64_t frame_index) const {
  for (const auto& f : frames) {
    if (f.frame_index == frame_index) {
      return &f.boxes;
    }
  }
  return nullptr;
}

namespace {

json box_to_json(const DetectedBox& d) {
  return json{{"cx", d.box.center.x()}, {"cy", d.box.center.y()}, {"cz", d.box.center.z()},
              {"l", d.box.length},      {"w", d.box.width},       {"h", d.box.height},
              {"yaw", d.box.yaw},       {"score", d.score},       {"vx", d.velocity.x()},
              {"vy", d.velocity.y()},   {"n_points", d.point_count},
              {"class", to_string(d.class_id)}};
}

DetectedBox box_from_json(const Node& n) {
  n.expect_object({"cx", "cy", "cz", "l", "w", "h", "yaw", "score", "vx", "vy", "n_points", "class"});
  DetectedBox d;
  d.box.center = Vec3(n.at("cx").number(), n.at("cy").number(), n.at("cz").number());
  d.box.length = n.at("l").positive();
  d.box.width = n.at("w").positive();
  d.box.height = n.at("h").positive();
  d.box.yaw = normalize_angle(n.at("yaw").number());
  const Node score = n.at("score");
  d.score = score.number();
  if (!(d.score >= 0.0 && d.score <= 1.0)) {
    score.fail("score must lie in [0, 1]");
  }
  d.velocity = Vec2(n.at("vx").number(), n.at("vy").number());
  const Node count = n.at("n_points");
  const std::uint64_t points = count.unsigned_integer();
  if (points > std::numeric_limits<std::uint32_t>::max()) {
    count.fail("n_points out of range");
  }
  d.point_count = static_cast<std::uint32_t>(points);
  const Node cls = n.at("class");
  try {
    d.class_id = object_class_from_string(cls.string());
  } catch (const InvalidArgumentError& e) {
    cls.fail(e.what());
  }
  return d;
}

}  // namespace

std::string dump_detections(const DetectionSet& set) {
  json frames = json::array();
  for (const auto& f : set.frames) {
    json boxes = json::array();
    for (const auto& b : f.boxes) {
      boxes.push_back(box_to_json(b));
    }
    frames.push_back(json{{"frame_index", f.frame_index}, {"boxes", boxes}});
  }
  return dump(json{{"sequence_id", set.sequence_id}, {"frames", frames}});
}

DetectionSet parse_detections(const std::string& text) {
  const json j = parse_json(text);
  const Node root(j, "");
  root.expect_object({"sequence_id", "frames"});
  DetectionSet set;
  set.sequence_id = root.at("sequence_id").string();
  for (const auto& f : root.at("frames").items()) {
    f.expect_object({"frame_index", "boxes"});
    FrameDetections fd;
    fd.frame_index = f.at("frame_index").unsigned_integer();
    for (const auto& b : f.at("boxes").items()) {
      fd.boxes.push_back(box_from_json(b));
    }
    set.frames.push_back(std::move(fd));
  }
  return set;
}

void write_detections(const DetectionSet& set, const std::filesystem::path& path) {
  write_text(dump_detections(set), path);
}

DetectionSet read_detections(const std::filesystem::path& path) {
  return parse_detections(read_text(path));
}

// ---------------------------------------------------------------------------
// Eta table and bin edges

std::string dump_eta_table(const EtaTable& table) {
  return dump(json{{"speed_edges", table.speed_edges()},
                   {"density_edges", table.density_edges()},
                   {"frames", table.frames()},
                   {"n_min", table.n_min()},
                   {"n_max", table.n_max()}});
}

EtaTable parse_eta_table(const std::string& text) {
  const json j = parse_json(text);
  const Node root(j, "");
  root.expect_object({"speed_edges", "density_edges", "frames", "n_min", "n_max"});
  std::vector<std::vector<int>> frames;
  for (const auto& row : root.at("frames").items()) {
    std::vector<int> r;
    for (const auto& cell : row.items()) {
      const std::uint64_t v = cell.unsigned_integer();
      if (v > 1024) {
        cell.fail("frame count out of range");
      }
      r.push_back(static_cast<int>(v));
    }
    frames.push_back(std::move(r));
  }
  try {
    return EtaTable(root.at("speed_edges").numbers(), root.at("density_edges").numbers(),
                    std::move(frames), root.at("n_min").unsigned_integer(),
                    root.at("n_max").unsigned_integer());
  } catch (const DomainError& e) {
    throw SchemaError("/", e.what());
  }
}

void write_eta_table(const EtaTable& table, const std::filesystem::path& path) {
  write_text(dump_eta_table(table), path);
}

EtaTable read_eta_table(const std::filesystem::path& path) {
  return parse_eta_table(read_text(path));
}

namespace {

constexpr const char* kTypoKey = "paper_typo_override";
constexpr const char* kTypoNote =
    "speed_edges[5] is 8.16; the value 81.6 found in circulation breaks the ascending order";

json edges_to_json(const BinEdges& edges) {
  json j{{"speed_edges", edges.speed_edges}, {"density_edges", edges.density_edges}};
  if (edges.speed_edges.size() > 5 && edges.speed_edges[5] == 8.16) {
    j[kTypoKey] = kTypoNote;
  }
  return j;
}

BinEdges edges_from_json(const Node& n) {
  n.expect_object({"speed_edges", "density_edges", kTypoKey});
  if (n.has(kTypoKey)) {
    (void)n.at(kTypoKey).string();
  }
  BinEdges edges;
  edges.speed_edges = n.at("speed_edges").numbers();
  edges.density_edges = n.at("density_edges").numbers();
  try {
    edges.validate();
  } catch (const DomainError& e) {
    n.fail(e.what());
  }
  return edges;
}

}  // namespace

std::string dump_bin_edges(const BinEdges& edges) { return dump(edges_to_json(edges)); }

BinEdges parse_bin_edges(const std::string& text) {
  const json j = parse_json(text);
  return edges_from_json(Node(j, ""));
}

BinEdges read_bin_edges(const std::filesystem::path& path) {
  return parse_bin_edges(read_text(path));
}

// ---------------------------------------------------------------------------
// Scenario

std::string dump_scenario(const ScenarioSpec& spec) {
  json objects = json::array();
  for (const auto& o : spec.objects) {
    json budget{{"model", o.budget.model == BudgetModel::kConstant ? "constant" : "inverse_square"},
                {"points", o.budget.points}};
    if (o.budget.model == BudgetModel::kInverseSquare) {
      budget["reference_range"] = o.budget.reference_range;
    }
    objects.push_back(json{
        {"center", {o.box.center.x(), o.box.center.y(), o.box.center.z()}},
        {"size", {o.box.length, o.box.width, o.box.height}},
        {"yaw", o.box.yaw},
        {"velocity", {o.velocity.x(), o.velocity.y()}},
        {"class", to_string(o.class_id)},
        {"budget", budget}});
  }
  return dump(json{
      {"sequence_id", spec.sequence_id},
      {"duration", spec.duration},
      {"frame_rate", spec.frame_rate},
      {"noise_sigma", spec.noise_sigma},
      {"seed", spec.seed},
      {"ego",
       {{"motion", spec.ego.motion == EgoMotion::kStraight ? "straight" : "arc"},
        {"speed", spec.ego.speed},
        {"yaw_rate", spec.ego.yaw_rate}}},
      {"background",
       {{"points", spec.background_points},
        {"range", spec.background_range},
        {"ground_z", spec.ground_z}}},
      {"objects", objects}});
}

ScenarioSpec parse_scenario(const std::string& text) {
  const json j = parse_json(text);
  const Node root(j, "");
  root.expect_object(
      {"sequence_id", "duration", "frame_rate", "noise_sigma", "seed", "ego", "background", "objects"});
  ScenarioSpec spec;
  if (root.has("sequence_id")) spec.sequence_id = root.at("sequence_id").string();
  spec.duration = root.at("duration").unsigned_integer();
  if (spec.duration == 0) root.at("duration").fail("duration must be at least 1");
  spec.frame_rate = root.at("frame_rate").positive();
  if (root.has("noise_sigma")) spec.noise_sigma = root.at("noise_sigma").non_negative();
  if (root.has("seed")) spec.seed = root.at("seed").unsigned_integer();
  if (root.has("ego")) {
    const Node ego = root.at("ego");
    ego.expect_object({"motion", "speed", "yaw_rate"});
    if (ego.has("motion")) {
      const Node motion = ego.at("motion");
      const std::string m = motion.string();
      if (m == "straight") {
        spec.ego.motion = EgoMotion::kStraight;
      } else if (m == "arc") {
        spec.ego.motion = EgoMotion::kArc;
      } else {
        motion.fail("motion must be 'straight' or 'arc'");
      }
    }
    if (ego.has("speed")) spec.ego.speed = ego.at("speed").number();
    if (ego.has("yaw_rate")) spec.ego.yaw_rate = ego.at("yaw_rate").number();
  }
  if (root.has("background")) {
    const Node bg = root.at("background");
    bg.expect_object({"points", "range", "ground_z"});
    if (bg.has("points")) spec.background_points = bg.at("points").unsigned_integer();
    if (bg.has("range")) spec.background_range = bg.at("range").positive();
    if (bg.has("ground_z")) spec.ground_z = bg.at("ground_z").number();
  }
  if (root.has("objects")) {
    for (const auto& o : root.at("objects").items()) {
      o.expect_object({"center", "size", "yaw", "velocity", "class", "budget"});
      ScenarioObject obj;
      const auto c = o.at("center").numbers(3);
      const auto s = o.at("size").numbers(3);
      const Node size = o.at("size");
      for (std::size_t i = 0; i < 3; ++i) {
        if (!(s[i] > 0.0)) {
          throw SchemaError(size.path() + "/" + std::to_string(i), "dimensions must be positive");
        }
      }
      obj.box = OrientedBox::make(Vec3(c[0], c[1], c[2]), s[0], s[1], s[2],
                                  o.has("yaw") ? o.at("yaw").number() : 0.0);
      if (o.has("velocity")) {
        const auto v = o.at("velocity").numbers(2);
        obj.velocity = Vec2(v[0], v[1]);
      }
      if (o.has("class")) {
        const Node cls = o.at("class");
        try {
          obj.class_id = object_class_from_string(cls.string());
        } catch (const InvalidArgumentError& e) {
          cls.fail(e.what());
        }
      }
      const Node b = o.at("budget");
      b.expect_object({"model", "points", "reference_range"});
      const Node model = b.at("model");
      const std::string m = model.string();
      if (m == "constant") {
        obj.budget.model = BudgetModel::kConstant;
      } else if (m == "inverse_square") {
        obj.budget.model = BudgetModel::kInverseSquare;
      } else {
        model.fail("model must be 'constant' or 'inverse_square'");
      }
      obj.budget.points = b.at("points").non_negative();
      if (b.has("reference_range")) obj.budget.reference_range = b.at("reference_range").positive();
      spec.objects.push_back(obj);
    }
  }
  return spec;
}

ScenarioSpec read_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text(path));
}

// ---------------------------------------------------------------------------
// Noise model

namespace {

json curve_to_json(const PiecewiseLinear& c) {
  json j = json::array();
  for (const auto& [x, y] : c.knots) {
    j.push_back({x, y});
  }
  return j;
}

PiecewiseLinear curve_from_json(const Node& n) {
  PiecewiseLinear c;
  for (const auto& knot : n.items()) {
    const auto xy = knot.numbers(2);
    c.knots.emplace_back(xy[0], xy[1]);
  }
  try {
    c.validate(n.path().c_str());
  } catch (const DomainError& e) {
    n.fail(e.what());
  }
  return c;
}

}  // namespace

std::string dump_noise_model(const NoiseModel& noise) {
  json responses = json::array();
  for (const auto& r : noise.frame_response) {
    responses.push_back(json{
        {"speed", {r.speed_min, unbounded_to_json(r.speed_max)}},
        {"density", {r.density_min, unbounded_to_json(r.density_max)}},
        {"best_frames", r.best_frames},
        {"falloff", r.falloff}});
  }
  return dump(json{{"center_sigma", noise.center_sigma},
                   {"dimension_sigma", noise.dimension_sigma},
                   {"yaw_sigma", noise.yaw_sigma},
                   {"velocity_sigma", noise.velocity_sigma},
                   {"score_sigma", noise.score_sigma},
                   {"detection_curve", curve_to_json(noise.detection_curve)},
                   {"score_curve", curve_to_json(noise.score_curve)},
                   {"false_positives_per_frame", noise.false_positives_per_frame},
                   {"false_positive_range", noise.false_positive_range},
                   {"false_positive_score", noise.false_positive_score},
                   {"smudge_gain", noise.smudge_gain},
                   {"frame_response", responses}});
}

NoiseModel parse_noise_model(const std::string& text) {
  const json j = parse_json(text);
  const Node root(j, "");
  root.expect_object({"center_sigma", "dimension_sigma", "yaw_sigma", "velocity_sigma",
                      "score_sigma", "detection_curve", "score_curve",
                      "false_positives_per_frame", "false_positive_range",
                      "false_positive_score", "smudge_gain", "frame_response"});
  NoiseModel n;
  const auto opt = [&](const char* key, double& field) {
    if (root.has(key)) field = root.at(key).non_negative();
  };
  opt("center_sigma", n.center_sigma);
  opt("dimension_sigma", n.dimension_sigma);
  opt("yaw_sigma", n.yaw_sigma);
  opt("velocity_sigma", n.velocity_sigma);
  opt("score_sigma", n.score_sigma);
  opt("false_positives_per_frame", n.false_positives_per_frame);
  opt("smudge_gain", n.smudge_gain);
  if (root.has("false_positive_range")) n.false_positive_range = root.at("false_positive_range").positive();
  if (root.has("false_positive_score")) {
    const Node s = root.at("false_positive_score");
    n.false_positive_score = s.non_negative();
    if (n.false_positive_score > 1.0) s.fail("must lie in [0, 1]");
  }
  if (root.has("detection_curve")) n.detection_curve = curve_from_json(root.at("detection_curve"));
  if (root.has("score_curve")) n.score_curve = curve_from_json(root.at("score_curve"));
  if (root.has("frame_response")) {
    for (const auto& r : root.at("frame_response").items()) {
      r.expect_object({"speed", "density", "best_frames", "falloff"});
      FrameResponse fr;
      const auto range = [&](const char* key, double& lo, double& hi) {
        const Node node = r.at(key);
        const auto items = node.items();
        if (items.size() != 2) node.fail("expected [min, max]");
        lo = items[0].non_negative();
        hi = items[1].number_or_unbounded();
        if (!(hi > lo)) node.fail("max must exceed min");
      };
      range("speed", fr.speed_min, fr.speed_max);
      range("density", fr.density_min, fr.density_max);
      fr.best_frames = r.at("best_frames").unsigned_integer();
      if (fr.best_frames == 0) r.at("best_frames").fail("must be at least 1");
      fr.falloff = r.at("falloff").non_negative();
      n.frame_response.push_back(fr);
    }
  }
  return n;
}

NoiseModel read_noise_model(const std::filesystem::path& path) {
  return parse_noise_model(read_text(path));
}

// ---------------------------------------------------------------------------
// Sweep results

std::string dump_sweep(const SweepResult& sweep) {
  const BinEdges& e = sweep.edges();
  json ap = json::array();
  json counts = json::array();
  for (std::size_t sb = 0; sb < e.speed_bins(); ++sb) {
    json ap_row = json::array();
    json count_row = json::array();
    for (std::size_t db = 0; db < e.density_bins(); ++db) {
      json cell = json::array();
      for (std::size_t n = sweep.n_min(); n <= sweep.n_max(); ++n) {
        const auto v = sweep.ap(sb, db, n);
        cell.push_back(v ? json(*v) : json(nullptr));
      }
      ap_row.push_back(cell);
      count_row.push_back(sweep.sample_count(sb, db));
    }
    ap.push_back(ap_row);
    counts.push_back(count_row);
  }
  return dump(json{{"edges", edges_to_json(e)},
                   {"n_min", sweep.n_min()},
                   {"n_max", sweep.n_max()},
                   {"sample_counts", counts},
                   {"ap", ap}});
}

SweepResult parse_sweep(const std::string& text) {
  const json j = parse_json(text);
  const Node root(j, "");
  root.expect_object({"edges", "n_min", "n_max", "sample_counts", "ap"});
  const BinEdges edges = edges_from_json(root.at("edges"));
  const std::uint64_t n_min = root.at("n_min").unsigned_integer();
  const std::uint64_t n_max = root.at("n_max").unsigned_integer();
  if (n_min == 0 || n_min > n_max || n_max > 1024) {
    root.fail("sweep requires 1 <= n_min <= n_max");
  }
  SweepResult sweep(edges, n_min, n_max);
  const auto counts = root.at("sample_counts").items();
  const auto ap = root.at("ap").items();
  if (counts.size() != edges.speed_bins()) root.at("sample_counts").fail("one row per speed bin");
  if (ap.size() != edges.speed_bins()) root.at("ap").fail("one row per speed bin");
  for (std::size_t sb = 0; sb < edges.speed_bins(); ++sb) {
    const auto count_row = counts[sb].items();
    const auto ap_row = ap[sb].items();
    if (count_row.size() != edges.density_bins()) counts[sb].fail("one entry per density bin");
    if (ap_row.size() != edges.density_bins()) ap[sb].fail("one entry per density bin");
    for (std::size_t db = 0; db < edges.density_bins(); ++db) {
      sweep.set_sample_count(sb, db, count_row[db].unsigned_integer());
      const auto cell = ap_row[db].items();
      if (cell.size() != n_max - n_min + 1) ap_row[db].fail("one entry per frame count");
      for (std::size_t k = 0; k < cell.size(); ++k) {
        if (cell[k].raw().is_null()) {
          continue;
        }
        const double v = cell[k].number();
        if (!(v >= 0.0 && v <= 1.0)) cell[k].fail("AP must lie in [0, 1]");
        sweep.set_ap(sb, db, n_min + k, v);
      }
    }
  }
  return sweep;
}

void write_sweep(const SweepResult& sweep, const std::filesystem::path& path) {
  write_text(dump_sweep(sweep), path);
}

SweepResult read_sweep(const std::filesystem::path& path) { return parse_sweep(read_text(path)); }

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt(const std::optional<double>& v) {
  if (!v) {
    return "NA";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", *v);
  return buf;
}

}  // namespace

std::string format_report_csv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "breakdown,category,frame_config,n_subset,n_total,tp,fp_subset,fp_unknown,fn,"
         "precision_waymo,precision_corrected,recall,ap_waymo,ap_corrected\n";
  for (const auto& row : rows) {
    const auto& c = row.result.counts;
    const bool summary = row.category == "weighted_average";
    out << row.breakdown << ',' << row.category << ',' << row.frame_config << ',' << c.n_subset
        << ',' << c.n_total << ',';
    if (summary) {
      out << "NA,NA,NA,NA,";
    } else {
      out << c.tp_subset << ',' << c.fp_subset << ',' << c.fp_unknown << ',' << c.fn_subset << ',';
    }
    out << fmt(row.result.precision_waymo) << ',' << fmt(row.result.precision_corrected) << ','
        << fmt(row.result.recall) << ',' << fmt(row.result.ap_waymo) << ','
        << fmt(row.result.ap_corrected) << '\n';
  }
  return out.str();
}

std::string format_sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "speed_bin,density_bin,speed_min,density_min,frames,samples,ap\n";
  const BinEdges& e = sweep.edges();
  for (std::size_t sb = 0; sb < e.speed_bins(); ++sb) {
    for (std::size_t db = 0; db < e.density_bins(); ++db) {
      for (std::size_t n = sweep.n_min(); n <= sweep.n_max(); ++n) {
        out << sb << ',' << db << ',' << fmt(e.speed_edges[sb]) << ',' << fmt(e.density_edges[db])
            << ',' << n << ',' << sweep.sample_count(sb, db) << ',' << fmt(sweep.ap(sb, db, n))
            << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace vadet::io
