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
/// \brief On-disk formats.
///
/// Point data is binary and little-endian. A frame file ("VAGF") is a 156-byte header
///
///   magic "VAGF" | u32 version = 1 | u64 frame_index | u64 timestamp_us |
///   16 x f64 ego->world pose, row-major 4x4 | u32 point_count
///
/// followed by point_count records of five f32: x, y, z, intensity, elongation.
/// Aggregated clouds ("VAGC") use the same header (pose and index of the newest frame)
/// and six-f32 records, the sixth being the relative timestamp in seconds.
///
/// Everything else is JSON with a closed key set; unknown or missing keys raise a
/// SchemaError naming the JSON pointer of the offending value.
#ifndef VADET__IO_HPP_
#define VADET__IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vadet/eta_builder.hpp"
#include "vadet/evaluation.hpp"
#include "vadet/frame_buffer.hpp"
#include "vadet/simulator.hpp"
#include "vadet/variable_aggregation.hpp"

namespace vadet::io {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 156;

std::vector<std::uint8_t> encode_frame(const LidarFrame& frame);
LidarFrame decode_frame(std::span<const std::uint8_t> bytes);
void write_frame(const LidarFrame& frame, const std::filesystem::path& path);
LidarFrame read_frame(const std::filesystem::path& path);

/// An aggregate as written by the aggregation commands.
struct AggregatedCloud {
  PointCloud cloud;
  Pose pose;
  std::uint64_t frame_index = 0;
  std::uint64_t timestamp_us = 0;
};

std::vector<std::uint8_t> encode_aggregated(const AggregatedCloud& cloud);
AggregatedCloud decode_aggregated(std::span<const std::uint8_t> bytes);
void write_aggregated(const AggregatedCloud& cloud, const std::filesystem::path& path);
AggregatedCloud read_aggregated(const std::filesystem::path& path);

struct SequenceManifest {
  std::string sequence_id;
  double frame_rate_hz = 10.0;
  /// Relative to the manifest's directory.
  std::vector<std::string> frame_files;
};

inline constexpr const char* kManifestName = "manifest.json";

void write_manifest(const SequenceManifest& manifest, const std::filesystem::path& dir);
SequenceManifest read_manifest(const std::filesystem::path& dir);

struct FrameDetections {
  std::uint64_t frame_index = 0;
  std::vector<DetectedBox> boxes;
};

/// Detections or ground truth for a whole sequence.
struct DetectionSet {
  std::string sequence_id;
  std::vector<FrameDetections> frames;

  /// Boxes for `frame_index`, or nullptr when the set has no entry for it.
  const std::vector<DetectedBox>* find(std::uint64_t frame_index) const;
};

std::string dump_detections(const DetectionSet& set);
DetectionSet parse_detections(const std::string& text);
void write_detections(const DetectionSet& set, const std::filesystem::path& path);
DetectionSet read_detections(const std::filesystem::path& path);

std::string dump_eta_table(const EtaTable& table);
EtaTable parse_eta_table(const std::string& text);
void write_eta_table(const EtaTable& table, const std::filesystem::path& path);
EtaTable read_eta_table(const std::filesystem::path& path);

std::string dump_bin_edges(const BinEdges& edges);
BinEdges parse_bin_edges(const std::string& text);
BinEdges read_bin_edges(const std::filesystem::path& path);

std::string dump_scenario(const ScenarioSpec& spec);
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec read_scenario(const std::filesystem::path& path);

std::string dump_noise_model(const NoiseModel& noise);
NoiseModel parse_noise_model(const std::string& text);
NoiseModel read_noise_model(const std::filesystem::path& path);

std::string dump_sweep(const SweepResult& sweep);
SweepResult parse_sweep(const std::string& text);
void write_sweep(const SweepResult& sweep, const std::filesystem::path& path);
SweepResult read_sweep(const std::filesystem::path& path);

/// One row per report row; absent metrics are written as "NA".
std::string format_report_csv(std::span<const ReportRow> rows);
/// Long-format sweep table: speed_bin, density_bin, frames, samples, ap.
std::string format_sweep_csv(const SweepResult& sweep);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace vadet::io

#endif  // VADET__IO_HPP_
