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
/// \brief Whole-sequence commands over on-disk sequences.
///
/// A sequence directory holds manifest.json and the frame files it lists. Aggregated
/// outputs are sequence directories too, with one VAGC file per newest frame.
#ifndef VADET__PIPELINE_HPP_
#define VADET__PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vadet/eta_builder.hpp"
#include "vadet/evaluation.hpp"
#include "vadet/io.hpp"
#include "vadet/simulator.hpp"
#include "vadet/variable_aggregation.hpp"

namespace vadet::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kGroundTruthName = "gt.json";

/// A sequence loaded in memory. Raw frames have every relative timestamp at zero.
struct LoadedSequence {
  std::string sequence_id;
  double frame_rate_hz = 10.0;
  std::vector<io::AggregatedCloud> clouds;
};

/// Reads a sequence directory of VAGF or VAGC files, in manifest order.
LoadedSequence load_sequence(const fs::path& dir);

/// Writes frames/NNNNNN.vagf, manifest.json and gt.json under `out`.
void simulate(const ScenarioSpec& spec, const fs::path& out, unsigned threads);

/// Fixed n-frame aggregation of every frame with at least n frames of history.
/// Returns the number of clouds written. Throws InsufficientHistoryError when the
/// sequence is shorter than n.
std::size_t aggregate(const fs::path& seq, std::size_t frames, const fs::path& out,
                      unsigned threads);

/// Variable aggregation driven by the detections of each previous frame. Frames with
/// fewer than cfg.background_frames frames of history are skipped.
std::size_t vadet(const fs::path& seq, const io::DetectionSet& detections, const EtaTable& table,
                  const VadetConfig& cfg, const fs::path& out);

/// Mock detections for every cloud of a sequence. Cloud k draws from
/// substream (seed, frame_index).
io::DetectionSet detect(const fs::path& seq, const io::DetectionSet& ground_truth,
                        const NoiseModel& noise, std::uint64_t seed);

/// Frame-count sweep of the mock detector over one or more sequences.
SweepResult sweep(const std::vector<fs::path>& seqs,
                  const std::vector<io::DetectionSet>& ground_truth, const NoiseModel& noise,
                  const BinEdges& edges, std::size_t n_min, std::size_t n_max,
                  std::uint64_t seed, unsigned threads);

/// Subset evaluation over the frames listed in `detections`; a frame missing from the
/// ground truth counts as having no objects.
std::vector<ReportRow> evaluate(const io::DetectionSet& detections,
                                const io::DetectionSet& ground_truth,
                                const BreakdownSelection& selection,
                                const std::string& frame_config, unsigned threads);

}  // namespace vadet::pipeline

#endif  // VADET__PIPELINE_HPP_
