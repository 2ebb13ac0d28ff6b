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

#include "vadet/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <span>
#include <utility>

#include "vadet/error.hpp"
#include "vadet/frame_buffer.hpp"
#include "vadet/random.hpp"

namespace vadet::pipeline {

namespace {

std::string numbered(const char* prefix, std::uint64_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%06llu%s", prefix, static_cast<unsigned long long>(index), ext);
  return buf;
}

LidarFrame as_frame(const io::AggregatedCloud& c) {
  LidarFrame f;
  f.cloud = c.cloud;
  f.pose = c.pose;
  f.timestamp_us = c.timestamp_us;
  f.frame_index = c.frame_index;
  return f;
}

void prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    throw IoError("cannot create '" + out.string() + "': " + ec.message());
  }
}

class ClipWriter {
 public:
  ClipWriter(fs::path out, std::string sequence_id, double frame_rate) : out_(std::move(out)) {
    prepare_dir(out_);
    manifest_.sequence_id = std::move(sequence_id);
    manifest_.frame_rate_hz = frame_rate;
  }

  void add(const io::AggregatedCloud& cloud) {
    const std::string name = numbered("cloud_", cloud.frame_index, ".vagc");
    io::write_aggregated(cloud, out_ / name);
    manifest_.frame_files.push_back(name);
  }

  std::size_t finish() {
    if (!manifest_.frame_files.empty()) {
      io::write_manifest(manifest_, out_);
    }
    return manifest_.frame_files.size();
  }

 private:
  fs::path out_;
  io::SequenceManifest manifest_;
};

const std::vector<DetectedBox>& boxes_or_empty(const io::DetectionSet& set, std::uint64_t index) {
  static const std::vector<DetectedBox> kEmpty;
  const auto* found = set.find(index);
  return found ? *found : kEmpty;
}

// Streams a sequence's frames from disk into a buffer one at a time.
template <typename Fn>
void stream_frames(const fs::path& seq, std::size_t capacity, Fn&& on_frame) {
  const io::SequenceManifest manifest = io::read_manifest(seq);
  FrameBuffer buffer(capacity, manifest.frame_rate_hz);
  for (const auto& file : manifest.frame_files) {
    const fs::path p = seq / file;
    if (p.extension() == ".vagc") {
      buffer.push(as_frame(io::read_aggregated(p)));
    } else {
      buffer.push(io::read_frame(p));
    }
    on_frame(manifest, buffer);
  }
}

}  // namespace

LoadedSequence load_sequence(const fs::path& dir) {
  const io::SequenceManifest manifest = io::read_manifest(dir);
  LoadedSequence seq;
  seq.sequence_id = manifest.sequence_id;
  seq.frame_rate_hz = manifest.frame_rate_hz;
  for (const auto& file : manifest.frame_files) {
    const fs::path p = dir / file;
    if (p.extension() == ".vagc") {
      seq.clouds.push_back(io::read_aggregated(p));
    } else {
      LidarFrame f = io::read_frame(p);
      seq.clouds.push_back({std::move(f.cloud), f.pose, f.frame_index, f.timestamp_us});
    }
  }
  return seq;
}

void simulate(const ScenarioSpec& spec, const fs::path& out, unsigned threads) {
  const SimulatedSequence sim = simulate_sequence(spec, threads);
  prepare_dir(out / "frames");
  io::SequenceManifest manifest;
  manifest.sequence_id = sim.sequence_id;
  manifest.frame_rate_hz = sim.frame_rate;
  io::DetectionSet gt;
  gt.sequence_id = sim.sequence_id;
  for (std::size_t k = 0; k < sim.frames.size(); ++k) {
    const LidarFrame& frame = sim.frames[k];
    const std::string name = "frames/" + numbered("", frame.frame_index, ".vagf");
    io::write_frame(frame, out / name);
    manifest.frame_files.push_back(name);
    gt.frames.push_back({frame.frame_index, sim.ground_truth[k]});
  }
  io::write_manifest(manifest, out);
  io::write_detections(gt, out / kGroundTruthName);
}

std::size_t aggregate(const fs::path& seq, std::size_t frames, const fs::path& out,
                      unsigned threads) {
  (void)threads;
  if (frames == 0) {
    throw DomainError("frame count must be at least 1");
  }
  std::size_t seen = 0;
  std::unique_ptr<ClipWriter> writer;
  stream_frames(seq, frames, [&](const io::SequenceManifest& m, const FrameBuffer& buffer) {
    ++seen;
    if (!writer) {
      writer = std::make_unique<ClipWriter>(out, m.sequence_id, m.frame_rate_hz);
    }
    if (buffer.size() < frames) {
      return;
    }
    const LidarFrame& newest = buffer.newest();
    writer->add({fixed_aggregate(buffer, frames), newest.pose, newest.frame_index,
                 newest.timestamp_us});
  });
  if (seen < frames) {
    throw InsufficientHistoryError(frames, seen);
  }
  return writer->finish();
}

std::size_t vadet(const fs::path& seq, const io::DetectionSet& detections, const EtaTable& table,
                  const VadetConfig& cfg, const fs::path& out) {
  cfg.validate();
  const std::size_t capacity = std::max(cfg.background_frames, table.n_max());
  std::size_t seen = 0;
  std::unique_ptr<ClipWriter> writer;
  std::vector<DetectedBox> previous;
  VadetConfig run_cfg = cfg;
  stream_frames(seq, capacity, [&](const io::SequenceManifest& m, const FrameBuffer& buffer) {
    ++seen;
    if (!writer) {
      writer = std::make_unique<ClipWriter>(out, m.sequence_id, m.frame_rate_hz);
      // Region prediction follows the sequence's own rate.
      run_cfg.frame_rate = m.frame_rate_hz;
    }
    if (buffer.size() < cfg.background_frames) {
      return;
    }
    const LidarFrame& newest = buffer.newest();
    previous.clear();
    if (buffer.size() >= 2) {
      const Pose to_current = buffer.correction(1);
      for (const auto& d : boxes_or_empty(detections, buffer.at_age(1).frame_index)) {
        previous.push_back(transform_detection(d, to_current));
      }
    }
    writer->add({build_vadet_input(buffer, previous, table, run_cfg), newest.pose,
                 newest.frame_index, newest.timestamp_us});
  });
  if (seen < cfg.background_frames) {
    throw InsufficientHistoryError(cfg.background_frames, seen);
  }
  return writer->finish();
}

io::DetectionSet detect(const fs::path& seq, const io::DetectionSet& ground_truth,
                        const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  const LoadedSequence loaded = load_sequence(seq);
  io::DetectionSet out;
  out.sequence_id = loaded.sequence_id;
  for (const auto& c : loaded.clouds) {
    const auto& gt = boxes_or_empty(ground_truth, c.frame_index);
    out.frames.push_back(
        {c.frame_index, mock_detect_aggregated(gt, c.cloud, loaded.frame_rate_hz, noise,
                                               substream_seed(seed, {c.frame_index}))});
  }
  return out;
}

SweepResult sweep(const std::vector<fs::path>& seqs,
                  const std::vector<io::DetectionSet>& ground_truth, const NoiseModel& noise,
                  const BinEdges& edges, std::size_t n_min, std::size_t n_max,
                  std::uint64_t seed, unsigned threads) {
  if (seqs.size() != ground_truth.size()) {
    throw InvalidArgumentError("one ground-truth file is needed per sequence");
  }
  noise.validate();
  std::vector<SweepSequence> sequences;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    LoadedSequence loaded = load_sequence(seqs[s]);
    if (loaded.clouds.size() < n_max) {
      throw InsufficientHistoryError(n_max, loaded.clouds.size());
    }
    SweepSequence sq;
    sq.frame_rate = loaded.frame_rate_hz;
    for (auto& c : loaded.clouds) {
      sq.ground_truth.push_back(boxes_or_empty(ground_truth[s], c.frame_index));
      sq.frames.push_back(as_frame(c));
    }
    sequences.push_back(std::move(sq));
  }
  const DetectionSource detector = [&noise, seed](const SweepSample& sample) {
    return mock_detect_aggregated(sample.ground_truth, sample.input, sample.frame_rate, noise,
                                  substream_seed(seed, {sample.sequence, sample.frame_index}));
  };
  return run_sweep(sequences, detector, edges, n_min, n_max, threads);
}

std::vector<ReportRow> evaluate(const io::DetectionSet& detections,
                                const io::DetectionSet& ground_truth,
                                const BreakdownSelection& selection,
                                const std::string& frame_config, unsigned threads) {
  std::vector<EvalFrame> frames;
  frames.reserve(detections.frames.size());
  for (const auto& f : detections.frames) {
    frames.push_back({f.boxes, boxes_or_empty(ground_truth, f.frame_index)});
  }
  const Evaluation evaluation(std::move(frames), kMatchIouThreshold, threads);
  return breakdown_report(evaluation, selection, BreakdownCategories{}, frame_config);
}

}  // namespace vadet::pipeline
