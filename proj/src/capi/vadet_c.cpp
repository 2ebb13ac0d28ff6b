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

#include "vadet/vadet.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "vadet/error.hpp"
#include "vadet/io.hpp"
#include "vadet/pipeline.hpp"

struct vadet_cloud {
  vadet::PointCloud cloud;
};

struct vadet_buffer {
  vadet::FrameBuffer buffer;
};

struct vadet_eta_table {
  vadet::EtaTable table;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
vadet_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return VADET_OK;
  } catch (const vadet::Error& e) {
    g_last_error = e.what();
    return static_cast<vadet_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return VADET_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) {
    throw vadet::InvalidArgumentError(what);
  }
}

vadet::VadetConfig to_config(const vadet_config* c) {
  vadet::VadetConfig cfg;
  if (c != nullptr) {
    cfg.sigma = c->sigma;
    cfg.background_frames = c->background_frames;
    cfg.frame_rate = c->frame_rate;
    cfg.n_min = c->n_min;
    cfg.n_max = c->n_max;
    cfg.threads = c->threads;
  }
  return cfg;
}

vadet::DetectedBox to_box(const vadet_box& b) {
  if (b.class_id < VADET_CLASS_VEHICLE || b.class_id > VADET_CLASS_UNKNOWN) {
    throw vadet::InvalidArgumentError("class_id out of range");
  }
  vadet::DetectedBox d;
  d.box = vadet::OrientedBox::make(vadet::Vec3(b.cx, b.cy, b.cz), b.l, b.w, b.h, b.yaw);
  d.score = b.score;
  d.velocity = vadet::Vec2(b.vx, b.vy);
  d.point_count = b.n_points;
  d.class_id = static_cast<vadet::ObjectClass>(b.class_id);
  return d;
}

}  // namespace

extern "C" {

const char* vadet_version(void) { return "0.1.0"; }

const char* vadet_status_string(vadet_status status) {
  switch (status) {
    case VADET_OK: return "ok";
    case VADET_ERR_DOMAIN: return "domain error";
    case VADET_ERR_SEQUENCE_GAP: return "sequence gap";
    case VADET_ERR_INSUFFICIENT_HISTORY: return "insufficient history";
    case VADET_ERR_FORMAT: return "format error";
    case VADET_ERR_SCHEMA: return "schema error";
    case VADET_ERR_IO: return "i/o error";
    case VADET_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VADET_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* vadet_last_error(void) { return g_last_error.c_str(); }

void vadet_config_init(vadet_config* cfg) {
  if (cfg == nullptr) {
    return;
  }
  const vadet::VadetConfig d;
  cfg->sigma = d.sigma;
  cfg->background_frames = d.background_frames;
  cfg->frame_rate = d.frame_rate;
  cfg->n_min = d.n_min;
  cfg->n_max = d.n_max;
  cfg->threads = d.threads;
}

void vadet_cloud_destroy(vadet_cloud* cloud) { delete cloud; }

size_t vadet_cloud_size(const vadet_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

vadet_status vadet_cloud_copy(const vadet_cloud* cloud, double* xyz, float* intensity,
                              float* elongation, double* rel_timestamp) {
  return guarded([&] {
    require(cloud != nullptr, "cloud is null");
    const auto pos = cloud->cloud.positions();
    const auto feat = cloud->cloud.features();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (xyz) {
        xyz[3 * i] = pos[i].x();
        xyz[3 * i + 1] = pos[i].y();
        xyz[3 * i + 2] = pos[i].z();
      }
      if (intensity) intensity[i] = feat[i].intensity;
      if (elongation) elongation[i] = feat[i].elongation;
      if (rel_timestamp) rel_timestamp[i] = feat[i].rel_timestamp;
    }
  });
}

vadet_status vadet_buffer_create(size_t capacity, double frame_rate, vadet_buffer** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new vadet_buffer{vadet::FrameBuffer(capacity, frame_rate)};
  });
}

void vadet_buffer_destroy(vadet_buffer* buffer) { delete buffer; }

vadet_status vadet_buffer_push(vadet_buffer* buffer, uint64_t frame_index, uint64_t timestamp_us,
                               const double pose[16], const float* points, size_t n) {
  return guarded([&] {
    require(buffer != nullptr, "buffer is null");
    require(pose != nullptr, "pose is null");
    require(points != nullptr || n == 0, "points is null");
    vadet::Mat4 m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        m(r, c) = pose[4 * r + c];
      }
    }
    vadet::LidarFrame frame;
    frame.pose = vadet::Pose::from_matrix(m);
    frame.frame_index = frame_index;
    frame.timestamp_us = timestamp_us;
    frame.cloud.resize(n);
    auto pos = frame.cloud.positions();
    auto feat = frame.cloud.features();
    for (std::size_t i = 0; i < n; ++i) {
      const float* p = points + 5 * i;
      pos[i] = vadet::Vec3(p[0], p[1], p[2]);
      feat[i].intensity = p[3];
      feat[i].elongation = p[4];
    }
    buffer->buffer.push(std::move(frame));
  });
}

size_t vadet_buffer_size(const vadet_buffer* buffer) { return buffer ? buffer->buffer.size() : 0; }

vadet_status vadet_fixed_aggregate(const vadet_buffer* buffer, size_t frames, vadet_cloud** out) {
  return guarded([&] {
    require(buffer != nullptr && out != nullptr, "null argument");
    *out = new vadet_cloud{vadet::fixed_aggregate(buffer->buffer, frames)};
  });
}

vadet_status vadet_eta_table_read(const char* path, vadet_eta_table** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new vadet_eta_table{vadet::io::read_eta_table(path)};
  });
}

void vadet_eta_table_destroy(vadet_eta_table* table) { delete table; }

vadet_status vadet_eta_table_lookup(const vadet_eta_table* table, double speed, double density,
                                    size_t* frames) {
  return guarded([&] {
    require(table != nullptr && frames != nullptr, "null argument");
    *frames = table->table.lookup(speed, density);
  });
}

vadet_status vadet_build_input(const vadet_buffer* buffer, const vadet_box* previous,
                               size_t n_previous, const vadet_eta_table* table,
                               const vadet_config* cfg, vadet_cloud** out) {
  return guarded([&] {
    require(buffer != nullptr && table != nullptr && out != nullptr, "null argument");
    require(previous != nullptr || n_previous == 0, "previous is null");
    std::vector<vadet::DetectedBox> boxes;
    boxes.reserve(n_previous);
    for (std::size_t i = 0; i < n_previous; ++i) {
      boxes.push_back(to_box(previous[i]));
    }
    *out = new vadet_cloud{
        vadet::build_vadet_input(buffer->buffer, boxes, table->table, to_config(cfg))};
  });
}

vadet_status vadet_simulate(const char* spec_path, const char* out_dir, const uint64_t* seed,
                            unsigned threads) {
  return guarded([&] {
    require(spec_path != nullptr && out_dir != nullptr, "null argument");
    vadet::ScenarioSpec spec = vadet::io::read_scenario(spec_path);
    if (seed != nullptr) {
      spec.seed = *seed;
    }
    vadet::pipeline::simulate(spec, out_dir, threads);
  });
}

vadet_status vadet_aggregate(const char* seq_dir, size_t frames, const char* out_dir,
                             unsigned threads, size_t* written) {
  return guarded([&] {
    require(seq_dir != nullptr && out_dir != nullptr, "null argument");
    const std::size_t n = vadet::pipeline::aggregate(seq_dir, frames, out_dir, threads);
    if (written) *written = n;
  });
}

vadet_status vadet_run_vadet(const char* seq_dir, const char* detections_path,
                             const char* eta_path, const vadet_config* cfg, const char* out_dir,
                             size_t* written) {
  return guarded([&] {
    require(seq_dir && detections_path && eta_path && out_dir, "null argument");
    const auto detections = vadet::io::read_detections(detections_path);
    const auto table = vadet::io::read_eta_table(eta_path);
    const std::size_t n =
        vadet::pipeline::vadet(seq_dir, detections, table, to_config(cfg), out_dir);
    if (written) *written = n;
  });
}

vadet_status vadet_detect(const char* seq_dir, const char* gt_path, const char* noise_path,
                          uint64_t seed, const char* out_path) {
  return guarded([&] {
    require(seq_dir && gt_path && noise_path && out_path, "null argument");
    const auto gt = vadet::io::read_detections(gt_path);
    const auto noise = vadet::io::read_noise_model(noise_path);
    vadet::io::write_detections(vadet::pipeline::detect(seq_dir, gt, noise, seed), out_path);
  });
}

vadet_status vadet_sweep(const char* const* seq_dirs, const char* const* gt_paths, size_t count,
                         const char* noise_path, const char* edges_path, size_t n_min,
                         size_t n_max, uint64_t seed, unsigned threads, const char* out_path,
                         const char* csv_path) {
  return guarded([&] {
    require(seq_dirs && gt_paths && noise_path && out_path, "null argument");
    require(count > 0, "at least one sequence is required");
    std::vector<std::filesystem::path> seqs;
    std::vector<vadet::io::DetectionSet> gts;
    for (std::size_t i = 0; i < count; ++i) {
      require(seq_dirs[i] && gt_paths[i], "null path");
      seqs.emplace_back(seq_dirs[i]);
      gts.push_back(vadet::io::read_detections(gt_paths[i]));
    }
    const auto noise = vadet::io::read_noise_model(noise_path);
    const vadet::BinEdges edges =
        edges_path ? vadet::io::read_bin_edges(edges_path) : vadet::BinEdges{};
    const auto result =
        vadet::pipeline::sweep(seqs, gts, noise, edges, n_min, n_max, seed, threads);
    vadet::io::write_sweep(result, out_path);
    if (csv_path) {
      vadet::io::write_text(vadet::io::format_sweep_csv(result), csv_path);
    }
  });
}

vadet_status vadet_build_eta(const char* sweep_path, size_t background_frames,
                             const char* out_path) {
  return guarded([&] {
    require(sweep_path && out_path, "null argument");
    const auto sweep = vadet::io::read_sweep(sweep_path);
    vadet::VadetConfig cfg;
    cfg.background_frames = background_frames;
    vadet::io::write_eta_table(vadet::build_eta_table(sweep, cfg), out_path);
  });
}

vadet_status vadet_write_default_edges(const char* out_path) {
  return guarded([&] {
    require(out_path != nullptr, "null argument");
    vadet::io::write_text(vadet::io::dump_bin_edges(vadet::BinEdges{}), out_path);
  });
}

vadet_status vadet_eval(const char* detections_path, const char* gt_path, unsigned breakdown_mask,
                        const char* frame_config, unsigned threads, const char* out_csv) {
  return guarded([&] {
    require(detections_path && gt_path && out_csv, "null argument");
    vadet::BreakdownSelection sel;
    sel.speed = (breakdown_mask & VADET_BREAKDOWN_SPEED) != 0;
    sel.density = (breakdown_mask & VADET_BREAKDOWN_DENSITY) != 0;
    sel.cross = (breakdown_mask & VADET_BREAKDOWN_CROSS) != 0;
    const auto rows = vadet::pipeline::evaluate(vadet::io::read_detections(detections_path),
                                                vadet::io::read_detections(gt_path), sel,
                                                frame_config ? frame_config : "default", threads);
    vadet::io::write_text(vadet::io::format_report_csv(rows), out_csv);
  });
}

}  // extern "C"
