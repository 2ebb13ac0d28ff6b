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

/* C interface to libvadet. Every function returns a status; on failure the message
 * is available from vadet_last_error() on the calling thread. Handles are opaque and
 * owned by the caller once returned. */
#ifndef VADET_VADET_H_
#define VADET_VADET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VADET_BUILDING_LIBRARY)
#    define VADET_API __declspec(dllexport)
#  else
#    define VADET_API __declspec(dllimport)
#  endif
#else
#  define VADET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vadet_status {
  VADET_OK = 0,
  VADET_ERR_DOMAIN = 1,
  VADET_ERR_SEQUENCE_GAP = 2,
  VADET_ERR_INSUFFICIENT_HISTORY = 3,
  VADET_ERR_FORMAT = 4,
  VADET_ERR_SCHEMA = 5,
  VADET_ERR_IO = 6,
  VADET_ERR_INVALID_ARGUMENT = 7,
  VADET_ERR_INTERNAL = 100
} vadet_status;

VADET_API const char* vadet_version(void);
VADET_API const char* vadet_status_string(vadet_status status);
/* Message of the last failed call on this thread; empty after a success. */
VADET_API const char* vadet_last_error(void);

typedef struct vadet_config {
  double sigma;             /* region margin, >= 1 */
  size_t background_frames; /* frames of background context */
  double frame_rate;        /* Hz */
  size_t n_min;
  size_t n_max;
  unsigned threads; /* 0 = hardware concurrency */
} vadet_config;

VADET_API void vadet_config_init(vadet_config* cfg);

typedef enum vadet_class {
  VADET_CLASS_VEHICLE = 0,
  VADET_CLASS_PEDESTRIAN = 1,
  VADET_CLASS_CYCLIST = 2,
  VADET_CLASS_UNKNOWN = 3
} vadet_class;

typedef struct vadet_box {
  double cx, cy, cz;
  double l, w, h;
  double yaw;
  double score;
  double vx, vy;
  uint32_t n_points;
  int32_t class_id; /* vadet_class */
} vadet_box;

/* ---- point clouds ---- */

typedef struct vadet_cloud vadet_cloud;

VADET_API void vadet_cloud_destroy(vadet_cloud* cloud);
VADET_API size_t vadet_cloud_size(const vadet_cloud* cloud);
/* Copies the cloud out. Any output may be NULL; non-NULL outputs must hold
 * vadet_cloud_size() entries (three per point for xyz). */
VADET_API vadet_status vadet_cloud_copy(const vadet_cloud* cloud, double* xyz, float* intensity,
                                        float* elongation, double* rel_timestamp);

/* ---- frame buffer ---- */

typedef struct vadet_buffer vadet_buffer;

VADET_API vadet_status vadet_buffer_create(size_t capacity, double frame_rate,
                                           vadet_buffer** out);
VADET_API void vadet_buffer_destroy(vadet_buffer* buffer);
/* pose: row-major 4x4 ego->world. points: n records of (x, y, z, intensity, elongation).
 * frame_index must follow the newest buffered frame. */
VADET_API vadet_status vadet_buffer_push(vadet_buffer* buffer, uint64_t frame_index,
                                         uint64_t timestamp_us, const double pose[16],
                                         const float* points, size_t n);
VADET_API size_t vadet_buffer_size(const vadet_buffer* buffer);

VADET_API vadet_status vadet_fixed_aggregate(const vadet_buffer* buffer, size_t frames,
                                             vadet_cloud** out);

/* ---- eta table ---- */

typedef struct vadet_eta_table vadet_eta_table;

VADET_API vadet_status vadet_eta_table_read(const char* path, vadet_eta_table** out);
VADET_API void vadet_eta_table_destroy(vadet_eta_table* table);
VADET_API vadet_status vadet_eta_table_lookup(const vadet_eta_table* table, double speed,
                                              double density, size_t* frames);

/* Variable-aggregation input for the newest buffered frame. `previous` holds the
 * previous frame's detections already expressed in current ego coordinates. */
VADET_API vadet_status vadet_build_input(const vadet_buffer* buffer, const vadet_box* previous,
                                         size_t n_previous, const vadet_eta_table* table,
                                         const vadet_config* cfg, vadet_cloud** out);

/* ---- file-level commands ---- */

/* seed may be NULL to keep the scenario's own seed. */
VADET_API vadet_status vadet_simulate(const char* spec_path, const char* out_dir,
                                      const uint64_t* seed, unsigned threads);
VADET_API vadet_status vadet_aggregate(const char* seq_dir, size_t frames, const char* out_dir,
                                       unsigned threads, size_t* written);
VADET_API vadet_status vadet_run_vadet(const char* seq_dir, const char* detections_path,
                                       const char* eta_path, const vadet_config* cfg,
                                       const char* out_dir, size_t* written);
VADET_API vadet_status vadet_detect(const char* seq_dir, const char* gt_path,
                                    const char* noise_path, uint64_t seed, const char* out_path);
/* edges_path NULL selects the default bin edges; csv_path may be NULL. */
VADET_API vadet_status vadet_sweep(const char* const* seq_dirs, const char* const* gt_paths,
                                   size_t count, const char* noise_path, const char* edges_path,
                                   size_t n_min, size_t n_max, uint64_t seed, unsigned threads,
                                   const char* out_path, const char* csv_path);
VADET_API vadet_status vadet_build_eta(const char* sweep_path, size_t background_frames,
                                       const char* out_path);
VADET_API vadet_status vadet_write_default_edges(const char* out_path);

#define VADET_BREAKDOWN_SPEED 1u
#define VADET_BREAKDOWN_DENSITY 2u
#define VADET_BREAKDOWN_CROSS 4u

VADET_API vadet_status vadet_eval(const char* detections_path, const char* gt_path,
                                  unsigned breakdown_mask, const char* frame_config,
                                  unsigned threads, const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* VADET_VADET_H_ */
