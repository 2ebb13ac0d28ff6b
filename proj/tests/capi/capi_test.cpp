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

// Exercises the shared library through its C interface only.
#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vadet/vadet.h"

namespace {

const double kIdentity[16] = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

std::vector<float> grid_points(std::size_t n, float offset) {
  std::vector<float> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.insert(pts.end(), {static_cast<float>(i) * 0.1F + offset, 0.0F, 0.0F, 0.5F, 0.1F});
  }
  return pts;
}

TEST(CApi, StatusStrings) {
  EXPECT_STREQ(vadet_status_string(VADET_OK), "ok");
  EXPECT_STREQ(vadet_status_string(VADET_ERR_SCHEMA), "schema error");
  EXPECT_STRNE(vadet_version(), "");
}

TEST(CApi, BufferAggregateAndErrors) {
  vadet_buffer* buf = nullptr;
  ASSERT_EQ(vadet_buffer_create(4, 10.0, &buf), VADET_OK);
  const auto a = grid_points(10, 0.0F);
  const auto b = grid_points(15, 5.0F);
  ASSERT_EQ(vadet_buffer_push(buf, 0, 0, kIdentity, a.data(), 10), VADET_OK);
  double moved[16];
  std::memcpy(moved, kIdentity, sizeof(moved));
  moved[3] = 1.0;  // ego advanced 1 m along x
  ASSERT_EQ(vadet_buffer_push(buf, 1, 100000, moved, b.data(), 15), VADET_OK);
  EXPECT_EQ(vadet_buffer_size(buf), 2U);

  EXPECT_EQ(vadet_buffer_push(buf, 5, 0, kIdentity, a.data(), 10), VADET_ERR_SEQUENCE_GAP);
  EXPECT_NE(std::string(vadet_last_error()).find("5"), std::string::npos);
  double bad[16];
  std::memcpy(bad, kIdentity, sizeof(bad));
  bad[0] = 2.0;
  EXPECT_EQ(vadet_buffer_push(buf, 2, 0, bad, a.data(), 10), VADET_ERR_DOMAIN);

  vadet_cloud* cloud = nullptr;
  EXPECT_EQ(vadet_fixed_aggregate(buf, 3, &cloud), VADET_ERR_INSUFFICIENT_HISTORY);
  ASSERT_EQ(vadet_fixed_aggregate(buf, 2, &cloud), VADET_OK);
  EXPECT_STREQ(vadet_last_error(), "");
  ASSERT_EQ(vadet_cloud_size(cloud), 25U);
  std::vector<double> xyz(75);
  std::vector<double> ts(25);
  ASSERT_EQ(vadet_cloud_copy(cloud, xyz.data(), nullptr, nullptr, ts.data()), VADET_OK);
  EXPECT_EQ(ts[0], 0.0);
  EXPECT_EQ(ts[24], -0.1);
  EXPECT_NEAR(xyz[3 * 15], -1.0, 1e-12);  // first point of the older frame
  vadet_cloud_destroy(cloud);
  vadet_buffer_destroy(buf);
}

TEST(CApi, BuildInputAndTable) {
  const auto dir = std::filesystem::temp_directory_path() / "vadet_capi_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "eta.json");
    out << R"({"speed_edges":[0.0],"density_edges":[0.0],"frames":[[4]],"n_min":3,"n_max":16})";
  }
  vadet_eta_table* table = nullptr;
  ASSERT_EQ(vadet_eta_table_read((dir / "eta.json").c_str(), &table), VADET_OK);
  std::size_t n = 0;
  ASSERT_EQ(vadet_eta_table_lookup(table, 3.0, 1.0, &n), VADET_OK);
  EXPECT_EQ(n, 4U);
  EXPECT_EQ(vadet_eta_table_lookup(table, -3.0, 1.0, &n), VADET_ERR_DOMAIN);

  vadet_buffer* buf = nullptr;
  ASSERT_EQ(vadet_buffer_create(16, 10.0, &buf), VADET_OK);
  const auto pts = grid_points(20, 0.0F);
  for (std::uint64_t k = 0; k < 5; ++k) {
    ASSERT_EQ(vadet_buffer_push(buf, k, k * 100000, kIdentity, pts.data(), 20), VADET_OK);
  }
  vadet_config cfg;
  vadet_config_init(&cfg);
  EXPECT_EQ(cfg.background_frames, 3U);
  EXPECT_DOUBLE_EQ(cfg.sigma, 1.1);

  vadet_cloud* cloud = nullptr;
  ASSERT_EQ(vadet_build_input(buf, nullptr, 0, table, &cfg, &cloud), VADET_OK);
  EXPECT_EQ(vadet_cloud_size(cloud), 60U);
  vadet_cloud_destroy(cloud);

  // A box around the first ten points takes them from four frames instead of three.
  vadet_box box{0.45, 0, 0, 0.9, 1.0, 1.0, 0, 0.9, 0, 0, 10, VADET_CLASS_VEHICLE};
  ASSERT_EQ(vadet_build_input(buf, &box, 1, table, &cfg, &cloud), VADET_OK);
  EXPECT_EQ(vadet_cloud_size(cloud), 4U * 10U + 3U * 10U);
  vadet_cloud_destroy(cloud);

  box.class_id = 9;
  EXPECT_EQ(vadet_build_input(buf, &box, 1, table, &cfg, &cloud), VADET_ERR_INVALID_ARGUMENT);
  box.class_id = 0;
  box.w = -1;
  EXPECT_EQ(vadet_build_input(buf, &box, 1, table, &cfg, &cloud), VADET_ERR_DOMAIN);

  EXPECT_EQ(vadet_eta_table_read((dir / "missing.json").c_str(), &table), VADET_ERR_IO);
  {
    std::ofstream out(dir / "bad.json");
    out << R"({"speed_edges":[0.0]})";
  }
  vadet_eta_table* bad = nullptr;
  EXPECT_EQ(vadet_eta_table_read((dir / "bad.json").c_str(), &bad), VADET_ERR_SCHEMA);
  EXPECT_EQ(bad, nullptr);

  vadet_eta_table_destroy(table);
  vadet_buffer_destroy(buf);
  std::filesystem::remove_all(dir);
}

TEST(CApi, NullArguments) {
  EXPECT_EQ(vadet_buffer_create(4, 10.0, nullptr), VADET_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(vadet_fixed_aggregate(nullptr, 1, nullptr), VADET_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(vadet_cloud_size(nullptr), 0U);
  vadet_cloud_destroy(nullptr);
  vadet_buffer_destroy(nullptr);
}

}  // namespace
