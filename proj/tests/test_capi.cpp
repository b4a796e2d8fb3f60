// SPDX-License-Identifier: Apache-2.0
//
// lidarbeam: LIDAR-aided mmWave beam selection toolkit
// Copyright (C) 2026 The lidarbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <catch2/catch_amalgamated.hpp>
#include "lidarbeam/lidarbeam.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace
{
    const char *kSmallScan = R"({"lidar": {"azimuth_resolution_deg": 2.0}})";

    void count_lines(const char *, void *user) { ++*static_cast<int *>(user); }
}

TEST_CASE("C API - Version and configuration text")
{
    CHECK(std::string(lb_version()).size() > 0);

    size_t needed = 0;
    REQUIRE(lb_config_default(nullptr, 0, &needed) == LB_OK);
    REQUIRE(needed > 10);
    std::vector<char> buf(needed);
    REQUIRE(lb_config_default(buf.data(), buf.size(), &needed) == LB_OK);
    CHECK(std::string(buf.data()).find("\"episodes\":2000") != std::string::npos);
    CHECK(std::string(buf.data()).size() + 1 == needed);

    // A short buffer is truncated but still terminated.
    char tiny[8];
    REQUIRE(lb_config_default(tiny, sizeof tiny, &needed) == LB_OK);
    CHECK(std::string(tiny).size() == 7);

    const auto path = fs::temp_directory_path() / "lidarbeam_capi_cfg.json";
    std::ofstream(path) << R"({"episodes": 12})";
    REQUIRE(lb_config_load(path.c_str(), buf.data(), buf.size(), &needed) == LB_OK);
    buf.resize(needed);
    REQUIRE(lb_config_load(path.c_str(), buf.data(), buf.size(), &needed) == LB_OK);
    CHECK(std::string(buf.data()).find("\"episodes\":12") != std::string::npos);

    std::ofstream(path) << R"({"episodez": 12})";
    CHECK(lb_config_load(path.c_str(), buf.data(), buf.size(), &needed) == LB_ERR_CONFIG);
    CHECK(std::string(lb_last_error()).find("episodez") != std::string::npos);
    fs::remove(path);
    CHECK(lb_config_load(path.c_str(), buf.data(), buf.size(), &needed) == LB_ERR_IO);
}

TEST_CASE("C API - Scene, scan and trace handles")
{
    lb_scene *scene = nullptr;
    REQUIRE(lb_scene_generate(nullptr, 42, &scene) == LB_OK);
    REQUIRE(scene != nullptr);

    size_t n = 0;
    REQUIRE(lb_scene_obstacle_count(scene, &n) == LB_OK);
    CHECK(n > 10);
    int egos = 0;
    for (size_t i = 0; i < n; ++i)
    {
        double lo[3], hi[3];
        int kind = -1, is_ego = 0;
        REQUIRE(lb_scene_obstacle(scene, i, lo, hi, &kind, &is_ego) == LB_OK);
        CHECK(kind >= 0);
        CHECK(kind <= 2);
        egos += is_ego;
    }
    CHECK(egos == 1);
    double lo[3], hi[3];
    int kind = 0, is_ego = 0;
    CHECK(lb_scene_obstacle(scene, n, lo, hi, &kind, &is_ego) == LB_ERR_INVALID_ARGUMENT);

    double bs[3], ego[3];
    REQUIRE(lb_scene_positions(scene, bs, ego) == LB_OK);
    CHECK(bs[2] == 4.0);
    int los_ab = -1, los_ba = -1;
    REQUIRE(lb_scene_is_los(scene, bs, ego, &los_ab) == LB_OK);
    REQUIRE(lb_scene_is_los(scene, ego, bs, &los_ba) == LB_OK);
    CHECK(los_ab == los_ba);

    lb_cloud *cloud = nullptr;
    REQUIRE(lb_scan(scene, kSmallScan, 7, &cloud) == LB_OK);
    size_t points = 0;
    REQUIRE(lb_cloud_size(cloud, &points) == LB_OK);
    CHECK(points > 100);
    std::vector<double> xyz(3 * points);
    REQUIRE(lb_cloud_points(cloud, xyz.data(), points) == LB_OK);
    CHECK(std::isfinite(xyz[0]));
    const auto xyz_path = fs::temp_directory_path() / "lidarbeam_capi.xyz";
    REQUIRE(lb_cloud_write_xyz(cloud, xyz_path.c_str()) == LB_OK);
    CHECK(fs::file_size(xyz_path) > 0);
    fs::remove(xyz_path);
    lb_cloud_free(cloud);

    lb_mpcs *mpcs = nullptr;
    REQUIRE(lb_trace(scene, nullptr, 3, &mpcs) == LB_OK);
    size_t paths = 0;
    REQUIRE(lb_mpcs_count(mpcs, &paths) == LB_OK);
    int state = -1;
    REQUIRE(lb_mpcs_link_state(mpcs, &state) == LB_OK);
    CHECK((state == LB_LINK_LOS) == (los_ab == 1));
    if (paths > 0)
    {
        double row[9];
        REQUIRE(lb_mpcs_get(mpcs, 0, row) == LB_OK);
        CHECK(row[2] > 0.0);
        CHECK(std::hypot(row[0], row[1]) > 0.0);
    }
    double row[9];
    CHECK(lb_mpcs_get(mpcs, paths, row) == LB_ERR_INVALID_ARGUMENT);
    lb_mpcs_free(mpcs);
    lb_scene_free(scene);

    lb_scene_free(nullptr);
    lb_cloud_free(nullptr);
    lb_mpcs_free(nullptr);
}

TEST_CASE("C API - Error codes")
{
    lb_scene *scene = nullptr;
    CHECK(lb_scene_generate(nullptr, 1, nullptr) == LB_ERR_INVALID_ARGUMENT);
    CHECK(std::string(lb_last_error()).size() > 0);
    CHECK(lb_scene_generate("{\"scene\": {\"vehicle_count_range\": [9, 2]}}", 1, &scene) == LB_ERR_CONFIG);
    CHECK(scene == nullptr);
    CHECK(lb_scene_generate("{not json", 1, &scene) == LB_ERR_CONFIG);
    CHECK(lb_scene_generate(R"({"scene": {"lanes": [{"x": 7.0, "direction": 1}], "vehicle_count_range": [20, 20]}})", 1,
                            &scene) == LB_ERR_PLACEMENT);
    CHECK(std::string(lb_last_error()).find("placement failure") != std::string::npos);

    size_t n = 0;
    CHECK(lb_scene_obstacle_count(nullptr, &n) == LB_ERR_INVALID_ARGUMENT);
    CHECK(lb_train("/nonexistent/lidarbeam", LB_SUBSET_ALL, nullptr, nullptr) == LB_ERR_IO);
    CHECK(lb_train("/nonexistent/lidarbeam", 7, nullptr, nullptr) == LB_ERR_INVALID_ARGUMENT);
    char buf[16];
    CHECK(lb_report("/nonexistent/lidarbeam", buf, sizeof buf, &n) == LB_ERR_IO);
}

TEST_CASE("C API - Generate and selftest")
{
    const auto dir = fs::temp_directory_path() / "lidarbeam_capi_run";
    fs::remove_all(dir);
    lb_generate_options opt{};
    opt.has_episodes = 1;
    opt.episodes = 0;
    opt.noise = LB_NOISE_NONE;
    REQUIRE(lb_generate(nullptr, &opt, dir.c_str(), nullptr, nullptr) == LB_OK);
    CHECK(fs::exists(dir / "manifest.json"));
    opt.noise = 5;
    CHECK(lb_generate(nullptr, &opt, dir.c_str(), nullptr, nullptr) == LB_ERR_INVALID_ARGUMENT);
    fs::remove_all(dir);

    int lines = 0, failures = -1;
    REQUIRE(lb_selftest(3, 100, count_lines, &lines, &failures) == LB_OK);
    CHECK(failures == 0);
    CHECK(lines == 4);
}
