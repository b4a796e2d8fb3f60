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
#include "lidarbeam/lidar.hpp"

#include <cmath>
#include <sstream>

using namespace lidarbeam;

namespace
{
    Cuboid box(Vec3 lo, Vec3 hi, ObstacleKind kind = ObstacleKind::building)
    {
        Cuboid c;
        c.min_corner = lo;
        c.max_corner = hi;
        c.kind = kind;
        return c;
    }

    // Sensor at the origin, one large wall at x = 5.
    Scene wall_scene(const LidarConfig &cfg)
    {
        Scene s;
        s.ego_position = Vec3(0, 0, -cfg.sensor_height_offset);
        s.obstacles.push_back(box(Vec3(5, -1e4, -1e4), Vec3(6, 1e4, 1e4)));
        return s;
    }

    double distance_to_surface(const Cuboid &c, const Vec3 &p)
    {
        if (!c.contains(p, 1e-9))
            return 1e300;
        double d = 1e300;
        for (int a = 0; a < 3; ++a)
            d = std::min({d, std::abs(p[a] - c.min_corner[a]), std::abs(p[a] - c.max_corner[a])});
        return d;
    }
}

TEST_CASE("LidarConfig - Defaults and validation")
{
    LidarConfig cfg;
    CHECK(cfg.elevation_angles_deg.size() == 64);
    CHECK(cfg.elevation_angles_deg.front() == Catch::Approx(-24.8));
    CHECK(cfg.elevation_angles_deg.back() == Catch::Approx(2.0));
    CHECK(cfg.azimuth_resolution_deg == 0.1728);
    CHECK(cfg.sensor_height_offset == 1.0);
    CHECK(cfg.sigma_L == 0.1);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.azimuth_resolution_deg = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.sigma_L = -0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("scan - Empty scene gives no points")
{
    LidarConfig cfg;
    Scene s;
    s.ego_position = Vec3(0, 0, 1.5);
    CHECK(scan(s, cfg, 1).size() == 0);
}

TEST_CASE("scan - Noiseless wall")
{
    LidarConfig cfg;
    cfg.sigma_L = 0.0;
    const auto s = wall_scene(cfg);
    REQUIRE(sensor_origin(s, cfg).norm() < 1e-12);
    const auto cloud = scan(s, cfg, 3);
    REQUIRE(cloud.size() > 1000);
    for (const auto &p : cloud.points)
        REQUIRE(std::abs(p.x() - 5.0) < 1e-9);
}

TEST_CASE("scan - Range noise variance")
{
    LidarConfig clean;
    clean.sigma_L = 0.0;
    LidarConfig noisy;
    noisy.sigma_L = 0.1;
    const auto s = wall_scene(clean);
    const auto ref = scan(s, clean, 0);

    double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
    std::size_t n = 0;
    for (std::uint64_t seed = 1; n < 100000; ++seed)
    {
        const auto c = scan(s, noisy, seed);
        REQUIRE(c.size() == ref.size());
        for (std::size_t i = 0; i < c.size(); ++i)
        {
            const Vec3 e = c.points[i] - ref.points[i];
            for (int a = 0; a < 3; ++a)
            {
                sum[a] += e[a];
                sq[a] += e[a] * e[a];
            }
            ++n;
        }
    }
    const double target = 0.01 / 3.0;
    for (int a = 0; a < 3; ++a)
    {
        const double mean = sum[a] / static_cast<double>(n);
        const double var = sq[a] / static_cast<double>(n) - mean * mean;
        CHECK(var >= 0.9 * target);
        CHECK(var <= 1.1 * target);
    }
}

TEST_CASE("scan - Noiseless points lie on cuboid faces")
{
    LidarConfig cfg;
    cfg.sigma_L = 0.0;
    cfg.azimuth_resolution_deg = 1.0;
    for (std::uint64_t seed : {3u, 11u})
    {
        const auto s = generate_scene(SceneConfig{}, seed);
        const auto cloud = scan(s, cfg, seed);
        REQUIRE(cloud.size() > 0);
        const auto *ego = s.ego();
        REQUIRE(ego != nullptr);
        for (const auto &p : cloud.points)
        {
            double d = 1e300;
            for (const auto &c : s.obstacles)
                d = std::min(d, distance_to_surface(c, p));
            REQUIRE(d < 1e-9);
            // The ego vehicle never returns.
            CHECK(distance_to_surface(*ego, p) > 1e-9);
        }
    }
}

TEST_CASE("scan - Points stay within range")
{
    LidarConfig cfg;
    cfg.max_range = 30.0;
    cfg.azimuth_resolution_deg = 0.5;
    const auto s = generate_scene(SceneConfig{}, 5);
    const auto cloud = scan(s, cfg, 5);
    const Vec3 o = sensor_origin(s, cfg);
    REQUIRE(cloud.size() > 0);
    for (const auto &p : cloud.points)
        CHECK((p - o).norm() <= cfg.max_range + 6.0 * cfg.sigma_L);
}

TEST_CASE("scan - Occlusion monotonicity")
{
    LidarConfig cfg;
    cfg.azimuth_resolution_deg = 0.5;
    auto s = wall_scene(cfg);
    const auto before = scan(s, cfg, 9).size();
    s.obstacles.push_back(box(Vec3(2, -1, -1), Vec3(3, 1, 1)));
    const auto after = scan(s, cfg, 9).size();
    CHECK(after <= before);

    // Pairs from generated scenes: a copy of a building shrunk halfway toward
    // the sensor covers the same directions, closer in.
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        auto g = generate_scene(SceneConfig{}, seed);
        const auto n0 = scan(g, cfg, seed).size();
        const Vec3 o = sensor_origin(g, cfg);
        const Cuboid *near = nullptr;
        double near_far = 0.0;
        for (const auto &c : g.obstacles)
        {
            const double far = (c.min_corner - o).cwiseAbs().cwiseMax((c.max_corner - o).cwiseAbs()).norm();
            if (c.kind == ObstacleKind::building && far < cfg.max_range - 1.0 && (!near || far < near_far))
            {
                near = &c;
                near_far = far;
            }
        }
        REQUIRE(near != nullptr);
        const Cuboid copy = box(o + 0.5 * (near->min_corner - o), o + 0.5 * (near->max_corner - o));
        g.obstacles.push_back(copy);
        CHECK(scan(g, cfg, seed).size() <= n0);
    }
}

TEST_CASE("scan - Bit reproducible")
{
    LidarConfig cfg;
    cfg.azimuth_resolution_deg = 0.5;
    const auto s = generate_scene(SceneConfig{}, 21);
    const auto a = scan(s, cfg, 77);
    const auto b = scan(s, cfg, 77);
    REQUIRE(a.size() == b.size());
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        identical = identical && a.points[i] == b.points[i];
    CHECK(identical);
    const auto c = scan(s, cfg, 78);
    CHECK_FALSE(c.points[0] == a.points[0]);
}

TEST_CASE("write_xyz - Six decimals, round trip")
{
    PointCloud c;
    c.points = {Vec3(1.0, -2.5, 3.1234567), Vec3(0, 0, 0)};
    std::ostringstream out;
    write_xyz(c, out);
    CHECK(out.str() == "1.000000 -2.500000 3.123457\n0.000000 0.000000 0.000000\n");
    std::istringstream in(out.str());
    const auto back = read_xyz(in);
    REQUIRE(back.size() == 2);
    CHECK((back.points[0] - Vec3(1.0, -2.5, 3.123457)).norm() < 1e-12);

    std::istringstream bad("1 2\n");
    CHECK_THROWS_AS(read_xyz(bad), Error);
}
