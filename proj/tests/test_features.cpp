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
#include "lidarbeam/features.hpp"

#include <algorithm>
#include <cmath>

using namespace lidarbeam;

namespace
{
    const CoverageZone zone{-2.0, 0.0, 32.0, 160.0, 8.0};
    const Vec3 ego(11.0, 80.0, 1.5);
    const Vec3 bs(1.0, 80.0, 4.0);

    PointCloud random_cloud(std::uint64_t seed, int n)
    {
        auto rng = make_engine(seed);
        std::uniform_real_distribution<double> X(-5.0, 35.0), Y(40.0, 120.0), Z(-0.5, 9.0);
        PointCloud c;
        for (int i = 0; i < n; ++i)
            c.points.emplace_back(X(rng), Y(rng), Z(rng));
        return c;
    }

    bool same_grid(const HistogramGrid &a, const HistogramGrid &b)
    {
        return a.nx == b.nx && a.ny == b.ny && a.nz == b.nz && a.counts == b.counts && a.bs_bin == b.bs_bin;
    }
}

TEST_CASE("FeatureConfig - Defaults and validation")
{
    FeatureConfig cfg;
    CHECK(cfg.nx() == 64);
    CHECK(cfg.ny() == 64);
    CHECK(cfg.nz() == 8);
    CHECK(cfg.d_max == 25.0);
    CHECK(cfg.ground_z_min == 0.1);
    auto bad = cfg;
    bad.b_x = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.d_max = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("apply_gnss_noise - Identity and variance")
{
    const Vec3 p(3.0, -1.0, 2.0);
    CHECK(apply_gnss_noise(p, 0.0, 5) == p);
    CHECK(apply_gnss_noise(p, 3.0, 5) == apply_gnss_noise(p, 3.0, 5));
    CHECK_THROWS_AS(apply_gnss_noise(p, -1.0, 5), Error);

    const int n = 100000;
    double s[3] = {0, 0, 0}, sq[3] = {0, 0, 0}, total = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const Vec3 e = apply_gnss_noise(p, 3.0, static_cast<std::uint64_t>(i)) - p;
        total += e.squaredNorm();
        for (int a = 0; a < 3; ++a)
        {
            s[a] += e[a];
            sq[a] += e[a] * e[a];
        }
    }
    for (int a = 0; a < 3; ++a)
    {
        const double mean = s[a] / n;
        const double var = sq[a] / n - mean * mean;
        CHECK(var >= 0.9 * 3.0);
        CHECK(var <= 1.1 * 3.0);
    }
    // E|eps|^2 = sigma^2
    CHECK(total / n == Catch::Approx(9.0).epsilon(0.05));
}

TEST_CASE("voxelize - Filters and quantizer edges")
{
    FeatureConfig cfg;
    const auto empty = voxelize(PointCloud{}, zone, ego, bs, cfg);
    CHECK(empty.counts.size() == 64u * 64u * 8u);
    CHECK(empty.total() == 0);

    CoverageZone small{0.0, 0.0, 10.0, 10.0, 4.0};
    PointCloud corner;
    corner.points = {Vec3(0.0, 0.0, 0.1)};
    auto g = voxelize(corner, small, Vec3(1, 1, 1), Vec3(5, 5, 2), cfg);
    CHECK(g.at(0, 0, 0) == 1);
    CHECK(g.total() == 1);

    // Upper edges clamp to the last bin.
    PointCloud top;
    top.points = {Vec3(10.0, 10.0, 4.0)};
    g = voxelize(top, small, Vec3(9, 9, 3), Vec3(5, 5, 2), cfg);
    CHECK(g.at(63, 63, 7) == 1);

    PointCloud ground;
    ground.points = {Vec3(5.0, 5.0, 0.05)};
    CHECK(voxelize(ground, small, Vec3(5, 5, 1), Vec3(5, 5, 2), cfg).total() == 0);

    PointCloud far;
    far.points = {ego + Vec3(0.0, 30.0, 0.0)};
    CHECK(voxelize(far, zone, ego, bs, cfg).total() == 0);
    far.points = {ego + Vec3(0.0, 24.9, 0.0)};
    CHECK(voxelize(far, zone, ego, bs, cfg).total() == 1);

    PointCloud outside;
    outside.points = {Vec3(-3.0, 80.0, 2.0)};
    CHECK(voxelize(outside, zone, Vec3(0, 80, 1.5), bs, cfg).total() == 0);

    const auto b = voxelize(PointCloud{}, zone, ego, bs, cfg).bs_bin;
    CHECK(b == zone_bin(zone, cfg, bs));
    CHECK(b[0] == static_cast<int>(std::floor(3.0 / 34.0 * 64)));
    CHECK(b[1] == 32);
    CHECK(b[2] == 4);
}

TEST_CASE("voxelize - Grid properties")
{
    FeatureConfig cfg;
    const auto cloud = random_cloud(1, 5000);
    const auto g = voxelize(cloud, zone, ego, bs, cfg);
    CHECK(g.total() <= cloud.size());
    CHECK(g.total() == filter_points(cloud, zone, ego, cfg).size());
    for (int a = 0; a < 3; ++a)
    {
        CHECK(g.bs_bin[static_cast<std::size_t>(a)] >= 0);
    }
    CHECK(g.bs_bin[0] < g.nx);
    CHECK(g.bs_bin[1] < g.ny);
    CHECK(g.bs_bin[2] < g.nz);

    // Shape depends only on the bit widths.
    const auto g_small = voxelize(random_cloud(2, 10), zone, ego, bs, cfg);
    CHECK(g_small.counts.size() == g.counts.size());
    FeatureConfig coarse = cfg;
    coarse.b_x = 4;
    coarse.b_y = 5;
    coarse.b_z = 2;
    const auto gc = voxelize(cloud, zone, ego, bs, coarse);
    CHECK(gc.nx == 16);
    CHECK(gc.ny == 32);
    CHECK(gc.nz == 4);
    CHECK(gc.total() == g.total());

    // Point order does not matter.
    auto shuffled = cloud;
    auto rng = make_engine(3);
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    CHECK(same_grid(voxelize(shuffled, zone, ego, bs, cfg), g));

    // One extra kept point raises exactly one bin by one.
    PointCloud more = cloud;
    const Vec3 extra = ego + Vec3(2.0, -3.0, 1.0);
    more.points.push_back(extra);
    const auto gm = voxelize(more, zone, ego, bs, cfg);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < g.counts.size(); ++i)
        if (gm.counts[i] != g.counts[i])
        {
            ++changed;
            CHECK(gm.counts[i] == g.counts[i] + 1);
        }
    CHECK(changed == 1);
    const auto bin = zone_bin(zone, cfg, extra);
    CHECK(gm.at(bin[0], bin[1], bin[2]) == g.at(bin[0], bin[1], bin[2]) + 1);
}

TEST_CASE("featurize - Mislocalization shifts the whole cloud")
{
    FeatureConfig cfg;
    const auto cloud = random_cloud(4, 4000);
    // Without position error the pipeline is plain voxelization.
    CHECK(same_grid(featurize(cloud, ego, ego, zone, bs, cfg), voxelize(cloud, zone, ego, bs, cfg)));

    const Vec3 estimate = ego + Vec3(0.0, 6.4, 0.0);
    const auto pts = feature_points(cloud, ego, estimate, zone, cfg);
    const auto ref = filter_points(cloud, zone, ego, cfg);
    // A y shift keeps every in-range point in range; only the zone edge can cut.
    REQUIRE(pts.size() == ref.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK((pts.points[i] - (ref.points[i] + Vec3(0.0, 6.4, 0.0))).norm() < 1e-12);

    // Ground removal happens before the shift: a vertical error does not resurrect ground returns.
    PointCloud ground;
    ground.points = {ego + Vec3(3.0, 0.0, -1.45)};
    CHECK(feature_points(ground, ego, ego + Vec3(0.0, 0.0, 1.0), zone, cfg).size() == 0);

    const auto g = featurize(cloud, ego, estimate, zone, bs, cfg);
    CHECK(g.bs_bin == zone_bin(zone, cfg, bs));
    CHECK(g.total() == pts.size());
}

TEST_CASE("encode_input - Log scaling")
{
    HistogramGrid g;
    g.nx = 2;
    g.ny = 3;
    g.nz = 2;
    g.counts.assign(12, 0);
    auto t = encode_input(g);
    CHECK(t.channels == 2);
    CHECK(t.height == 2);
    CHECK(t.width == 3);
    CHECK(std::all_of(t.data.begin(), t.data.end(), [](double v) { return v == 0.0; }));

    g.counts[static_cast<std::size_t>((1 * 3 + 2) * 2 + 1)] = 255;
    g.counts[static_cast<std::size_t>((0 * 3 + 1) * 2 + 0)] = 15;
    g.counts[static_cast<std::size_t>((0 * 3 + 0) * 2 + 0)] = 100000;
    t = encode_input(g);
    CHECK(t.data[static_cast<std::size_t>((1 * 2 + 1) * 3 + 2)] == 1.0);
    CHECK(t.data[static_cast<std::size_t>((0 * 2 + 0) * 3 + 1)] == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(t.data[0] == 1.0);

    double prev = -1.0;
    for (std::uint32_t c = 0; c < 600; ++c)
    {
        g.counts[0] = c;
        const double v = encode_input(g).data[0];
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}
