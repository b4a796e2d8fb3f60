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
#include "lidarbeam/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

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

    Cuboid ground_plane()
    {
        return box(Vec3(-1e3, -1e3, 0), Vec3(1e3, 1e3, 0), ObstacleKind::ground);
    }

    RayTraceConfig deterministic(int max_order)
    {
        RayTraceConfig cfg;
        cfg.max_order = max_order;
        cfg.random_phase = false;
        cfg.cap = 1000;
        return cfg;
    }

    // Brute-force specular point on z = 0 between two points above it.
    double ground_bounce_length(const Vec3 &a, const Vec3 &b)
    {
        double lo = 0.0, hi = 1.0;
        auto len = [&](double s) {
            const Vec3 g = a + s * (b - a);
            const Vec3 p(g.x(), g.y(), 0.0);
            return (a - p).norm() + (p - b).norm();
        };
        for (int it = 0; it < 200; ++it)
        {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (len(m1) < len(m2))
                hi = m2;
            else
                lo = m1;
        }
        return len(0.5 * (lo + hi));
    }
}

TEST_CASE("trace_mpcs - Free space")
{
    Scene s;
    const auto mpcs = trace_mpcs(s, Vec3(0, 0, 0), Vec3(100, 0, 0), deterministic(2));
    REQUIRE(mpcs.size() == 1);
    CHECK(mpcs[0].is_los);
    CHECK(mpcs[0].order == 0);
    CHECK(mpcs[0].tau == Catch::Approx(100.0 / speed_of_light).epsilon(1e-12));
    CHECK(mpcs[0].tau * 1e9 == Catch::Approx(333.564).margin(1e-3));
    CHECK(std::abs(mpcs[0].alpha) == Catch::Approx(speed_of_light / (4.0 * pi * 60e9 * 100.0)).epsilon(1e-12));
    // 3.9789e-6 with c rounded to 3e8; the exact speed of light gives 3.9761e-6.
    CHECK(std::abs(mpcs[0].alpha) == Catch::Approx(3.9761e-6).epsilon(1e-4));
    CHECK(mpcs[0].phi_D == Catch::Approx(0.0).margin(1e-12));
    CHECK(std::abs(std::abs(mpcs[0].phi_A) - pi) < 1e-12);
}

TEST_CASE("trace_mpcs - Ground bounce via the image method")
{
    Scene s;
    s.obstacles.push_back(ground_plane());
    const Vec3 tx(0, 0, 4), rx(10, 0, 1.5);
    const auto mpcs = trace_mpcs(s, tx, rx, deterministic(1));
    REQUIRE(mpcs.size() == 2);
    const auto &bounce = mpcs[0].order == 1 ? mpcs[0] : mpcs[1];
    REQUIRE(bounce.order == 1);
    const double length = bounce.tau * speed_of_light;
    CHECK(std::abs(length - std::sqrt(100.0 + 5.5 * 5.5)) < 1e-6);
    CHECK(std::abs(length - 11.4127) < 1e-4);
    CHECK(std::abs(length - ground_bounce_length(tx, rx)) < 1e-6);
    CHECK(std::abs(length - (rx - Vec3(0, 0, -4)).norm()) < 1e-9);
    // Departure points down, arrival looks down at the image of tx.
    CHECK(bounce.theta_D < 0.0);
    CHECK(bounce.theta_A < 0.0);
    CHECK(std::abs(bounce.alpha) ==
          Catch::Approx(0.5 * speed_of_light / (4.0 * pi * 60e9 * length)).epsilon(1e-12));
}

TEST_CASE("trace_mpcs - Blocked line of sight")
{
    Scene s;
    s.obstacles.push_back(box(Vec3(4, -5, -5), Vec3(5, 5, 5)));
    CHECK(trace_mpcs(s, Vec3(0, 0, 0), Vec3(10, 0, 0), deterministic(0)).empty());
    CHECK_THROWS_AS(trace_mpcs(s, Vec3(0, 0, 0), Vec3(0, 0, 0), deterministic(0)), Error);
    auto bad = deterministic(3);
    CHECK_THROWS_AS(trace_mpcs(s, Vec3(0, 0, 0), Vec3(1, 0, 0), bad), Error);
}

TEST_CASE("link_state - Examples")
{
    Mpc los;
    los.order = 0;
    los.is_los = true;
    los.alpha = 1.0;
    Mpc ref;
    ref.order = 1;
    ref.alpha = 0.5;
    CHECK(link_state({los}) == LinkState::los);
    CHECK(link_state({ref, ref}) == LinkState::nlos);
    CHECK(link_state({}) == LinkState::outage);
    CHECK(link_state({ref, los}) == LinkState::los);
}

TEST_CASE("trace_mpcs - Path invariants on generated scenes")
{
    SceneConfig sc;
    auto cfg = deterministic(2);
    cfg.cap = 25;
    int los_links = 0, nlos_links = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed)
    {
        const auto s = generate_scene(sc, seed);
        const auto mpcs = trace_mpcs(s, s.bs_position, s.ego_position, cfg);
        CHECK(mpcs.size() <= cfg.cap);
        const bool los = is_los(s, s.bs_position, s.ego_position);
        CHECK((link_state(mpcs) == LinkState::los) == los);
        (los ? los_links : nlos_links) += 1;
        const double straight = (s.ego_position - s.bs_position).norm() / speed_of_light;
        for (std::size_t i = 0; i < mpcs.size(); ++i)
        {
            const auto &m = mpcs[i];
            CHECK(m.tau >= straight - 1e-15);
            CHECK(std::abs(m.alpha) > 0.0);
            CHECK((m.order == 0) == m.is_los);
            if (i > 0)
                CHECK(std::abs(mpcs[i - 1].alpha) >= std::abs(m.alpha));
        }
        if (los)
        {
            const auto it = std::find_if(mpcs.begin(), mpcs.end(), [](const Mpc &m) { return m.is_los; });
            REQUIRE(it != mpcs.end());
            for (const auto &m : mpcs)
                CHECK(it->tau <= m.tau);
        }
    }
    CHECK(los_links > 0);
}

TEST_CASE("trace_mpcs - Paths re-simulated with ray_cast are unobstructed")
{
    SceneConfig sc;
    auto cfg = deterministic(2);
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 15; ++seed)
    {
        const auto s = generate_scene(sc, seed);
        const Vec3 tx = s.bs_position, rx = s.ego_position;
        for (const auto &m : trace_mpcs(s, tx, rx, cfg))
        {
            Vec3 p = tx;
            Vec3 d = angles_direction(m.phi_D, m.theta_D);
            double travelled = 0.0;
            bool ok = true;
            std::optional<std::size_t> left; // a convex box cannot be hit again right after bouncing off it
            for (int b = 0; b < m.order && ok; ++b)
            {
                const auto hit = ray_cast(s, p, d, 1e4, left);
                if (!hit)
                {
                    ok = false;
                    break;
                }
                travelled += hit->distance;
                p = hit->point;
                left = hit->obstacle;
                d = d - 2.0 * d.dot(hit->face_normal) * hit->face_normal;
            }
            REQUIRE(ok);
            const Vec3 last = rx - p;
            travelled += last.norm();
            CHECK((last.normalized() - d).norm() < 1e-6);
            CHECK(is_los(s, p, rx));
            CHECK(std::abs(travelled - m.tau * speed_of_light) < 1e-6);
            const auto arrival = angles_direction(m.phi_A, m.theta_A);
            CHECK((arrival + d).norm() < 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("trace_mpcs - Reciprocity")
{
    SceneConfig sc;
    auto cfg = deterministic(2);
    for (std::uint64_t seed = 0; seed < 15; ++seed)
    {
        const auto s = generate_scene(sc, seed);
        auto fwd = trace_mpcs(s, s.bs_position, s.ego_position, cfg);
        auto rev = trace_mpcs(s, s.ego_position, s.bs_position, cfg);
        REQUIRE(fwd.size() == rev.size());
        auto by_delay = [](const Mpc &a, const Mpc &b) { return a.tau < b.tau; };
        std::sort(fwd.begin(), fwd.end(), by_delay);
        std::sort(rev.begin(), rev.end(), by_delay);
        for (std::size_t i = 0; i < fwd.size(); ++i)
        {
            CHECK(std::abs(fwd[i].tau - rev[i].tau) * speed_of_light < 1e-9);
            CHECK(std::abs(std::abs(fwd[i].alpha) - std::abs(rev[i].alpha)) <= 1e-9 * std::abs(fwd[i].alpha));
            CHECK(fwd[i].order == rev[i].order);
            const Vec3 fd = angles_direction(fwd[i].phi_D, fwd[i].theta_D);
            const Vec3 ra = angles_direction(rev[i].phi_A, rev[i].theta_A);
            const Vec3 fa = angles_direction(fwd[i].phi_A, fwd[i].theta_A);
            const Vec3 rd = angles_direction(rev[i].phi_D, rev[i].theta_D);
            CHECK((fd - ra).norm() < 1e-9);
            CHECK((fa - rd).norm() < 1e-9);
        }
    }
}

TEST_CASE("cap_paths - Keeps the strongest subset")
{
    auto rng = make_engine(55);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> coarse(1, 4);
    for (int trial = 0; trial < 300; ++trial)
    {
        const int n = 7;
        const std::size_t cap = 3;
        MpcList list(n);
        for (auto &m : list)
        {
            m.alpha = std::polar(0.25 * coarse(rng), 2.0 * pi * U(rng)); // ties are common
            m.tau = U(rng);
            m.order = 1;
        }
        auto kept = list;
        cap_paths(kept, cap);
        REQUIRE(kept.size() == cap);
        double kept_power = 0.0;
        for (const auto &m : kept)
            kept_power += std::norm(m.alpha);
        for (int mask = 0; mask < (1 << n); ++mask)
        {
            if (__builtin_popcount(static_cast<unsigned>(mask)) != static_cast<int>(cap))
                continue;
            double p = 0.0;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i))
                    p += std::norm(list[static_cast<std::size_t>(i)].alpha);
            CHECK(kept_power >= p - 1e-15);
        }
        for (std::size_t i = 1; i < kept.size(); ++i)
        {
            const double a = std::abs(kept[i - 1].alpha), b = std::abs(kept[i].alpha);
            CHECK(a >= b);
            if (a == b)
                CHECK(kept[i - 1].tau <= kept[i].tau);
        }
    }
}

TEST_CASE("trace_mpcs - Random phase leaves magnitudes and delays alone")
{
    const auto s = generate_scene(SceneConfig{}, 4);
    auto a_cfg = deterministic(2);
    auto b_cfg = a_cfg;
    b_cfg.random_phase = true;
    b_cfg.phase_seed = 99;
    const auto a = trace_mpcs(s, s.bs_position, s.ego_position, a_cfg);
    const auto b = trace_mpcs(s, s.bs_position, s.ego_position, b_cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(std::abs(a[i].alpha) == Catch::Approx(std::abs(b[i].alpha)).epsilon(1e-14));
        CHECK(a[i].tau == b[i].tau);
    }
    const auto c = trace_mpcs(s, s.bs_position, s.ego_position, b_cfg);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(b[i].alpha == c[i].alpha);
}
