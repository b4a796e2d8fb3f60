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

#pragma once

#include "lidarbeam/common.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lidarbeam
{
    enum class ObstacleKind : std::uint8_t
    {
        building = 0,
        vehicle = 1,
        ground = 2
    };

    // Axis-aligned box. Ground cuboids have zero z-extent; everything else is strictly positive.
    struct Cuboid
    {
        Vec3 min_corner = Vec3::Zero();
        Vec3 max_corner = Vec3::Zero();
        ObstacleKind kind = ObstacleKind::building;

        bool valid() const;
        Vec3 center() const { return 0.5 * (min_corner + max_corner); }
        bool contains(const Vec3 &p, double tol = 0.0) const;
    };

    // The cuboid (x1,y1)-(x2,y2) x [0,h] the base station broadcasts as its coverage zone.
    struct CoverageZone
    {
        double x1 = 0.0, y1 = 0.0, x2 = 1.0, y2 = 1.0, h = 1.0;

        bool valid() const { return x1 < x2 && y1 < y2 && h > 0.0; }
        bool contains(const Vec3 &p) const
        {
            return p.x() >= x1 && p.x() <= x2 && p.y() >= y1 && p.y() <= y2 && p.z() >= 0.0 && p.z() <= h;
        }
    };

    struct Lane
    {
        double x = 0.0;     // lane center line, meters
        int direction = 1;  // +1 drives towards +y, -1 towards -y
    };

    struct SizeClass
    {
        std::string name;
        double length = 4.5; // along the lane (y)
        double width = 1.8;  // across the lane (x)
        double height = 1.5;
        double weight = 1.0; // relative sampling weight
    };

    // Street canyon along +y between two rows of buildings. The street occupies
    // x in [0, canyon_width_m]; buildings sit at x < 0 and x > canyon_width_m.
    // Defaults are a desk-scale stand-in and are not measured values.
    struct SceneConfig
    {
        double canyon_length_m = 160.0;
        double canyon_width_m = 30.0;
        std::array<double, 2> building_height_range_m{10.0, 60.0};
        std::array<double, 2> building_width_range_m{15.0, 40.0};
        std::array<double, 2> building_gap_range_m{0.0, 6.0};
        double building_depth_m = 20.0;
        std::vector<Lane> lanes{{7.0, 1}, {11.0, 1}, {19.0, -1}, {23.0, -1}};
        double slot_length_m = 12.0;
        std::array<int, 2> vehicle_count_range{10, 30};
        std::vector<SizeClass> size_classes{{"car", 4.5, 1.8, 1.5, 0.65},
                                            {"truck", 9.0, 2.5, 3.6, 0.2},
                                            {"bus", 11.5, 2.6, 3.2, 0.15}};
        Vec3 bs_position{1.0, 80.0, 4.0};
        CoverageZone zone{-2.0, 0.0, 32.0, 160.0, 8.0};
        bool ground = true;

        // Throws Error(config) naming the offending field.
        void validate() const;
        int slots_per_lane() const;
    };

    struct Scene
    {
        std::vector<Cuboid> obstacles;
        std::optional<std::size_t> ego_index; // obstacle index of the ego vehicle
        Vec3 bs_position = Vec3::Zero();     // P_b, base-station antenna
        Vec3 ego_position = Vec3::Zero();    // P_v, top-center of the ego vehicle (receiver antenna)
        double ego_heading = 0.0;            // radians, azimuth of the driving direction
        std::uint64_t rng_seed = 0;
        CoverageZone zone;

        const Cuboid *ego() const { return ego_index ? &obstacles[*ego_index] : nullptr; }
        std::size_t count(ObstacleKind kind) const;
    };

    struct Hit
    {
        double distance = 0.0;
        Vec3 point = Vec3::Zero();
        Vec3 face_normal = Vec3::Zero();
        std::size_t obstacle = 0;
    };

    // Randomized canyon: buildings on both sides, vehicles dropped into free lane
    // slots. The first vehicle is the ego. Pure function of (config, seed).
    Scene generate_scene(const SceneConfig &config, std::uint64_t seed);

    // Nearest entry into a closed cuboid along the ray within max_range. Cuboids
    // containing the origin are ignored. `direction` must be unit norm (1e-9).
    std::optional<Hit> ray_cast(const Scene &scene, const Vec3 &origin, const Vec3 &direction, double max_range,
                                std::optional<std::size_t> exclude = std::nullopt);

    // Same as ray_cast restricted to the listed obstacle indices.
    std::optional<Hit> ray_cast(const Scene &scene, std::span<const std::uint32_t> candidates, const Vec3 &origin,
                                const Vec3 &direction, double max_range);

    // True iff the open segment (a,b) passes through the interior of the cuboid.
    // Penetrations shorter than `tol` meters count as grazing.
    bool segment_penetrates(const Cuboid &box, const Vec3 &a, const Vec3 &b, double tol = 1e-9);

    // True iff the open segment (a,b) penetrates no building or vehicle. The ego
    // cuboid is skipped when either endpoint touches it (antenna on the roof).
    bool is_los(const Scene &scene, const Vec3 &a, const Vec3 &b);

}
