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

#include "lidarbeam/scene.hpp"

#include <iosfwd>
#include <vector>

namespace lidarbeam
{
    // Rotating multi-channel LIDAR on the ego roof. Defaults follow a 64-channel
    // HDL-64E2-class unit; the elevation fan is a uniform stand-in.
    struct LidarConfig
    {
        double azimuth_resolution_deg = 0.1728;
        std::vector<double> elevation_angles_deg = default_elevation_fan();
        double max_range = 120.0;
        double sensor_height_offset = 1.0; // above the top-center of the ego vehicle
        double sigma_L = 0.1;              // meters; per-axis variance is sigma_L^2 / 3

        static std::vector<double> default_elevation_fan(); // 64 channels in [-24.8, +2.0] degrees
        void validate() const;
        int azimuth_steps() const;
    };

    struct PointCloud
    {
        std::vector<Vec3> points; // world coordinates, meters

        std::size_t size() const { return points.size(); }
        bool empty() const { return points.empty(); }
    };

    Vec3 sensor_origin(const Scene &scene, const LidarConfig &config);

    // One ray per (azimuth step, elevation channel), azimuth-major. Each return is
    // the hit point plus i.i.d. N(0, sigma_L^2/3) noise on every coordinate.
    // The ego vehicle never produces returns.
    PointCloud scan(const Scene &scene, const LidarConfig &config, std::uint64_t seed);

    // One "x y z" line per point with 6 decimals.
    void write_xyz(const PointCloud &cloud, std::ostream &out);
    PointCloud read_xyz(std::istream &in);
}
