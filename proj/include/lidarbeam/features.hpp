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

#include "lidarbeam/lidar.hpp"

#include <array>
#include <vector>

namespace lidarbeam
{
    struct FeatureConfig
    {
        int b_x = 6, b_y = 6, b_z = 3;
        double d_max = 25.0;       // meters from the (estimated) vehicle position
        double ground_z_min = 0.1; // points below are ground reflections
        double sigma_G = 0.0;      // GNSS position error std, meters

        void validate() const;
        int nx() const { return 1 << b_x; }
        int ny() const { return 1 << b_y; }
        int nz() const { return 1 << b_z; }
    };

    // Fixed 2^b_x x 2^b_y x 2^b_z count grid over the coverage zone.
    struct HistogramGrid
    {
        int nx = 0, ny = 0, nz = 0;
        std::vector<std::uint32_t> counts; // index (i*ny + j)*nz + k
        std::array<int, 3> bs_bin{0, 0, 0};

        std::uint32_t at(int i, int j, int k) const
        {
            return counts[static_cast<std::size_t>((i * ny + j) * nz + k)];
        }
        std::uint64_t total() const;
    };

    // Input tensor for the network: channel-major (k, i, j).
    struct InputTensor
    {
        int channels = 0, height = 0, width = 0;
        std::vector<double> data;
    };

    // p + eps with eps ~ N(0, sigma_G^2/3) per component.
    Vec3 apply_gnss_noise(const Vec3 &p, double sigma_G, std::uint64_t seed);

    // Bin of a point inside the zone (upper edges clamp to the last bin).
    std::array<int, 3> zone_bin(const CoverageZone &zone, const FeatureConfig &cfg, const Vec3 &p);

    // Drops ground returns, points farther than d_max from `ego`, and points
    // outside the zone, then counts the rest per bin.
    HistogramGrid voxelize(const PointCloud &cloud, const CoverageZone &zone, const Vec3 &ego,
                           const Vec3 &bs_position, const FeatureConfig &cfg);

    // Moves a world-frame cloud captured at `true_ego` so it is anchored at `estimated_ego`.
    PointCloud relocate(const PointCloud &cloud, const Vec3 &true_ego, const Vec3 &estimated_ego);

    // Points surviving the same filters voxelize applies (ground, d_max, zone).
    PointCloud filter_points(const PointCloud &cloud, const CoverageZone &zone, const Vec3 &ego,
                             const FeatureConfig &cfg);

    // Mislocalized view of a world-frame scan: ground returns are removed in the
    // vehicle frame, the cloud is moved to `estimated_ego`, then the d_max and
    // zone filters run around the estimate. Returns the surviving points.
    PointCloud feature_points(const PointCloud &cloud, const Vec3 &true_ego, const Vec3 &estimated_ego,
                              const CoverageZone &zone, const FeatureConfig &cfg);

    // Histogram of feature_points.
    HistogramGrid featurize(const PointCloud &cloud, const Vec3 &true_ego, const Vec3 &estimated_ego,
                            const CoverageZone &zone, const Vec3 &bs_position, const FeatureConfig &cfg);

    // value = log(1 + min(count, 255)) / log(256); z-slices become channels.
    InputTensor encode_input(const HistogramGrid &grid);
}
