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

#include "lidarbeam/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lidarbeam
{
    void FeatureConfig::validate() const
    {
        for (int b : {b_x, b_y, b_z})
            if (b < 1 || b > 12)
                throw Error(ErrorCode::config, "feature config: quantizer bits must be in [1, 12]");
        if (!(d_max > 0.0))
            throw Error(ErrorCode::config, "feature config: d_max must be positive");
        if (!(sigma_G >= 0.0))
            throw Error(ErrorCode::config, "feature config: sigma_G must be nonnegative");
    }

    std::uint64_t HistogramGrid::total() const
    {
        std::uint64_t s = 0;
        for (auto c : counts)
            s += c;
        return s;
    }

    Vec3 apply_gnss_noise(const Vec3 &p, double sigma_G, std::uint64_t seed)
    {
        if (!(sigma_G >= 0.0))
            throw Error(ErrorCode::invalid_argument, "apply_gnss_noise: sigma_G must be nonnegative");
        if (sigma_G == 0.0)
            return p;
        auto rng = make_engine(seed, {0x6e55});
        std::normal_distribution<double> n(0.0, sigma_G / std::sqrt(3.0));
        const double ex = n(rng);
        const double ey = n(rng);
        const double ez = n(rng);
        return p + Vec3(ex, ey, ez);
    }

    namespace
    {
        int quantize(double v, double lo, double hi, int bins)
        {
            const int idx = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
            return std::clamp(idx, 0, bins - 1);
        }

        bool keep(const Vec3 &p, const CoverageZone &zone, const Vec3 &ego, const FeatureConfig &cfg)
        {
            return p.z() >= cfg.ground_z_min && (p - ego).norm() <= cfg.d_max && zone.contains(p);
        }
    }

    std::array<int, 3> zone_bin(const CoverageZone &zone, const FeatureConfig &cfg, const Vec3 &p)
    {
        return {quantize(p.x(), zone.x1, zone.x2, cfg.nx()), quantize(p.y(), zone.y1, zone.y2, cfg.ny()),
                quantize(p.z(), 0.0, zone.h, cfg.nz())};
    }

    HistogramGrid voxelize(const PointCloud &cloud, const CoverageZone &zone, const Vec3 &ego,
                           const Vec3 &bs_position, const FeatureConfig &cfg)
    {
        cfg.validate();
        if (!zone.valid())
            throw Error(ErrorCode::invalid_argument, "voxelize: invalid coverage zone");
        HistogramGrid g;
        g.nx = cfg.nx();
        g.ny = cfg.ny();
        g.nz = cfg.nz();
        g.counts.assign(static_cast<std::size_t>(g.nx) * g.ny * g.nz, 0u);
        g.bs_bin = zone_bin(zone, cfg, bs_position);
        for (const auto &p : cloud.points)
        {
            if (!keep(p, zone, ego, cfg))
                continue;
            const auto b = zone_bin(zone, cfg, p);
            ++g.counts[static_cast<std::size_t>((b[0] * g.ny + b[1]) * g.nz + b[2])];
        }
        return g;
    }

    PointCloud relocate(const PointCloud &cloud, const Vec3 &true_ego, const Vec3 &estimated_ego)
    {
        PointCloud out;
        out.points.reserve(cloud.points.size());
        const Vec3 shift = estimated_ego - true_ego;
        for (const auto &p : cloud.points)
            out.points.push_back(p + shift);
        return out;
    }

    PointCloud filter_points(const PointCloud &cloud, const CoverageZone &zone, const Vec3 &ego,
                             const FeatureConfig &cfg)
    {
        PointCloud out;
        for (const auto &p : cloud.points)
            if (keep(p, zone, ego, cfg))
                out.points.push_back(p);
        return out;
    }

    PointCloud feature_points(const PointCloud &cloud, const Vec3 &true_ego, const Vec3 &estimated_ego,
                              const CoverageZone &zone, const FeatureConfig &cfg)
    {
        cfg.validate();
        PointCloud above;
        above.points.reserve(cloud.points.size());
        for (const auto &p : cloud.points)
            if (p.z() >= cfg.ground_z_min)
                above.points.push_back(p);
        FeatureConfig rest = cfg;
        rest.ground_z_min = -std::numeric_limits<double>::infinity();
        return filter_points(relocate(above, true_ego, estimated_ego), zone, estimated_ego, rest);
    }

    HistogramGrid featurize(const PointCloud &cloud, const Vec3 &true_ego, const Vec3 &estimated_ego,
                            const CoverageZone &zone, const Vec3 &bs_position, const FeatureConfig &cfg)
    {
        FeatureConfig rest = cfg;
        rest.ground_z_min = -std::numeric_limits<double>::infinity();
        return voxelize(feature_points(cloud, true_ego, estimated_ego, zone, cfg), zone, estimated_ego, bs_position,
                        rest);
    }

    InputTensor encode_input(const HistogramGrid &grid)
    {
        InputTensor t;
        t.channels = grid.nz;
        t.height = grid.nx;
        t.width = grid.ny;
        t.data.assign(grid.counts.size(), 0.0);
        const double norm = std::log(256.0);
        for (int i = 0; i < grid.nx; ++i)
            for (int j = 0; j < grid.ny; ++j)
                for (int k = 0; k < grid.nz; ++k)
                {
                    const auto c = grid.at(i, j, k);
                    if (c == 0)
                        continue;
                    const double v = c >= 255 ? 1.0 : std::log1p(static_cast<double>(c)) / norm;
                    t.data[static_cast<std::size_t>((k * grid.nx + i) * grid.ny + j)] = v;
                }
        return t;
    }
}
