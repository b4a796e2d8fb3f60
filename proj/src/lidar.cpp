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

#include "lidarbeam/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace lidarbeam
{
    std::vector<double> LidarConfig::default_elevation_fan()
    {
        constexpr int channels = 64;
        constexpr double lo = -24.8, hi = 2.0;
        std::vector<double> fan(channels);
        for (int i = 0; i < channels; ++i)
            fan[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (channels - 1);
        return fan;
    }

    void LidarConfig::validate() const
    {
        if (!(azimuth_resolution_deg > 0.0 && azimuth_resolution_deg <= 360.0))
            throw Error(ErrorCode::config, "lidar config: azimuth_resolution_deg must be in (0, 360]");
        if (!(sigma_L >= 0.0))
            throw Error(ErrorCode::config, "lidar config: sigma_L must be nonnegative");
        if (!(max_range > 0.0))
            throw Error(ErrorCode::config, "lidar config: max_range must be positive");
        for (double e : elevation_angles_deg)
            if (!(e > -90.0 && e < 90.0))
                throw Error(ErrorCode::config, "lidar config: elevation angles must lie in (-90, 90) degrees");
    }

    int LidarConfig::azimuth_steps() const
    {
        return static_cast<int>(std::ceil(360.0 / azimuth_resolution_deg - 1e-9));
    }

    Vec3 sensor_origin(const Scene &scene, const LidarConfig &config)
    {
        return scene.ego_position + Vec3(0.0, 0.0, config.sensor_height_offset);
    }

    namespace
    {
        // Per-azimuth-bin candidate lists. An obstacle is listed in every bin its
        // xy footprint can subtend (padded by one bin on each side); obstacles whose
        // footprint contains the sensor are listed everywhere.
        std::vector<std::vector<std::uint32_t>> azimuth_bins(const Scene &scene, const Vec3 &origin, double heading,
                                                             int steps, double step_rad)
        {
            std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(steps));
            const double two_pi = 2.0 * pi;
            for (std::size_t i = 0; i < scene.obstacles.size(); ++i)
            {
                if (scene.ego_index && *scene.ego_index == i)
                    continue;
                const auto &c = scene.obstacles[i];
                const auto idx = static_cast<std::uint32_t>(i);
                const bool inside = origin.x() >= c.min_corner.x() && origin.x() <= c.max_corner.x() &&
                                    origin.y() >= c.min_corner.y() && origin.y() <= c.max_corner.y();
                if (inside)
                {
                    for (auto &b : bins)
                        b.push_back(idx);
                    continue;
                }
                const double cx = c.center().x() - origin.x(), cy = c.center().y() - origin.y();
                const double mid = std::atan2(cy, cx);
                double lo = 0.0, hi = 0.0;
                for (int k = 0; k < 4; ++k)
                {
                    const double px = (k & 1 ? c.max_corner.x() : c.min_corner.x()) - origin.x();
                    const double py = (k & 2 ? c.max_corner.y() : c.min_corner.y()) - origin.y();
                    double rel = std::atan2(py, px) - mid;
                    rel = std::remainder(rel, two_pi);
                    lo = std::min(lo, rel);
                    hi = std::max(hi, rel);
                }
                // Bin i covers azimuth heading + i*step; convert to bin coordinates.
                const double start = (mid + lo - heading) / step_rad;
                const double stop = (mid + hi - heading) / step_rad;
                const long first = static_cast<long>(std::floor(start)) - 1;
                const long last = static_cast<long>(std::ceil(stop)) + 1;
                if (last - first + 1 >= steps)
                {
                    for (auto &b : bins)
                        b.push_back(idx);
                    continue;
                }
                for (long k = first; k <= last; ++k)
                {
                    long m = k % steps;
                    if (m < 0)
                        m += steps;
                    bins[static_cast<std::size_t>(m)].push_back(idx);
                }
            }
            return bins;
        }
    }

    PointCloud scan(const Scene &scene, const LidarConfig &config, std::uint64_t seed)
    {
        config.validate();
        PointCloud cloud;
        if (scene.obstacles.empty())
            return cloud;

        const Vec3 origin = sensor_origin(scene, config);
        const int steps = config.azimuth_steps();
        const double step_rad = config.azimuth_resolution_deg * pi / 180.0;
        const auto bins = azimuth_bins(scene, origin, scene.ego_heading, steps, step_rad);

        std::vector<double> cos_el, sin_el;
        for (double e : config.elevation_angles_deg)
        {
            cos_el.push_back(std::cos(e * pi / 180.0));
            sin_el.push_back(std::sin(e * pi / 180.0));
        }

        auto rng = make_engine(seed, {0x11da7});
        std::normal_distribution<double> noise(0.0, config.sigma_L / std::sqrt(3.0));
        const bool noisy = config.sigma_L > 0.0;

        cloud.points.reserve(static_cast<std::size_t>(steps) * cos_el.size());
        for (int i = 0; i < steps; ++i)
        {
            const auto &cand = bins[static_cast<std::size_t>(i)];
            if (cand.empty())
                continue;
            const double az = scene.ego_heading + i * step_rad;
            const double ca = std::cos(az), sa = std::sin(az);
            for (std::size_t e = 0; e < cos_el.size(); ++e)
            {
                const Vec3 dir(cos_el[e] * ca, cos_el[e] * sa, sin_el[e]);
                auto hit = ray_cast(scene, cand, origin, dir, config.max_range);
                if (!hit)
                    continue;
                Vec3 p = hit->point;
                if (noisy)
                {
                    const double nx = noise(rng);
                    const double ny = noise(rng);
                    const double nz = noise(rng);
                    p += Vec3(nx, ny, nz);
                }
                cloud.points.push_back(p);
            }
        }
        return cloud;
    }

    void write_xyz(const PointCloud &cloud, std::ostream &out)
    {
        char line[128];
        for (const auto &p : cloud.points)
        {
            const int n = std::snprintf(line, sizeof line, "%.6f %.6f %.6f\n", p.x(), p.y(), p.z());
            out.write(line, n);
        }
    }

    PointCloud read_xyz(std::istream &in)
    {
        PointCloud cloud;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty())
                continue;
            std::istringstream ss(line);
            double x, y, z;
            if (!(ss >> x >> y >> z))
                throw Error(ErrorCode::format, "xyz: malformed line " + std::to_string(lineno));
            cloud.points.emplace_back(x, y, z);
        }
        return cloud;
    }
}
