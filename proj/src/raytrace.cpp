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

#include "lidarbeam/raytrace.hpp"

#include <algorithm>
#include <cmath>

namespace lidarbeam
{
    namespace
    {
        struct Face
        {
            int axis;      // plane normal axis
            double value;  // plane coordinate
            double sign;   // +1 when the outward normal points along +axis
            int u, w;      // in-plane axes
            double u_lo, u_hi, w_lo, w_hi;
            std::size_t obstacle;

            bool outside(const Vec3 &p) const { return (p[axis] - value) * sign > 0.0; }
            Vec3 mirror(const Vec3 &p) const
            {
                Vec3 m = p;
                m[axis] = 2.0 * value - p[axis];
                return m;
            }
            bool in_rect(const Vec3 &p) const
            {
                constexpr double tol = 1e-9;
                return p[u] >= u_lo - tol && p[u] <= u_hi + tol && p[w] >= w_lo - tol && p[w] <= w_hi + tol;
            }
            // Point where the segment a->b crosses the plane; a and b on opposite sides.
            std::optional<Vec3> cross(const Vec3 &a, const Vec3 &b) const
            {
                const double den = b[axis] - a[axis];
                if (den == 0.0)
                    return std::nullopt;
                const double t = (value - a[axis]) / den;
                if (!(t > 0.0 && t < 1.0))
                    return std::nullopt;
                Vec3 p = a + t * (b - a);
                p[axis] = value;
                if (!in_rect(p))
                    return std::nullopt;
                return p;
            }
        };

        std::vector<Face> collect_faces(const Scene &scene)
        {
            std::vector<Face> faces;
            for (std::size_t i = 0; i < scene.obstacles.size(); ++i)
            {
                if (scene.ego_index && *scene.ego_index == i)
                    continue;
                const auto &c = scene.obstacles[i];
                for (int axis = 0; axis < 3; ++axis)
                {
                    const int u = (axis + 1) % 3, w = (axis + 2) % 3;
                    for (int side = 0; side < 2; ++side)
                    {
                        if (c.kind == ObstacleKind::ground && !(axis == 2 && side == 1))
                            continue;
                        Face f;
                        f.axis = axis;
                        f.value = side ? c.max_corner[axis] : c.min_corner[axis];
                        f.sign = side ? 1.0 : -1.0;
                        f.u = u;
                        f.w = w;
                        f.u_lo = c.min_corner[u];
                        f.u_hi = c.max_corner[u];
                        f.w_lo = c.min_corner[w];
                        f.w_hi = c.max_corner[w];
                        f.obstacle = i;
                        faces.push_back(f);
                    }
                }
            }
            return faces;
        }

        Mpc make_path(const std::vector<Vec3> &points, int order, const RayTraceConfig &cfg)
        {
            double length = 0.0;
            for (std::size_t i = 1; i < points.size(); ++i)
                length += (points[i] - points[i - 1]).norm();
            Mpc m;
            m.order = order;
            m.is_los = order == 0;
            m.tau = length / speed_of_light;
            const double mag = speed_of_light / (4.0 * pi * cfg.carrier_hz * length) *
                               std::pow(cfg.reflection_magnitude, order);
            const double phase = order * cfg.reflection_phase - 2.0 * pi * std::fmod(cfg.carrier_hz * m.tau, 1.0);
            m.alpha = std::polar(mag, phase);
            std::tie(m.phi_D, m.theta_D) = direction_angles((points[1] - points[0]).normalized());
            std::tie(m.phi_A, m.theta_A) =
                direction_angles((points[points.size() - 2] - points.back()).normalized());
            return m;
        }
    }

    void RayTraceConfig::validate() const
    {
        if (max_order < 0 || max_order > 2)
            throw Error(ErrorCode::config, "raytrace config: max_order must be 0, 1 or 2");
        if (!(carrier_hz > 0.0))
            throw Error(ErrorCode::config, "raytrace config: carrier_hz must be positive");
        if (cap < 1)
            throw Error(ErrorCode::config, "raytrace config: cap must be at least 1");
        if (!(reflection_magnitude > 0.0 && reflection_magnitude <= 1.0))
            throw Error(ErrorCode::config, "raytrace config: reflection_magnitude must be in (0, 1]");
    }

    const char *to_string(LinkState s)
    {
        switch (s)
        {
        case LinkState::los:
            return "LOS";
        case LinkState::nlos:
            return "NLOS";
        case LinkState::outage:
            return "outage";
        }
        return "?";
    }

    std::pair<double, double> direction_angles(const Vec3 &unit)
    {
        const double el = std::asin(std::clamp(unit.z(), -1.0, 1.0));
        const double az = std::atan2(unit.y(), unit.x());
        return {az, el};
    }

    Vec3 angles_direction(double azimuth, double elevation)
    {
        return Vec3(std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                    std::sin(elevation));
    }

    void cap_paths(MpcList &mpcs, std::size_t cap)
    {
        std::stable_sort(mpcs.begin(), mpcs.end(), [](const Mpc &a, const Mpc &b) {
            const double ma = std::abs(a.alpha), mb = std::abs(b.alpha);
            if (ma != mb)
                return ma > mb;
            return a.tau < b.tau;
        });
        if (mpcs.size() > cap)
            mpcs.resize(cap);
    }

    MpcList trace_mpcs(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const RayTraceConfig &config)
    {
        config.validate();
        if ((tx - rx).norm() == 0.0)
            throw Error(ErrorCode::invalid_argument, "trace_mpcs: tx and rx coincide");

        MpcList paths;
        if (is_los(scene, tx, rx))
            paths.push_back(make_path({tx, rx}, 0, config));

        if (config.max_order >= 1)
        {
            const auto faces = collect_faces(scene);

            for (const auto &f : faces)
            {
                if (!f.outside(tx) || !f.outside(rx))
                    continue;
                auto p = f.cross(f.mirror(tx), rx);
                if (!p || !is_los(scene, tx, *p) || !is_los(scene, *p, rx))
                    continue;
                paths.push_back(make_path({tx, *p, rx}, 1, config));
            }

            if (config.max_order >= 2)
            {
                for (const auto &f1 : faces)
                {
                    if (!f1.outside(tx))
                        continue;
                    const Vec3 img1 = f1.mirror(tx);
                    for (const auto &f2 : faces)
                    {
                        if (f2.obstacle == f1.obstacle || !f2.outside(rx))
                            continue;
                        const Vec3 img2 = f2.mirror(img1);
                        if (f2.outside(img2) == f2.outside(rx))
                            continue;
                        auto p2 = f2.cross(img2, rx);
                        if (!p2 || !f1.outside(*p2))
                            continue;
                        auto p1 = f1.cross(img1, *p2);
                        if (!p1 || !f2.outside(*p1))
                            continue;
                        if (!is_los(scene, tx, *p1) || !is_los(scene, *p1, *p2) || !is_los(scene, *p2, rx))
                            continue;
                        paths.push_back(make_path({tx, *p1, *p2, rx}, 2, config));
                    }
                }
            }
        }

        cap_paths(paths, config.cap);

        if (config.random_phase)
        {
            auto rng = make_engine(config.phase_seed, {0x9a5e});
            std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
            for (auto &m : paths)
                m.alpha *= std::polar(1.0, phase(rng));
        }
        return paths;
    }

    LinkState link_state(const MpcList &mpcs)
    {
        if (mpcs.empty())
            return LinkState::outage;
        for (const auto &m : mpcs)
            if (m.is_los)
                return LinkState::los;
        return LinkState::nlos;
    }
}
