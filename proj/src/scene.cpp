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

#include "lidarbeam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lidarbeam
{
    namespace
    {
        [[noreturn]] void config_error(const std::string &field, const std::string &why)
        {
            throw Error(ErrorCode::config, "scene config: " + field + " " + why);
        }

        void check_range(const std::array<double, 2> &r, const char *field, bool allow_zero)
        {
            if (!(r[0] <= r[1]) || r[0] < 0.0 || (!allow_zero && r[0] <= 0.0))
                config_error(field, "must be an ordered range of " + std::string(allow_zero ? "nonnegative" : "positive") + " values");
        }

        constexpr double kInf = std::numeric_limits<double>::infinity();

        struct SlabHit
        {
            double t_near;
            int axis;
        };

        // Entry parameter into the closed box, if the ray enters it at t >= 0.
        std::optional<SlabHit> slab_entry(const Cuboid &box, const Vec3 &o, const Vec3 &d)
        {
            double t_near = -kInf, t_far = kInf;
            int axis = -1;
            for (int a = 0; a < 3; ++a)
            {
                const double lo = box.min_corner[a], hi = box.max_corner[a];
                if (d[a] == 0.0)
                {
                    if (o[a] < lo || o[a] > hi)
                        return std::nullopt;
                    continue;
                }
                double t1 = (lo - o[a]) / d[a];
                double t2 = (hi - o[a]) / d[a];
                if (t1 > t2)
                    std::swap(t1, t2);
                if (t1 > t_near)
                {
                    t_near = t1;
                    axis = a;
                }
                t_far = std::min(t_far, t2);
                if (t_near > t_far)
                    return std::nullopt;
            }
            if (axis < 0 || t_near < 0.0)
                return std::nullopt;
            return SlabHit{t_near, axis};
        }

        Hit make_hit(const Cuboid &box, std::size_t index, const Vec3 &o, const Vec3 &d, const SlabHit &s)
        {
            Hit h;
            h.distance = s.t_near;
            h.point = o + s.t_near * d;
            h.point[s.axis] = d[s.axis] > 0.0 ? box.min_corner[s.axis] : box.max_corner[s.axis];
            h.face_normal = Vec3::Zero();
            h.face_normal[s.axis] = d[s.axis] > 0.0 ? -1.0 : 1.0;
            h.obstacle = index;
            return h;
        }

        void check_unit(const Vec3 &direction)
        {
            if (!(std::abs(direction.norm() - 1.0) <= 1e-9))
                throw Error(ErrorCode::invalid_argument, "ray_cast: direction must have unit norm");
        }
    }

    bool Cuboid::valid() const
    {
        for (int a = 0; a < 3; ++a)
        {
            if (!std::isfinite(min_corner[a]) || !std::isfinite(max_corner[a]))
                return false;
            if (kind == ObstacleKind::ground && a == 2)
            {
                if (std::abs(max_corner[a] - min_corner[a]) > 1e-9)
                    return false;
            }
            else if (!(min_corner[a] < max_corner[a]))
                return false;
        }
        return true;
    }

    bool Cuboid::contains(const Vec3 &p, double tol) const
    {
        for (int a = 0; a < 3; ++a)
            if (p[a] < min_corner[a] - tol || p[a] > max_corner[a] + tol)
                return false;
        return true;
    }

    std::size_t Scene::count(ObstacleKind kind) const
    {
        return static_cast<std::size_t>(std::count_if(obstacles.begin(), obstacles.end(),
                                                      [kind](const Cuboid &c) { return c.kind == kind; }));
    }

    int SceneConfig::slots_per_lane() const
    {
        return static_cast<int>(std::floor(canyon_length_m / slot_length_m));
    }

    void SceneConfig::validate() const
    {
        if (!(canyon_length_m > 0.0))
            config_error("canyon_length_m", "must be positive");
        if (!(canyon_width_m > 0.0))
            config_error("canyon_width_m", "must be positive");
        check_range(building_height_range_m, "building_height_range_m", false);
        check_range(building_width_range_m, "building_width_range_m", false);
        check_range(building_gap_range_m, "building_gap_range_m", true);
        if (!(building_depth_m > 0.0))
            config_error("building_depth_m", "must be positive");
        if (lanes.empty())
            config_error("lanes", "must list at least one lane");
        if (!(slot_length_m > 0.0) || slots_per_lane() < 1)
            config_error("slot_length_m", "must be positive and not exceed canyon_length_m");
        if (vehicle_count_range[0] < 0 || vehicle_count_range[1] < vehicle_count_range[0])
            config_error("vehicle_count_range", "must be an ordered range of nonnegative counts");
        if (vehicle_count_range[1] > 0 && size_classes.empty())
            config_error("size_classes", "must not be empty when vehicles are requested");
        double max_width = 0.0, total_weight = 0.0;
        for (const auto &c : size_classes)
        {
            if (!(c.length > 0.0 && c.width > 0.0 && c.height > 0.0 && c.weight >= 0.0))
                config_error("size_classes." + c.name, "needs positive dimensions and nonnegative weight");
            if (c.length > slot_length_m)
                config_error("size_classes." + c.name, "is longer than slot_length_m");
            max_width = std::max(max_width, c.width);
            total_weight += c.weight;
        }
        if (!size_classes.empty() && !(total_weight > 0.0))
            config_error("size_classes", "weights must not all be zero");
        for (std::size_t i = 0; i < lanes.size(); ++i)
        {
            const auto &l = lanes[i];
            if (l.direction != 1 && l.direction != -1)
                config_error("lanes[" + std::to_string(i) + "].direction", "must be +1 or -1");
            if (l.x - 0.5 * max_width < 0.0 || l.x + 0.5 * max_width > canyon_width_m)
                config_error("lanes[" + std::to_string(i) + "].x", "puts vehicles outside the street");
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs(lanes[j].x - l.x) < max_width)
                    config_error("lanes[" + std::to_string(i) + "].x", "overlaps lane " + std::to_string(j));
        }
        if (!zone.valid())
            config_error("zone", "must satisfy x1 < x2, y1 < y2, h > 0");
        if (!zone.contains(bs_position))
            config_error("bs_position", "must lie inside the coverage zone");
        for (const auto &l : lanes)
            if (l.x < zone.x1 || l.x > zone.x2)
                config_error("zone", "must cover every lane");
        if (zone.y1 > 0.0 || zone.y2 < slots_per_lane() * slot_length_m)
            config_error("zone", "must cover the full lane length");
        double max_height = 0.0;
        for (const auto &c : size_classes)
            max_height = std::max(max_height, c.height);
        if (zone.h < max_height)
            config_error("zone.h", "is lower than the tallest vehicle class");
    }

    Scene generate_scene(const SceneConfig &config, std::uint64_t seed)
    {
        config.validate();
        auto rng = make_engine(seed, {0x5ce9e});
        auto uniform = [&rng](double lo, double hi) {
            return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
        };

        Scene scene;
        scene.rng_seed = seed;
        scene.bs_position = config.bs_position;
        scene.zone = config.zone;

        const double L = config.canyon_length_m;
        const double W = config.canyon_width_m;
        const double margin = 20.0;

        if (config.ground)
        {
            Cuboid g;
            g.kind = ObstacleKind::ground;
            g.min_corner = Vec3(-config.building_depth_m - margin, -2.0 * margin, 0.0);
            g.max_corner = Vec3(W + config.building_depth_m + margin, L + 2.0 * margin, 0.0);
            scene.obstacles.push_back(g);
        }

        // Two building rows facing the street.
        for (int side = 0; side < 2; ++side)
        {
            const double x0 = side == 0 ? -config.building_depth_m : W;
            const double x1 = side == 0 ? 0.0 : W + config.building_depth_m;
            double y = -margin;
            while (y < L + margin)
            {
                const double width = uniform(config.building_width_range_m[0], config.building_width_range_m[1]);
                const double height = uniform(config.building_height_range_m[0], config.building_height_range_m[1]);
                Cuboid b;
                b.kind = ObstacleKind::building;
                b.min_corner = Vec3(x0, y, 0.0);
                b.max_corner = Vec3(x1, y + width, height);
                scene.obstacles.push_back(b);
                y += width + uniform(config.building_gap_range_m[0], config.building_gap_range_m[1]);
            }
        }

        const int vehicles = std::uniform_int_distribution<int>(config.vehicle_count_range[0],
                                                                config.vehicle_count_range[1])(rng);
        const int slots = config.slots_per_lane();
        const std::size_t n_lanes = config.lanes.size();
        std::vector<std::vector<char>> occupied(n_lanes, std::vector<char>(static_cast<std::size_t>(slots), 0));
        std::vector<int> free_in_lane(n_lanes, slots);

        std::vector<double> weights;
        for (const auto &c : config.size_classes)
            weights.push_back(c.weight);

        for (int v = 0; v < vehicles; ++v)
        {
            const std::size_t drawn = std::uniform_int_distribution<std::size_t>(0, n_lanes - 1)(rng);
            std::size_t lane = drawn;
            // Bounded retry: walk the remaining lanes once from the drawn one.
            std::size_t tries = 0;
            while (free_in_lane[lane] == 0 && tries < n_lanes)
            {
                lane = (lane + 1) % n_lanes;
                ++tries;
            }
            if (free_in_lane[lane] == 0)
            {
                std::ostringstream msg;
                msg << "placement failure: lane " << drawn << " congested (" << slots << "/" << slots
                    << " slots occupied, " << n_lanes * static_cast<std::size_t>(slots)
                    << " slots in total for " << vehicles << " vehicles)";
                throw Error(ErrorCode::placement, msg.str());
            }
            // Uniform choice among the free slots of the lane.
            int pick = std::uniform_int_distribution<int>(0, free_in_lane[lane] - 1)(rng);
            int slot = 0;
            for (; slot < slots; ++slot)
                if (!occupied[lane][static_cast<std::size_t>(slot)] && pick-- == 0)
                    break;
            occupied[lane][static_cast<std::size_t>(slot)] = 1;
            --free_in_lane[lane];

            const auto &cls = config.size_classes[std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng)];
            const double slot_y0 = slot * config.slot_length_m;
            const double y0 = slot_y0 + uniform(0.0, config.slot_length_m - cls.length);
            const double cx = config.lanes[lane].x;

            Cuboid c;
            c.kind = ObstacleKind::vehicle;
            c.min_corner = Vec3(cx - 0.5 * cls.width, y0, 0.0);
            c.max_corner = Vec3(cx + 0.5 * cls.width, y0 + cls.length, cls.height);
            scene.obstacles.push_back(c);

            if (v == 0)
            {
                scene.ego_index = scene.obstacles.size() - 1;
                scene.ego_position = Vec3(cx, y0 + 0.5 * cls.length, cls.height);
                scene.ego_heading = config.lanes[lane].direction > 0 ? 0.5 * pi : -0.5 * pi;
            }
        }
        return scene;
    }

    std::optional<Hit> ray_cast(const Scene &scene, const Vec3 &origin, const Vec3 &direction, double max_range,
                                std::optional<std::size_t> exclude)
    {
        check_unit(direction);
        std::optional<Hit> best;
        for (std::size_t i = 0; i < scene.obstacles.size(); ++i)
        {
            if (exclude && *exclude == i)
                continue;
            const auto &box = scene.obstacles[i];
            auto s = slab_entry(box, origin, direction);
            if (!s || s->t_near > max_range)
                continue;
            if (!best || s->t_near < best->distance)
                best = make_hit(box, i, origin, direction, *s);
        }
        return best;
    }

    std::optional<Hit> ray_cast(const Scene &scene, std::span<const std::uint32_t> candidates, const Vec3 &origin,
                                const Vec3 &direction, double max_range)
    {
        std::optional<Hit> best;
        double best_t = kInf;
        const Cuboid *best_box = nullptr;
        std::size_t best_index = 0;
        SlabHit best_slab{};
        for (auto i : candidates)
        {
            const auto &box = scene.obstacles[i];
            auto s = slab_entry(box, origin, direction);
            if (!s || s->t_near > max_range || s->t_near >= best_t)
                continue;
            best_t = s->t_near;
            best_box = &box;
            best_index = i;
            best_slab = *s;
        }
        if (best_box)
            best = make_hit(*best_box, best_index, origin, direction, best_slab);
        return best;
    }

    bool segment_penetrates(const Cuboid &box, const Vec3 &a, const Vec3 &b, double tol)
    {
        const Vec3 d = b - a;
        const double len = d.norm();
        if (len == 0.0)
            return false;
        double t0 = 0.0, t1 = 1.0;
        for (int k = 0; k < 3; ++k)
        {
            const double lo = box.min_corner[k], hi = box.max_corner[k];
            if (d[k] == 0.0)
            {
                if (!(a[k] > lo && a[k] < hi))
                    return false;
                continue;
            }
            double ta = (lo - a[k]) / d[k];
            double tb = (hi - a[k]) / d[k];
            if (ta > tb)
                std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 >= t1)
                return false;
        }
        return (t1 - t0) * len > tol;
    }

    bool is_los(const Scene &scene, const Vec3 &a, const Vec3 &b)
    {
        std::optional<std::size_t> skip;
        if (const Cuboid *ego = scene.ego(); ego && (ego->contains(a, 1e-9) || ego->contains(b, 1e-9)))
            skip = scene.ego_index;
        for (std::size_t i = 0; i < scene.obstacles.size(); ++i)
        {
            const auto &box = scene.obstacles[i];
            if (box.kind == ObstacleKind::ground || (skip && *skip == i))
                continue;
            if (segment_penetrates(box, a, b))
                return false;
        }
        return true;
    }
}
