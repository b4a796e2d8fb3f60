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

#include "lidarbeam/lidarbeam.h"
#include "lidarbeam/pipeline.hpp"

#include <cstring>
#include <memory>
#include <fstream>
#include <string>

using namespace lidarbeam;

struct lb_scene
{
    Scene scene;
};

struct lb_cloud
{
    PointCloud cloud;
};

struct lb_mpcs
{
    MpcList mpcs;
};

namespace
{
    thread_local std::string last_error;

    template <typename F>
    int guarded(F &&f)
    {
        try
        {
            f();
            last_error.clear();
            return LB_OK;
        }
        catch (const Error &e)
        {
            last_error = e.what();
            return static_cast<int>(e.code());
        }
        catch (const std::bad_alloc &)
        {
            last_error = "out of memory";
            return LB_ERR_INTERNAL;
        }
        catch (const std::exception &e)
        {
            last_error = e.what();
            return LB_ERR_INTERNAL;
        }
    }

    void require(const void *p, const char *what)
    {
        if (!p)
            throw Error(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
    }

    RunConfig config_of(const char *json) { return json ? parse_run_config(json) : RunConfig{}; }

    void copy_out(const std::string &s, char *buf, std::size_t cap, std::size_t *needed)
    {
        if (needed)
            *needed = s.size() + 1;
        if (buf && cap)
        {
            const std::size_t n = std::min(cap - 1, s.size());
            std::memcpy(buf, s.data(), n);
            buf[n] = '\0';
        }
    }

    Progress progress_of(lb_progress_fn fn, void *user)
    {
        if (!fn)
            return {};
        return [fn, user](const std::string &m) { fn(m.c_str(), user); };
    }

    Vec3 vec(const double *p) { return {p[0], p[1], p[2]}; }
}

extern "C"
{
    const char *lb_version(void) { return "0.3.0"; }

    const char *lb_last_error(void) { return last_error.c_str(); }

    int lb_config_default(char *buf, size_t cap, size_t *needed)
    {
        return guarded([&] { copy_out(to_json(RunConfig{}), buf, cap, needed); });
    }

    int lb_config_load(const char *path, char *buf, size_t cap, size_t *needed)
    {
        return guarded([&] {
            require(path, "path");
            copy_out(to_json(load_run_config(path)), buf, cap, needed);
        });
    }

    int lb_scene_generate(const char *config_json, uint64_t seed, lb_scene **out)
    {
        return guarded([&] {
            require(out, "out");
            *out = nullptr;
            auto s = std::make_unique<lb_scene>();
            s->scene = generate_scene(config_of(config_json).scene, seed);
            *out = s.release();
        });
    }

    void lb_scene_free(lb_scene *scene) { delete scene; }

    int lb_scene_obstacle_count(const lb_scene *scene, size_t *count)
    {
        return guarded([&] {
            require(scene, "scene");
            require(count, "count");
            *count = scene->scene.obstacles.size();
        });
    }

    int lb_scene_obstacle(const lb_scene *scene, size_t index, double min_corner[3], double max_corner[3], int *kind,
                          int *is_ego)
    {
        return guarded([&] {
            require(scene, "scene");
            if (index >= scene->scene.obstacles.size())
                throw Error(ErrorCode::invalid_argument, "obstacle index out of range");
            const auto &c = scene->scene.obstacles[index];
            for (int i = 0; i < 3; ++i)
            {
                if (min_corner)
                    min_corner[i] = c.min_corner[i];
                if (max_corner)
                    max_corner[i] = c.max_corner[i];
            }
            if (kind)
                *kind = static_cast<int>(c.kind);
            if (is_ego)
                *is_ego = scene->scene.ego_index && *scene->scene.ego_index == index;
        });
    }

    int lb_scene_positions(const lb_scene *scene, double bs[3], double ego[3])
    {
        return guarded([&] {
            require(scene, "scene");
            for (int i = 0; i < 3; ++i)
            {
                if (bs)
                    bs[i] = scene->scene.bs_position[i];
                if (ego)
                    ego[i] = scene->scene.ego_position[i];
            }
        });
    }

    int lb_scene_is_los(const lb_scene *scene, const double a[3], const double b[3], int *los)
    {
        return guarded([&] {
            require(scene, "scene");
            require(a, "a");
            require(b, "b");
            require(los, "los");
            *los = is_los(scene->scene, vec(a), vec(b)) ? 1 : 0;
        });
    }

    int lb_scan(const lb_scene *scene, const char *config_json, uint64_t seed, lb_cloud **out)
    {
        return guarded([&] {
            require(scene, "scene");
            require(out, "out");
            *out = nullptr;
            auto c = std::make_unique<lb_cloud>();
            c->cloud = scan(scene->scene, config_of(config_json).lidar, seed);
            *out = c.release();
        });
    }

    void lb_cloud_free(lb_cloud *cloud) { delete cloud; }

    int lb_cloud_size(const lb_cloud *cloud, size_t *count)
    {
        return guarded([&] {
            require(cloud, "cloud");
            require(count, "count");
            *count = cloud->cloud.size();
        });
    }

    int lb_cloud_points(const lb_cloud *cloud, double *xyz, size_t capacity)
    {
        return guarded([&] {
            require(cloud, "cloud");
            require(xyz, "xyz");
            const auto n = std::min(capacity, cloud->cloud.size());
            for (std::size_t i = 0; i < n; ++i)
                for (int k = 0; k < 3; ++k)
                    xyz[3 * i + static_cast<std::size_t>(k)] = cloud->cloud.points[i][k];
        });
    }

    int lb_cloud_write_xyz(const lb_cloud *cloud, const char *path)
    {
        return guarded([&] {
            require(cloud, "cloud");
            require(path, "path");
            std::ofstream out(path, std::ios::trunc);
            if (!out)
                throw Error(ErrorCode::io, std::string("cannot write ") + path);
            write_xyz(cloud->cloud, out);
            if (!out)
                throw Error(ErrorCode::io, std::string("write failed on ") + path);
        });
    }

    int lb_trace(const lb_scene *scene, const char *config_json, uint64_t phase_seed, lb_mpcs **out)
    {
        return guarded([&] {
            require(scene, "scene");
            require(out, "out");
            *out = nullptr;
            RayTraceConfig rt = config_of(config_json).raytrace;
            rt.phase_seed = phase_seed;
            auto m = std::make_unique<lb_mpcs>();
            m->mpcs = trace_mpcs(scene->scene, scene->scene.bs_position, scene->scene.ego_position, rt);
            *out = m.release();
        });
    }

    void lb_mpcs_free(lb_mpcs *mpcs) { delete mpcs; }

    int lb_mpcs_count(const lb_mpcs *mpcs, size_t *count)
    {
        return guarded([&] {
            require(mpcs, "mpcs");
            require(count, "count");
            *count = mpcs->mpcs.size();
        });
    }

    int lb_mpcs_get(const lb_mpcs *mpcs, size_t index, double out[9])
    {
        return guarded([&] {
            require(mpcs, "mpcs");
            require(out, "out");
            if (index >= mpcs->mpcs.size())
                throw Error(ErrorCode::invalid_argument, "path index out of range");
            const auto &m = mpcs->mpcs[index];
            const double v[9] = {m.alpha.real(), m.alpha.imag(), m.tau,   m.phi_D, m.theta_D,
                                 m.phi_A,        m.theta_A,      double(m.order), m.is_los ? 1.0 : 0.0};
            std::memcpy(out, v, sizeof v);
        });
    }

    int lb_mpcs_link_state(const lb_mpcs *mpcs, int *state)
    {
        return guarded([&] {
            require(mpcs, "mpcs");
            require(state, "state");
            *state = static_cast<int>(link_state(mpcs->mpcs));
        });
    }

    int lb_generate(const char *config_path, const lb_generate_options *options, const char *out_dir,
                    lb_progress_fn progress, void *user)
    {
        return guarded([&] {
            require(out_dir, "out_dir");
            RunConfig cfg = config_path ? load_run_config(config_path) : RunConfig{};
            NoiseMode noise = NoiseMode::none;
            if (options)
            {
                if (options->has_seed)
                    cfg.seed = options->seed;
                if (options->has_episodes)
                    cfg.episodes = options->episodes;
                if (options->noise != LB_NOISE_NONE && options->noise != LB_NOISE_NOISY)
                    throw Error(ErrorCode::invalid_argument, "noise must be LB_NOISE_NONE or LB_NOISE_NOISY");
                noise = static_cast<NoiseMode>(options->noise);
            }
            generate(cfg, noise, out_dir, progress_of(progress, user));
        });
    }

    int lb_featurize(const char *dir, lb_progress_fn progress, void *user)
    {
        return guarded([&] {
            require(dir, "dir");
            featurize(dir, progress_of(progress, user));
        });
    }

    int lb_train(const char *dir, int subset, lb_progress_fn progress, void *user)
    {
        return guarded([&] {
            require(dir, "dir");
            if (subset < LB_SUBSET_ALL || subset > LB_SUBSET_NLOS)
                throw Error(ErrorCode::invalid_argument, "subset must be one of LB_SUBSET_*");
            train_subset(dir, static_cast<Subset>(subset), progress_of(progress, user));
        });
    }

    int lb_evaluate(const char *dir, const int *M, size_t count, lb_progress_fn progress, void *user)
    {
        return guarded([&] {
            require(dir, "dir");
            if (count && !M)
                throw Error(ErrorCode::invalid_argument, "M must not be NULL when count > 0");
            std::vector<int> m(M, M + count);
            for (int v : m)
                if (v < 1)
                    throw Error(ErrorCode::invalid_argument, "M values must be >= 1");
            const auto reports = evaluate(dir, m, progress_of(progress, user));
            (void)reports;
        });
    }

    int lb_report(const char *dir, char *buf, size_t cap, size_t *needed)
    {
        return guarded([&] {
            require(dir, "dir");
            copy_out(report_summary(dir), buf, cap, needed);
        });
    }

    int lb_selftest(uint64_t seed, int instances, lb_progress_fn progress, void *user, int *failures)
    {
        return guarded([&] {
            if (instances < 1)
                throw Error(ErrorCode::invalid_argument, "instances must be >= 1");
            int bad = 0;
            for (const auto &r : selftest(seed, instances))
            {
                bad += !r.passed;
                if (progress)
                {
                    const std::string line = std::string(r.passed ? "PASS  " : "FAIL  ") + r.name + "  (" + r.detail + ")";
                    progress(line.c_str(), user);
                }
            }
            if (failures)
                *failures = bad;
        });
    }
}
