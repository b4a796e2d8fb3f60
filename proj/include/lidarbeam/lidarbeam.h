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


#ifndef LIDARBEAM_H
#define LIDARBEAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(LIDARBEAM_BUILDING_LIBRARY)
#define LB_API __attribute__((visibility("default")))
#else
#define LB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning int returns one of these. */
#define LB_OK 0
#define LB_ERR_INVALID_ARGUMENT 1
#define LB_ERR_CONFIG 2
#define LB_ERR_PLACEMENT 3
#define LB_ERR_OUTAGE 4
#define LB_ERR_DIVERGENCE 5
#define LB_ERR_IO 6
#define LB_ERR_FORMAT 7
#define LB_ERR_EMPTY_SPLIT 8
#define LB_ERR_INTERNAL 9

#define LB_NOISE_NONE 0
#define LB_NOISE_NOISY 1

#define LB_SUBSET_ALL 0
#define LB_SUBSET_LOS 1
#define LB_SUBSET_NLOS 2

#define LB_LINK_LOS 0
#define LB_LINK_NLOS 1
#define LB_LINK_OUTAGE 2

typedef struct lb_scene lb_scene;
typedef struct lb_cloud lb_cloud;
typedef struct lb_mpcs lb_mpcs;

typedef void (*lb_progress_fn)(const char *message, void *user);

LB_API const char *lb_version(void);

/* Message of the last failed call on this thread ("" if none). */
LB_API const char *lb_last_error(void);

/* Text outputs use a caller buffer; *needed receives the size including the
   terminating zero. A NULL or short buffer is not an error. */
LB_API int lb_config_default(char *buf, size_t cap, size_t *needed);
LB_API int lb_config_load(const char *path, char *buf, size_t cap, size_t *needed);

/* config_json may be NULL for the built-in defaults. */
LB_API int lb_scene_generate(const char *config_json, uint64_t seed, lb_scene **out);
LB_API void lb_scene_free(lb_scene *scene);
LB_API int lb_scene_obstacle_count(const lb_scene *scene, size_t *count);
/* kind: 0 building, 1 vehicle, 2 ground */
LB_API int lb_scene_obstacle(const lb_scene *scene, size_t index, double min_corner[3], double max_corner[3],
                             int *kind, int *is_ego);
LB_API int lb_scene_positions(const lb_scene *scene, double bs[3], double ego[3]);
LB_API int lb_scene_is_los(const lb_scene *scene, const double a[3], const double b[3], int *los);

LB_API int lb_scan(const lb_scene *scene, const char *config_json, uint64_t seed, lb_cloud **out);
LB_API void lb_cloud_free(lb_cloud *cloud);
LB_API int lb_cloud_size(const lb_cloud *cloud, size_t *count);
/* Copies min(count, capacity) points as x,y,z triples. */
LB_API int lb_cloud_points(const lb_cloud *cloud, double *xyz, size_t capacity);
LB_API int lb_cloud_write_xyz(const lb_cloud *cloud, const char *path);

/* Paths from the base station to the ego antenna. */
LB_API int lb_trace(const lb_scene *scene, const char *config_json, uint64_t phase_seed, lb_mpcs **out);
LB_API void lb_mpcs_free(lb_mpcs *mpcs);
LB_API int lb_mpcs_count(const lb_mpcs *mpcs, size_t *count);
/* out: re(alpha), im(alpha), tau, phi_D, theta_D, phi_A, theta_A, order, is_los */
LB_API int lb_mpcs_get(const lb_mpcs *mpcs, size_t index, double out[9]);
LB_API int lb_mpcs_link_state(const lb_mpcs *mpcs, int *state);

typedef struct lb_generate_options
{
    int has_seed;
    uint64_t seed;
    int has_episodes;
    uint64_t episodes;
    int noise; /* LB_NOISE_* */
} lb_generate_options;

/* config_path may be NULL for the built-in defaults. */
LB_API int lb_generate(const char *config_path, const lb_generate_options *options, const char *out_dir,
                       lb_progress_fn progress, void *user);
LB_API int lb_featurize(const char *dir, lb_progress_fn progress, void *user);
LB_API int lb_train(const char *dir, int subset, lb_progress_fn progress, void *user);
/* M may be NULL (count 0) for the configured list. */
LB_API int lb_evaluate(const char *dir, const int *M, size_t count, lb_progress_fn progress, void *user);
LB_API int lb_report(const char *dir, char *buf, size_t cap, size_t *needed);
/* Runs the brute-force oracle suite; reports one line per check through progress. */
LB_API int lb_selftest(uint64_t seed, int instances, lb_progress_fn progress, void *user, int *failures);

#ifdef __cplusplus
}
#endif

#endif
