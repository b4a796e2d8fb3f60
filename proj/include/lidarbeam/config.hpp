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

#include "lidarbeam/features.hpp"
#include "lidarbeam/learn.hpp"
#include "lidarbeam/mmwave.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lidarbeam
{
    // Candidate codebook recipe plus the pruning threshold.
    struct CodebookConfig
    {
        ArrayGeometry tx{16, 16, 0.5};
        ArrayGeometry rx{4, 4, 0.5};
        // Steered vectors on a regular (azimuth, elevation) grid, degrees.
        std::array<double, 2> tx_azimuth_deg{-75.0, 75.0};
        std::array<double, 2> tx_elevation_deg{-25.0, 0.0};
        int tx_azimuth_points = 16, tx_elevation_points = 4;
        std::array<double, 2> rx_azimuth_deg{-90.0, 90.0};
        std::array<double, 2> rx_elevation_deg{0.0, 30.0};
        int rx_azimuth_points = 8, rx_elevation_points = 3;
        int tx_random = 32, rx_random = 8;
        int min_count = 10;

        void validate() const;
        std::vector<std::pair<double, double>> tx_grid() const; // radians
        std::vector<std::pair<double, double>> rx_grid() const;
    };

    enum class NoiseMode : std::uint8_t
    {
        none = 0,
        noisy = 1
    };

    const char *to_string(NoiseMode m);
    NoiseMode noise_mode_from(const std::string &s);

    struct RunConfig
    {
        SceneConfig scene;
        LidarConfig lidar;
        RayTraceConfig raytrace;
        OfdmConfig ofdm;
        CodebookConfig codebook;
        FeatureConfig features;
        TrainConfig train;
        double noisy_sigma_G = 3.0; // applied by NoiseMode::noisy
        double noisy_sigma_L = 0.1;
        std::size_t episodes = 2000;
        double split_fraction = 0.8;
        std::uint64_t seed = 1;
        double clip_db = 6.0;
        std::vector<int> M{1, 2, 3, 5, 10, 20, 30, 40, 50, 75, 100};
        double rt_floor = 0.9;
        // Selectors train on soft labels; the LOS detector trains for this many epochs.
        int los_detector_epochs = 30;

        void validate() const;

        // Copy with sigma_L and sigma_G set for the noise condition.
        RunConfig with_noise(NoiseMode mode) const;
    };

    RunConfig parse_run_config(const std::string &json_text);
    RunConfig load_run_config(const std::string &path);
    std::string to_json(const RunConfig &cfg); // canonical, sorted keys

    // FNV-1a over the canonical JSON.
    std::uint64_t config_hash(const RunConfig &cfg);
}
