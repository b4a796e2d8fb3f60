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

#include "lidarbeam/config.hpp"
#include "lidarbeam/features.hpp"
#include "lidarbeam/mmwave.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace lidarbeam
{
    // One paired LIDAR + channel example.
    struct DatasetRecord
    {
        std::uint64_t episode = 0;
        std::uint64_t scene_seed = 0;
        Vec3 bs_position = Vec3::Zero();
        Vec3 ego_position = Vec3::Zero();  // ground truth
        Vec3 ego_estimate = Vec3::Zero();  // what the vehicle reports (GNSS)
        double ego_heading = 0.0;
        CoverageZone zone;
        std::uint32_t vehicle_count = 0;
        NoiseMode noise = NoiseMode::none;

        // World-frame returns above the ground filter and within d_max of the
        // vehicle; stored as 32-bit floats.
        PointCloud cloud;
        MpcList mpcs;
        BeamPowerMatrix y;
        LinkState state = LinkState::outage;
        BeamPair best;           // valid unless outage
        LabelDistribution label; // empty for outage

        std::optional<HistogramGrid> grid; // set by featurize
        std::optional<double> d_hat;       // stump feature, set by featurize

        // LOS flag matches link_state(mpcs); best and label re-derive bit-exactly from y.
        void validate(double clip_db) const;
    };

    std::string encode_record(const DatasetRecord &r);
    DatasetRecord decode_record(const std::string &bytes, bool keep_cloud = true);

    // Streams records into a versioned file.
    class DatasetWriter
    {
    public:
        explicit DatasetWriter(const std::filesystem::path &path);
        void write(const DatasetRecord &r);
        void close();
        std::size_t count() const { return count_; }

    private:
        std::ofstream out_;
        std::filesystem::path path_;
        std::size_t count_ = 0;
    };

    class DatasetReader
    {
    public:
        DatasetReader(const std::filesystem::path &path, double clip_db, bool keep_cloud = true);
        // False at the end of the file. Every record is validated.
        bool next(DatasetRecord &r);

    private:
        std::ifstream in_;
        std::filesystem::path path_;
        double clip_db_;
        bool keep_cloud_;
        std::size_t index_ = 0;
    };

    std::vector<DatasetRecord> read_dataset(const std::filesystem::path &path, double clip_db, bool keep_cloud = true);

    struct Split
    {
        std::vector<std::uint64_t> train, test; // record positions, ascending
    };

    // Seeded shuffle per stratum (LOS, NLOS, outage); each stratum sends
    // round(fraction * n) records to training. Throws Error(empty_split) unless
    // both the LOS and the NLOS stratum hold at least two records.
    Split stratified_split(const std::vector<LinkState> &states, double fraction, std::uint64_t seed);

    struct Manifest
    {
        std::string config_json; // effective configuration
        std::uint64_t config_hash = 0;
        std::uint64_t seed = 0;
        std::size_t episodes = 0;
        NoiseMode noise = NoiseMode::none;
        double sigma_L = 0.0, sigma_G = 0.0;
        std::size_t los = 0, nlos = 0, outage = 0;
        double split_fraction = 0.8;
        Split split;
        int tx_codebook_size = 0, rx_codebook_size = 0;
        std::string dataset_file = "dataset.lbd";
        std::string codebook_tx_file = "codebook_tx.txt";
        std::string codebook_rx_file = "codebook_rx.txt";
        bool featurized = false;

        RunConfig config() const { return parse_run_config(config_json); }
        int num_classes() const { return tx_codebook_size * rx_codebook_size; }
    };

    void write_manifest(const Manifest &m, const std::filesystem::path &path);
    Manifest read_manifest(const std::filesystem::path &path);
}
