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

#include "lidarbeam/dataset.hpp"
#include "lidarbeam/eval.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace lidarbeam
{
    enum class Subset : std::uint8_t
    {
        all = 0, // LOS detector plus stump, trained on every non-outage example
        los = 1, // top-M selector on LOS examples
        nlos = 2 // top-M selector on NLOS examples
    };

    const char *to_string(Subset s);
    Subset subset_from(const std::string &s);

    using Progress = std::function<void(const std::string &)>;

    // Traces every episode, splits, prunes the candidate codebooks on the
    // training channels, then scans and writes one record per episode plus the
    // manifest and the two pruned codebooks.
    Manifest generate(const RunConfig &config, NoiseMode noise, const std::filesystem::path &dir,
                      const Progress &progress = {});

    // Adds histograms and the stump distance to every record and writes them,
    // without the raw clouds, to featurized.lbd.
    Manifest featurize(const std::filesystem::path &dir, const Progress &progress = {});

    struct TrainOutcome
    {
        std::string model; // checkpoint file name
        std::vector<EpochLoss> history;
        std::size_t examples = 0;
        std::optional<double> stump_gamma;
    };

    TrainOutcome train_subset(const std::filesystem::path &dir, Subset subset, const Progress &progress = {});

    // Evaluates the trained models on the held-out split and writes
    // report.json plus one CSV per selector. The gated report routes each link
    // to the selector the LOS detector picks. Empty M uses the configured list.
    std::vector<EvalReport> evaluate(const std::filesystem::path &dir, std::vector<int> M = {},
                                     const Progress &progress = {});

    // Human-readable summary of report.json.
    std::string report_summary(const std::filesystem::path &dir);

    // generate, featurize, train all three models, evaluate.
    std::vector<EvalReport> run_pipeline(const RunConfig &config, NoiseMode noise, const std::filesystem::path &dir,
                                         const Progress &progress = {});

    // Brute-force oracle checks on random small instances; one line per check.
    struct SelftestResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };
    std::vector<SelftestResult> selftest(std::uint64_t seed, int instances = 1000);
}
