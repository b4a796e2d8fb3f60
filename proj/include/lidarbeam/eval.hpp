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

#include "lidarbeam/learn.hpp"
#include "lidarbeam/mmwave.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lidarbeam
{
    // Fraction of examples whose truth is among the first M recommendations.
    double topM_accuracy(std::span<const std::vector<int>> recommendations, std::span<const int> truths, int M);

    // sum_i log2(1 + y_i at the best of the first M recommendations) over
    // sum_i log2(1 + max y_i). Outage examples are skipped; throws Error(outage)
    // when nothing is left.
    double throughput_ratio(std::span<const BeamPowerMatrix> y, std::span<const std::vector<int>> recommendations,
                            int M);

    double misclassification_error(std::span<const LinkState> predictions, std::span<const LinkState> truths);

    struct EvalReport
    {
        std::string condition; // e.g. "los/noise-free"
        int num_classes = 0;
        std::vector<int> M;
        std::vector<double> accuracy; // per entry of M
        std::vector<double> throughput_ratio;
        std::vector<double> prior_accuracy; // most-frequent-pair ranking, optional
        std::optional<double> binary_error;
        std::optional<double> stump_error;
        std::size_t examples = 0;
        std::size_t outages = 0;

        // Throws Error(internal) if a curve decreases in M or leaves [0, 1].
        void check() const;

        // num_classes / M for the smallest M with R_T >= floor.
        std::optional<double> overhead_reduction(double rt_floor) const;
    };

    // Accuracy and R_T curves for ranked recommendations. M values above
    // num_classes are dropped and M = num_classes is always included.
    EvalReport evaluate_selection(std::span<const BeamPowerMatrix> y, std::span<const std::vector<int>> recommendations,
                                  std::vector<int> M, int num_classes, std::string condition);

    void write_report_json(const std::vector<EvalReport> &reports, std::ostream &out, double rt_floor);
    void write_report_csv(const EvalReport &report, std::ostream &out);
}
