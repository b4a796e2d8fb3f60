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

#include "lidarbeam/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lidarbeam
{
    double min_dist_to_line(const PointCloud &cloud, const Vec3 &p_b, const Vec3 &p_v)
    {
        const Vec3 d = p_v - p_b;
        const double len2 = d.squaredNorm();
        double best = std::numeric_limits<double>::infinity();
        for (const auto &p : cloud.points)
        {
            double t = len2 > 0.0 ? (p - p_b).dot(d) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, (p - (p_b + t * d)).norm());
        }
        return best;
    }

    namespace
    {
        void check_inputs(std::span<const double> dhats, std::span<const LinkState> labels)
        {
            if (dhats.size() != labels.size())
                throw Error(ErrorCode::invalid_argument, "stump: distance and label counts differ");
            if (dhats.empty())
                throw Error(ErrorCode::empty_split, "stump: no samples");
            for (auto l : labels)
                if (l == LinkState::outage)
                    throw Error(ErrorCode::invalid_argument, "stump: outage samples carry no LOS label");
        }
    }

    double stump_error(const StumpModel &model, std::span<const double> dhats, std::span<const LinkState> labels)
    {
        check_inputs(dhats, labels);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < dhats.size(); ++i)
            wrong += model.predict(dhats[i]) != labels[i];
        return static_cast<double>(wrong) / static_cast<double>(dhats.size());
    }

    StumpModel fit_stump(std::span<const double> dhats, std::span<const LinkState> labels)
    {
        check_inputs(dhats, labels);
        bool has_los = false, has_nlos = false;
        for (auto l : labels)
            (l == LinkState::los ? has_los : has_nlos) = true;
        if (!has_los || !has_nlos)
            throw Error(ErrorCode::invalid_argument, "stump: training labels contain a single class");

        std::vector<double> sorted(dhats.begin(), dhats.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<double> candidates{0.0};
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            if (std::isfinite(sorted[i + 1]))
                candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
            else
                candidates.push_back(sorted[i] + 1.0);
        candidates.push_back(std::numeric_limits<double>::infinity());
        std::sort(candidates.begin(), candidates.end());

        StumpModel best{candidates.front()};
        double best_err = 2.0;
        for (double g : candidates)
        {
            const double e = stump_error(StumpModel{g}, dhats, labels);
            if (e < best_err)
                best_err = e, best.gamma = g;
        }
        return best;
    }
}
