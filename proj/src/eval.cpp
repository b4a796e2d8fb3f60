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

#include "lidarbeam/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace lidarbeam
{
    namespace
    {
        void check_sizes(std::size_t a, std::size_t b, const char *what)
        {
            if (a != b)
                throw Error(ErrorCode::invalid_argument, std::string(what) + ": list lengths differ (" +
                                                             std::to_string(a) + " vs " + std::to_string(b) + ")");
        }

        void check_m(std::span<const std::vector<int>> recs, int M)
        {
            if (M < 1)
                throw Error(ErrorCode::invalid_argument, "M must be >= 1");
            for (const auto &r : recs)
                if (r.size() < static_cast<std::size_t>(M))
                    throw Error(ErrorCode::invalid_argument,
                                "recommendation list shorter than M=" + std::to_string(M));
        }

        bool is_outage(const BeamPowerMatrix &y) { return y.y.size() == 0 || !(y.y.maxCoeff() > 0.0); }
    }

    double topM_accuracy(std::span<const std::vector<int>> recommendations, std::span<const int> truths, int M)
    {
        check_sizes(recommendations.size(), truths.size(), "topM_accuracy");
        check_m(recommendations, M);
        if (truths.empty())
            throw Error(ErrorCode::empty_split, "topM_accuracy: no examples");
        std::size_t hits = 0;
        for (std::size_t i = 0; i < truths.size(); ++i)
        {
            const auto &r = recommendations[i];
            hits += std::find(r.begin(), r.begin() + M, truths[i]) != r.begin() + M;
        }
        return static_cast<double>(hits) / static_cast<double>(truths.size());
    }

    double throughput_ratio(std::span<const BeamPowerMatrix> y, std::span<const std::vector<int>> recommendations,
                            int M)
    {
        check_sizes(y.size(), recommendations.size(), "throughput_ratio");
        check_m(recommendations, M);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            if (is_outage(y[i]))
                continue;
            const int Q = y[i].rx_count();
            double best = 0.0;
            for (int m = 0; m < M; ++m)
            {
                const int f = recommendations[i][static_cast<std::size_t>(m)];
                if (f < 0 || f >= y[i].tx_count() * Q)
                    throw Error(ErrorCode::invalid_argument, "recommended class out of range");
                best = std::max(best, y[i].y(f / Q, f % Q));
            }
            num += std::log2(1.0 + best);
            den += std::log2(1.0 + y[i].y.maxCoeff());
        }
        if (!(den > 0.0))
            throw Error(ErrorCode::outage, "throughput_ratio: every example is an outage");
        return num / den;
    }

    double misclassification_error(std::span<const LinkState> predictions, std::span<const LinkState> truths)
    {
        check_sizes(predictions.size(), truths.size(), "misclassification_error");
        if (truths.empty())
            throw Error(ErrorCode::empty_split, "misclassification_error: no examples");
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < truths.size(); ++i)
            wrong += predictions[i] != truths[i];
        return static_cast<double>(wrong) / static_cast<double>(truths.size());
    }

    void EvalReport::check() const
    {
        auto bad = [&](const std::string &why) { throw Error(ErrorCode::internal, "report " + condition + ": " + why); };
        if (accuracy.size() != M.size() || throughput_ratio.size() != M.size())
            bad("curve lengths differ from the M list");
        for (std::size_t i = 0; i < M.size(); ++i)
        {
            if (!(accuracy[i] >= 0.0 && accuracy[i] <= 1.0) || !(throughput_ratio[i] >= 0.0 && throughput_ratio[i] <= 1.0))
                bad("value outside [0, 1] at M=" + std::to_string(M[i]));
            if (i > 0 && (accuracy[i] < accuracy[i - 1] || throughput_ratio[i] < throughput_ratio[i - 1]))
                bad("curve decreases at M=" + std::to_string(M[i]));
            if (M[i] == num_classes && throughput_ratio[i] != 1.0)
                bad("R_T at M=num_classes is not 1");
        }
        for (const auto &e : {binary_error, stump_error})
            if (e && !(*e >= 0.0 && *e <= 1.0))
                bad("misclassification error outside [0, 1]");
    }

    std::optional<double> EvalReport::overhead_reduction(double rt_floor) const
    {
        for (std::size_t i = 0; i < M.size(); ++i)
            if (throughput_ratio[i] >= rt_floor)
                return static_cast<double>(num_classes) / M[i];
        return std::nullopt;
    }

    EvalReport evaluate_selection(std::span<const BeamPowerMatrix> y, std::span<const std::vector<int>> recommendations,
                                  std::vector<int> M, int num_classes, std::string condition)
    {
        check_sizes(y.size(), recommendations.size(), "evaluate_selection");
        // The full-codebook point closes every curve.
        M.push_back(num_classes);
        std::sort(M.begin(), M.end());
        M.erase(std::unique(M.begin(), M.end()), M.end());
        EvalReport r;
        r.condition = std::move(condition);
        r.num_classes = num_classes;

        std::vector<BeamPowerMatrix> kept;
        std::vector<std::vector<int>> recs;
        std::vector<int> truths;
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            if (is_outage(y[i]))
            {
                ++r.outages;
                continue;
            }
            const auto b = best_pair(y[i]);
            truths.push_back(y[i].flat(b.p, b.q));
            kept.push_back(y[i]);
            recs.push_back(recommendations[i]);
        }
        r.examples = kept.size();
        if (kept.empty())
            throw Error(ErrorCode::empty_split, "empty test split (" + r.condition + ")");
        for (int m : M)
        {
            if (m > num_classes)
                continue;
            r.M.push_back(m);
            r.accuracy.push_back(topM_accuracy(recs, truths, m));
            r.throughput_ratio.push_back(lidarbeam::throughput_ratio(kept, recs, m));
        }
        return r;
    }

    void write_report_json(const std::vector<EvalReport> &reports, std::ostream &out, double rt_floor)
    {
        auto arr = nlohmann::json::array();
        for (const auto &r : reports)
        {
            nlohmann::json j;
            j["condition"] = r.condition;
            j["num_classes"] = r.num_classes;
            j["examples"] = r.examples;
            j["outages"] = r.outages;
            j["M"] = r.M;
            j["accuracy"] = r.accuracy;
            j["throughput_ratio"] = r.throughput_ratio;
            if (!r.prior_accuracy.empty())
                j["prior_accuracy"] = r.prior_accuracy;
            if (r.binary_error)
                j["binary_error"] = *r.binary_error;
            if (r.stump_error)
                j["stump_error"] = *r.stump_error;
            const auto f = r.overhead_reduction(rt_floor);
            j["rt_floor"] = rt_floor;
            j["overhead_reduction"] = f ? nlohmann::json(*f) : nlohmann::json(nullptr);
            arr.push_back(j);
        }
        out << arr.dump(2) << '\n';
    }

    void write_report_csv(const EvalReport &report, std::ostream &out)
    {
        out << "M,accuracy,R_T\n";
        char buf[96];
        for (std::size_t i = 0; i < report.M.size(); ++i)
        {
            std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", report.M[i], report.accuracy[i], report.throughput_ratio[i]);
            out << buf;
        }
    }
}
