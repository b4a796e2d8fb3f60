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

#include "lidarbeam/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lidarbeam
{
    namespace
    {
        Eigen::VectorXcd random_unit(int n, std::mt19937_64 &rng)
        {
            std::normal_distribution<double> g;
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i)
                v[i] = {g(rng), g(rng)};
            return v / v.norm();
        }

        Codebook random_codebook(int n, int count, std::mt19937_64 &rng)
        {
            Codebook c;
            c.vectors.resize(n, count);
            for (int i = 0; i < count; ++i)
                c.vectors.col(i) = random_unit(n, rng);
            c.kinds.assign(static_cast<std::size_t>(count), CodevectorKind::random);
            return c;
        }

        double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

        SelftestResult check_beam_powers(std::mt19937_64 &rng, int instances)
        {
            std::uniform_int_distribution<int> dim(1, 4), cnt(1, 6), kk(1, 4);
            std::normal_distribution<double> g;
            double worst = 0.0;
            for (int t = 0; t < instances; ++t)
            {
                const int nt = dim(rng), nr = dim(rng), K = kk(rng);
                FreqChannel H;
                for (int k = 0; k < K; ++k)
                {
                    Eigen::MatrixXcd m(nr, nt);
                    for (Eigen::Index i = 0; i < m.size(); ++i)
                        m.data()[i] = {g(rng), g(rng)};
                    H.subcarriers.push_back(m);
                }
                const auto Ct = random_codebook(nt, cnt(rng), rng);
                const auto Cr = random_codebook(nr, std::min(4, cnt(rng)), rng);
                const auto y = beam_powers(H, Ct, Cr);
                for (int p = 0; p < Ct.size(); ++p)
                    for (int q = 0; q < Cr.size(); ++q)
                    {
                        double ref = 0.0;
                        for (int k = 0; k < K; ++k)
                        {
                            cdouble s = 0.0;
                            for (int i = 0; i < nr; ++i)
                                for (int j = 0; j < nt; ++j)
                                    s += std::conj(Cr.vectors(i, q)) * H.subcarriers[static_cast<std::size_t>(k)](i, j) *
                                         Ct.vectors(j, p);
                            ref += std::norm(s);
                        }
                        worst = std::max(worst, rel(y.y(p, q), ref));
                    }
            }
            std::ostringstream d;
            d << "worst relative error " << worst;
            return {"beam_powers vs triple loop", worst <= 1e-10, d.str()};
        }

        SelftestResult check_best_pair(std::mt19937_64 &rng, int instances)
        {
            std::uniform_int_distribution<int> cnt(1, 6), small(0, 3);
            int bad = 0;
            for (int t = 0; t < instances; ++t)
            {
                BeamPowerMatrix y;
                y.y.resize(cnt(rng), cnt(rng));
                for (Eigen::Index i = 0; i < y.y.size(); ++i)
                    y.y.data()[i] = small(rng); // small integers force ties
                if (y.y.maxCoeff() == 0.0)
                    y.y(0, 0) = 1.0;
                int bp = 0, bq = 0;
                for (int p = 0; p < y.tx_count(); ++p)
                    for (int q = 0; q < y.rx_count(); ++q)
                        if (y.y(p, q) > y.y(bp, bq))
                            bp = p, bq = q;
                bad += !(best_pair(y) == BeamPair{bp, bq});
            }
            return {"best_pair vs exhaustive scan", bad == 0, std::to_string(bad) + " mismatches"};
        }

        SelftestResult check_stump(std::mt19937_64 &rng, int instances)
        {
            std::uniform_int_distribution<int> n(2, 12), lab(0, 1), val(0, 8);
            int bad = 0;
            for (int t = 0; t < instances; ++t)
            {
                const int m = n(rng);
                std::vector<double> d(static_cast<std::size_t>(m));
                std::vector<LinkState> s(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i)
                {
                    d[static_cast<std::size_t>(i)] = 0.5 * val(rng);
                    s[static_cast<std::size_t>(i)] = lab(rng) ? LinkState::los : LinkState::nlos;
                }
                s[0] = LinkState::los;
                s[1] = LinkState::nlos;
                // sweep every threshold on a fine grid, including both extremes
                double best = 2.0;
                for (double gamma = -0.125; gamma <= 4.5; gamma += 0.125)
                {
                    int wrong = 0;
                    for (int i = 0; i < m; ++i)
                        wrong += ((d[static_cast<std::size_t>(i)] < gamma) ? LinkState::nlos : LinkState::los) !=
                                 s[static_cast<std::size_t>(i)];
                    best = std::min(best, static_cast<double>(wrong) / m);
                }
                const auto fit = fit_stump(d, s);
                bad += std::abs(stump_error(fit, d, s) - best) > 1e-12;
            }
            return {"fit_stump vs threshold sweep", bad == 0, std::to_string(bad) + " mismatches"};
        }

        SelftestResult check_top_m(std::mt19937_64 &rng, int instances)
        {
            std::uniform_int_distribution<int> n(1, 24), val(0, 5);
            int bad = 0;
            for (int t = 0; t < instances; ++t)
            {
                const int C = n(rng);
                std::vector<double> s(static_cast<std::size_t>(C));
                for (auto &v : s)
                    v = val(rng);
                std::uniform_int_distribution<int> mm(1, C);
                const int M = mm(rng);
                std::vector<int> ref;
                std::vector<bool> used(static_cast<std::size_t>(C), false);
                for (int k = 0; k < M; ++k)
                {
                    int best = -1;
                    for (int i = 0; i < C; ++i)
                        if (!used[static_cast<std::size_t>(i)] &&
                            (best < 0 || s[static_cast<std::size_t>(i)] > s[static_cast<std::size_t>(best)]))
                            best = i;
                    used[static_cast<std::size_t>(best)] = true;
                    ref.push_back(best);
                }
                bad += top_m_indices(s, M) != ref;
            }
            return {"top-M selection vs repeated argmax", bad == 0, std::to_string(bad) + " mismatches"};
        }
    }

    std::vector<SelftestResult> selftest(std::uint64_t seed, int instances)
    {
        auto rng = make_engine(seed, {0x5e1f});
        std::vector<SelftestResult> out;
        for (auto f : {check_beam_powers, check_best_pair, check_stump, check_top_m})
        {
            try
            {
                out.push_back(f(rng, instances));
            }
            catch (const std::exception &e)
            {
                out.push_back({"oracle check", false, e.what()});
            }
        }
        return out;
    }
}
