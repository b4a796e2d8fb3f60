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

#include "lidarbeam/mmwave.hpp"

#include <cmath>
#include <numeric>

namespace lidarbeam
{
    BeamPowerMatrix beam_powers(const FreqChannel &H, const Codebook &Ct, const Codebook &Cr)
    {
        const int K = static_cast<int>(H.subcarriers.size());
        BeamPowerMatrix out;
        out.y = Eigen::MatrixXd::Zero(Ct.size(), Cr.size());
        if (K == 0)
            return out;
        const Eigen::Index nr = H.rows(), nt = H.cols();
        if (Ct.dim() != nt || Cr.dim() != nr)
            throw Error(ErrorCode::invalid_argument, "beam_powers: codebook dimensions do not match the channel");

        // One GEMM for all subcarriers: [H[0]; H[1]; ...] * F.
        Eigen::MatrixXcd stacked(nr * K, nt);
        for (int k = 0; k < K; ++k)
            stacked.middleRows(k * nr, nr) = H.subcarriers[static_cast<std::size_t>(k)];
        const Eigen::MatrixXcd HF = stacked * Ct.vectors;
        const Eigen::MatrixXcd WH = Cr.vectors.adjoint();
        Eigen::MatrixXcd Z(Cr.size(), Ct.size());
        for (int k = 0; k < K; ++k)
        {
            Z.noalias() = WH * HF.middleRows(k * nr, nr);
            out.y += Z.cwiseAbs2().transpose();
        }
        return out;
    }

    BeamPair best_pair(const BeamPowerMatrix &y)
    {
        BeamPair best{-1, -1};
        double top = 0.0;
        for (int p = 0; p < y.tx_count(); ++p)
            for (int q = 0; q < y.rx_count(); ++q)
                if (y.y(p, q) > top)
                {
                    top = y.y(p, q);
                    best = {p, q};
                }
        if (best.p < 0)
            throw Error(ErrorCode::outage, "best_pair: all beam powers are zero (outage)");
        return best;
    }

    LabelDistribution make_label(const BeamPowerMatrix &y, double clip_db)
    {
        const double top = y.y.size() ? y.y.maxCoeff() : 0.0;
        if (!(top > 0.0))
            throw Error(ErrorCode::outage, "make_label: all beam powers are zero (outage)");
        LabelDistribution label;
        label.probs.assign(static_cast<std::size_t>(y.y.size()), 0.0);
        double total = 0.0;
        for (int p = 0; p < y.tx_count(); ++p)
            for (int q = 0; q < y.rx_count(); ++q)
            {
                const double v = y.y(p, q);
                if (v > 0.0 && !(10.0 * std::log10(top / v) > clip_db))
                {
                    label.probs[static_cast<std::size_t>(y.flat(p, q))] = v;
                    total += v;
                }
            }
        for (auto &p : label.probs)
            p /= total;
        return label;
    }

    CodebookPruner::CodebookPruner(Codebook candidates_t, Codebook candidates_r)
        : ct_(std::move(candidates_t)), cr_(std::move(candidates_r)),
          tx_counts_(static_cast<std::size_t>(ct_.size()), 0), rx_counts_(static_cast<std::size_t>(cr_.size()), 0)
    {
    }

    bool CodebookPruner::add(const FreqChannel &H)
    {
        const auto y = beam_powers(H, ct_, cr_);
        if (!(y.y.size() && y.y.maxCoeff() > 0.0))
            return false;
        add_counts(best_pair(y));
        return true;
    }

    void CodebookPruner::add_counts(const BeamPair &best)
    {
        ++tx_counts_.at(static_cast<std::size_t>(best.p));
        ++rx_counts_.at(static_cast<std::size_t>(best.q));
        ++channels_;
    }

    std::pair<Codebook, Codebook> CodebookPruner::finish(int min_count) const
    {
        auto keep = [min_count](const std::vector<long> &counts) {
            std::vector<int> idx;
            for (std::size_t i = 0; i < counts.size(); ++i)
                if (counts[i] > min_count)
                    idx.push_back(static_cast<int>(i));
            return idx;
        };
        const auto kt = keep(tx_counts_), kr = keep(rx_counts_);
        if (kt.empty() || kr.empty())
            throw Error(ErrorCode::invalid_argument,
                        "prune_codebooks: pruning leaves an empty " + std::string(kt.empty() ? "transmit" : "receive") +
                            " codebook after " + std::to_string(channels_) + " channels; lower min_count (now " +
                            std::to_string(min_count) + ")");
        return {ct_.subset(kt), cr_.subset(kr)};
    }

    std::pair<Codebook, Codebook> prune_codebooks(const Codebook &candidates_t, const Codebook &candidates_r,
                                                  std::span<const FreqChannel> training_channels, int min_count)
    {
        if (training_channels.empty())
            throw Error(ErrorCode::invalid_argument, "prune_codebooks: no training channels");
        CodebookPruner pruner(candidates_t, candidates_r);
        for (const auto &H : training_channels)
            pruner.add(H);
        return pruner.finish(min_count);
    }
}
