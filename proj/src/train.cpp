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
#include <cstdio>
#include <numeric>
#include <ostream>

namespace lidarbeam
{
    void TrainConfig::validate() const
    {
        if (epochs < 1)
            throw Error(ErrorCode::config, "train.epochs must be >= 1");
        if (batch_size < 1)
            throw Error(ErrorCode::config, "train.batch_size must be >= 1");
        if (!(rho > 0.0 && rho < 1.0))
            throw Error(ErrorCode::config, "train.rho must be in (0, 1)");
        if (!(epsilon > 0.0))
            throw Error(ErrorCode::config, "train.epsilon must be > 0");
        if (!(learning_rate > 0.0))
            throw Error(ErrorCode::config, "train.learning_rate must be > 0");
        if (!(l2 >= 0.0))
            throw Error(ErrorCode::config, "train.l2 must be >= 0");
        if (dropout && !(*dropout >= 0.0 && *dropout < 1.0))
            throw Error(ErrorCode::config, "train.dropout must be in [0, 1)");
    }

    namespace
    {
        double mean_loss(const Network &net, std::span<const Sample> set, int batch)
        {
            double total = 0.0;
            for (std::size_t i = 0; i < set.size(); i += static_cast<std::size_t>(batch))
            {
                const auto n = std::min(set.size() - i, static_cast<std::size_t>(batch));
                total += net.loss_and_gradient(set.subspan(i, n), 0.0, nullptr) * static_cast<double>(n);
            }
            return total / static_cast<double>(set.size());
        }
    }

    std::vector<EpochLoss> train(Network &network, std::span<const Sample> train_set, const TrainConfig &cfg,
                                 std::span<const Sample> validation_set,
                                 const std::function<void(const EpochLoss &)> &on_epoch)
    {
        cfg.validate();
        if (train_set.empty())
            throw Error(ErrorCode::empty_split, "training set is empty");

        NetworkSpec spec = network.spec();
        if (cfg.dropout)
        {
            for (auto &l : spec.layers)
                if (l.kind == LayerKind::dropout)
                    l.dropout = *cfg.dropout;
            Network rebuilt(spec, network.input_shape(), 0);
            rebuilt.set_parameters(network.parameters());
            network = std::move(rebuilt);
        }

        auto rng = make_engine(cfg.seed, {0x7a1});
        std::vector<double> x = network.parameters(), g;
        std::vector<double> eg(x.size(), 0.0), edx(x.size(), 0.0);
        std::vector<std::size_t> order(train_set.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<Sample> batch;

        std::vector<EpochLoss> history;
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch)
        {
            std::shuffle(order.begin(), order.end(), rng);
            double sum = 0.0;
            for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(cfg.batch_size))
            {
                const auto n = std::min(order.size() - i, static_cast<std::size_t>(cfg.batch_size));
                batch.clear();
                for (std::size_t k = 0; k < n; ++k)
                    batch.push_back(train_set[order[i + k]]);
                const double loss = network.loss_and_gradient(batch, cfg.l2, &g, &rng);
                if (!std::isfinite(loss))
                    throw Error(ErrorCode::divergence, "training diverged at epoch " + std::to_string(epoch));
                sum += loss * static_cast<double>(n);
                for (std::size_t p = 0; p < x.size(); ++p)
                {
                    eg[p] = cfg.rho * eg[p] + (1.0 - cfg.rho) * g[p] * g[p];
                    const double dx = -std::sqrt(edx[p] + cfg.epsilon) / std::sqrt(eg[p] + cfg.epsilon) * g[p];
                    edx[p] = cfg.rho * edx[p] + (1.0 - cfg.rho) * dx * dx;
                    x[p] += cfg.learning_rate * dx;
                }
                network.set_parameters(x);
            }
            EpochLoss e;
            e.epoch = epoch;
            e.train_loss = sum / static_cast<double>(order.size());
            if (!validation_set.empty())
                e.val_loss = mean_loss(network, validation_set, cfg.batch_size);
            if (!std::isfinite(e.train_loss))
                throw Error(ErrorCode::divergence, "training diverged at epoch " + std::to_string(epoch));
            history.push_back(e);
            if (on_epoch)
                on_epoch(e);
        }
        return history;
    }

    void write_loss_csv(const std::vector<EpochLoss> &history, std::ostream &out)
    {
        out << "epoch,train_loss,val_loss\n";
        char buf[96];
        for (const auto &e : history)
        {
            if (std::isnan(e.val_loss))
                std::snprintf(buf, sizeof buf, "%d,%.10g,\n", e.epoch, e.train_loss);
            else
                std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", e.epoch, e.train_loss, e.val_loss);
            out << buf;
        }
    }
}
