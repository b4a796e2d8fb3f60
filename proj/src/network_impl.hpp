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

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <vector>

namespace lidarbeam::detail
{
    // Per-sample activations kept for the backward pass. Spatial tensors are
    // (height*width) x channels; flat tensors are n x 1.
    struct Workspace
    {
        const SparseInput *input = nullptr;
        std::vector<Eigen::MatrixXd> act;  // output of layer i
        std::vector<Eigen::MatrixXd> col;  // im2col buffer of conv layer i (unused for layer 0)
        std::vector<std::vector<std::uint32_t>> argmax;
        std::vector<Eigen::VectorXd> mask; // dropout scale per unit
        Eigen::MatrixXd grad_buf, col_grad;
        std::optional<double> dropout_override;
    };

    // Returns head logits. Dropout is sampled only when `rng` is non-null.
    Eigen::VectorXd forward(const Network &net, const SparseInput &x, Workspace &ws, std::mt19937_64 *rng, bool keep);

    // Accumulates parameter gradients (parameters() layout) for the sample held in `ws`.
    void backward(const Network &net, Workspace &ws, const Eigen::VectorXd &dlogits, double *grad);

    std::vector<double> head_output(HeadKind head, const Eigen::VectorXd &logits);

    // Cross-entropy of the head output against `target` and its gradient w.r.t. the logits.
    double head_loss(HeadKind head, const Eigen::VectorXd &logits, const std::vector<double> &target,
                     Eigen::VectorXd *dlogits);
}
