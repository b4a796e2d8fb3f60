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

#include "network_impl.hpp"

#include <algorithm>
#include <cmath>

namespace lidarbeam::detail
{
    namespace
    {
        using Eigen::Index;
        using Eigen::MatrixXd;

        void check_input(const Network &net, const SparseInput &x)
        {
            if (!(x.shape == net.input_shape()))
                throw Error(ErrorCode::invalid_argument,
                            "network input shape " + std::to_string(x.shape.channels) + "x" + std::to_string(x.shape.height) +
                                "x" + std::to_string(x.shape.width) + " does not match " +
                                std::to_string(net.input_shape().channels) + "x" + std::to_string(net.input_shape().height) +
                                "x" + std::to_string(net.input_shape().width));
            if (x.index.size() != x.value.size())
                throw Error(ErrorCode::invalid_argument, "sparse input: index/value size mismatch");
            const auto n = x.shape.size();
            for (auto i : x.index)
                if (i >= n)
                    throw Error(ErrorCode::invalid_argument, "sparse input: index out of range");
        }

        MatrixXd densify(const SparseInput &x)
        {
            const Index hw = static_cast<Index>(x.shape.height) * x.shape.width;
            MatrixXd X = MatrixXd::Zero(hw, x.shape.channels);
            for (std::size_t n = 0; n < x.index.size(); ++n)
                X.data()[x.index[n]] += x.value[n];
            return X;
        }

        // col(hw, (ci*k + dy)*k + dx) = X(hw shifted by (dy-r, dx-r), ci), zero outside.
        void im2col(const MatrixXd &X, int H, int W, int k, MatrixXd &col)
        {
            const int C = static_cast<int>(X.cols()), r = k / 2;
            col.resize(static_cast<Index>(H) * W, static_cast<Index>(C) * k * k);
            for (int ci = 0; ci < C; ++ci)
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx)
                    {
                        double *dst = col.col((static_cast<Index>(ci) * k + dy) * k + dx).data();
                        const double *src = X.col(ci).data();
                        const int x0 = std::max(0, r - dx), x1 = std::min(W, W + r - dx);
                        for (int y = 0; y < H; ++y)
                        {
                            double *row = dst + static_cast<std::ptrdiff_t>(y) * W;
                            const int sy = y + dy - r;
                            if (sy < 0 || sy >= H || x0 >= x1)
                            {
                                std::fill(row, row + W, 0.0);
                                continue;
                            }
                            std::fill(row, row + x0, 0.0);
                            std::copy(src + static_cast<std::ptrdiff_t>(sy) * W + x0 + dx - r,
                                      src + static_cast<std::ptrdiff_t>(sy) * W + x1 + dx - r, row + x0);
                            std::fill(row + x1, row + W, 0.0);
                        }
                    }
        }

        void col2im(const MatrixXd &col, int H, int W, int k, MatrixXd &dX)
        {
            const int C = static_cast<int>(dX.cols()), r = k / 2;
            dX.setZero();
            for (int ci = 0; ci < C; ++ci)
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx)
                    {
                        const double *src = col.col((static_cast<Index>(ci) * k + dy) * k + dx).data();
                        double *dst = dX.col(ci).data();
                        const int x0 = std::max(0, r - dx), x1 = std::min(W, W + r - dx);
                        for (int y = 0; y < H; ++y)
                        {
                            const int sy = y + dy - r;
                            if (sy < 0 || sy >= H)
                                continue;
                            const double *row = src + static_cast<std::ptrdiff_t>(y) * W;
                            double *out = dst + static_cast<std::ptrdiff_t>(sy) * W + dx - r;
                            for (int x = x0; x < x1; ++x)
                                out[x] += row[x];
                        }
                    }
        }

        template <typename F>
        void for_each_tap(const SparseInput &x, int k, F &&f)
        {
            const int H = x.shape.height, W = x.shape.width, r = k / 2;
            const std::uint32_t plane = static_cast<std::uint32_t>(H * W);
            for (std::size_t n = 0; n < x.index.size(); ++n)
            {
                const int ci = static_cast<int>(x.index[n] / plane);
                const int rem = static_cast<int>(x.index[n] % plane);
                const int sy = rem / W, sx = rem % W;
                const double v = x.value[n];
                for (int dy = 0; dy < k; ++dy)
                {
                    const int oy = sy - dy + r;
                    if (oy < 0 || oy >= H)
                        continue;
                    for (int dx = 0; dx < k; ++dx)
                    {
                        const int ox = sx - dx + r;
                        if (ox < 0 || ox >= W)
                            continue;
                        f(static_cast<Index>(oy) * W + ox, (static_cast<Index>(ci) * k + dy) * k + dx, v);
                    }
                }
            }
        }

        void relu(MatrixXd &A) { A = A.cwiseMax(0.0); }

        void relu_back(const MatrixXd &out, MatrixXd &g)
        {
            g = (out.array() > 0.0).select(g, 0.0);
        }
    }

    Eigen::VectorXd forward(const Network &net, const SparseInput &x, Workspace &ws, std::mt19937_64 *rng, bool keep)
    {
        check_input(net, x);
        const auto &layers = net.layers();
        ws.input = &x;
        ws.act.resize(layers.size());
        ws.col.resize(layers.size());
        ws.argmax.resize(layers.size());
        ws.mask.resize(layers.size());

        MatrixXd cur;
        for (std::size_t i = 0; i < layers.size(); ++i)
        {
            const auto &L = layers[i];
            const int H = L.in.height, W = L.in.width;
            MatrixXd out;
            switch (L.spec.kind)
            {
            case LayerKind::conv:
                if (i == 0)
                {
                    out = L.b.transpose().replicate(static_cast<Index>(H) * W, 1);
                    for_each_tap(x, L.spec.kernel, [&](Index o, Index w, double v) { out.row(o).noalias() += v * L.W.row(w); });
                }
                else
                {
                    im2col(cur, H, W, L.spec.kernel, ws.col[i]);
                    out.noalias() = ws.col[i] * L.W;
                    out.rowwise() += L.b.transpose();
                }
                if (L.spec.activation == Activation::relu)
                    relu(out);
                break;
            case LayerKind::maxpool: {
                if (i == 0)
                    cur = densify(x);
                const int p = L.spec.pool, Ho = H / p, Wo = W / p, C = L.in.channels;
                out.resize(static_cast<Index>(Ho) * Wo, C);
                auto &am = ws.argmax[i];
                am.resize(static_cast<std::size_t>(out.size()));
                for (int c = 0; c < C; ++c)
                    for (int oy = 0; oy < Ho; ++oy)
                        for (int ox = 0; ox < Wo; ++ox)
                        {
                            Index best = static_cast<Index>(oy * p) * W + ox * p;
                            double bv = cur(best, c);
                            for (int a = 0; a < p; ++a)
                                for (int b = 0; b < p; ++b)
                                {
                                    const Index s = static_cast<Index>(oy * p + a) * W + ox * p + b;
                                    if (cur(s, c) > bv)
                                        bv = cur(s, c), best = s;
                                }
                            const Index o = static_cast<Index>(oy) * Wo + ox;
                            out(o, c) = bv;
                            am[static_cast<std::size_t>(c * out.rows() + o)] = static_cast<std::uint32_t>(best);
                        }
                break;
            }
            case LayerKind::flatten:
                if (i == 0)
                    cur = densify(x);
                out = Eigen::Map<const MatrixXd>(cur.data(), cur.size(), 1);
                break;
            case LayerKind::dense:
                out.noalias() = L.W * cur;
                out.col(0) += L.b;
                if (L.spec.activation == Activation::relu)
                    relu(out);
                break;
            case LayerKind::dropout: {
                if (i == 0)
                    cur = densify(x);
                out = cur;
                const double rate = ws.dropout_override.value_or(L.spec.dropout);
                if (rng && rate > 0.0)
                {
                    std::uniform_real_distribution<double> u(0.0, 1.0);
                    auto &m = ws.mask[i];
                    m.resize(out.size());
                    for (Index n = 0; n < m.size(); ++n)
                        m[n] = u(*rng) >= rate ? 1.0 / (1.0 - rate) : 0.0;
                    out.array() *= Eigen::Map<const MatrixXd>(m.data(), out.rows(), out.cols()).array();
                }
                else
                    ws.mask[i].resize(0);
                break;
            }
            }
            cur = std::move(out);
            if (keep)
                ws.act[i] = cur;
        }
        return Eigen::Map<const Eigen::VectorXd>(cur.data(), cur.size());
    }

    void backward(const Network &net, Workspace &ws, const Eigen::VectorXd &dlogits, double *grad)
    {
        const auto &layers = net.layers();
        std::vector<std::size_t> offset(layers.size() + 1, 0);
        for (std::size_t i = 0; i < layers.size(); ++i)
            offset[i + 1] = offset[i] + static_cast<std::size_t>(layers[i].W.size() + layers[i].b.size());

        MatrixXd g = dlogits;
        for (std::size_t ii = layers.size(); ii-- > 0;)
        {
            const auto &L = layers[ii];
            const MatrixXd &out = ws.act[ii];
            double *gW = grad + offset[ii];
            double *gb = gW + L.W.size();
            const bool need_input_grad = ii > 0;
            switch (L.spec.kind)
            {
            case LayerKind::dense: {
                if (L.spec.activation == Activation::relu)
                    relu_back(out, g);
                const MatrixXd &in = ws.act[ii - 1];
                Eigen::Map<MatrixXd>(gW, L.W.rows(), L.W.cols()).noalias() += g * in.transpose();
                Eigen::Map<Eigen::VectorXd>(gb, L.b.size()) += g.col(0);
                if (need_input_grad)
                {
                    MatrixXd gi = L.W.transpose() * g;
                    g = std::move(gi);
                }
                break;
            }
            case LayerKind::dropout:
                if (ws.mask[ii].size())
                    g.array() *= Eigen::Map<const MatrixXd>(ws.mask[ii].data(), g.rows(), g.cols()).array();
                break;
            case LayerKind::flatten: {
                MatrixXd gi = Eigen::Map<const MatrixXd>(g.data(), static_cast<Index>(L.in.height) * L.in.width,
                                                         L.in.channels);
                g = std::move(gi);
                break;
            }
            case LayerKind::maxpool: {
                if (!need_input_grad)
                    break;
                MatrixXd gi = MatrixXd::Zero(static_cast<Index>(L.in.height) * L.in.width, L.in.channels);
                const auto &am = ws.argmax[ii];
                for (Index c = 0; c < g.cols(); ++c)
                    for (Index o = 0; o < g.rows(); ++o)
                        gi(am[static_cast<std::size_t>(c * g.rows() + o)], c) += g(o, c);
                g = std::move(gi);
                break;
            }
            case LayerKind::conv: {
                if (L.spec.activation == Activation::relu)
                    relu_back(out, g);
                Eigen::Map<Eigen::VectorXd>(gb, L.b.size()) += g.colwise().sum().transpose();
                Eigen::Map<MatrixXd> GW(gW, L.W.rows(), L.W.cols());
                if (ii == 0)
                {
                    for_each_tap(*ws.input, L.spec.kernel,
                                 [&](Index o, Index w, double v) { GW.row(w).noalias() += v * g.row(o); });
                    break;
                }
                GW.noalias() += ws.col[ii].transpose() * g;
                ws.col_grad.noalias() = g * L.W.transpose();
                MatrixXd gi(static_cast<Index>(L.in.height) * L.in.width, L.in.channels);
                col2im(ws.col_grad, L.in.height, L.in.width, L.spec.kernel, gi);
                g = std::move(gi);
                break;
            }
            }
        }
    }

    std::vector<double> head_output(HeadKind head, const Eigen::VectorXd &logits)
    {
        std::vector<double> out(static_cast<std::size_t>(logits.size()));
        if (head == HeadKind::binary)
        {
            out[0] = 1.0 / (1.0 + std::exp(-logits[0]));
            return out;
        }
        const double mx = logits.maxCoeff();
        double s = 0.0;
        for (Index i = 0; i < logits.size(); ++i)
            s += out[static_cast<std::size_t>(i)] = std::exp(logits[i] - mx);
        for (auto &v : out)
            v /= s;
        return out;
    }

    double head_loss(HeadKind head, const Eigen::VectorXd &logits, const std::vector<double> &target,
                     Eigen::VectorXd *dlogits)
    {
        if (target.size() != static_cast<std::size_t>(logits.size()))
            throw Error(ErrorCode::invalid_argument, "training target has " + std::to_string(target.size()) +
                                                         " entries, network head has " + std::to_string(logits.size()));
        if (head == HeadKind::binary)
        {
            const double z = logits[0], t = target[0];
            // softplus(z) - t*z, written to avoid overflow
            const double loss = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - t * z;
            if (dlogits)
                *dlogits = Eigen::VectorXd::Constant(1, 1.0 / (1.0 + std::exp(-z)) - t);
            return loss;
        }
        const double mx = logits.maxCoeff();
        const double lse = mx + std::log((logits.array() - mx).exp().sum());
        double loss = 0.0, tsum = 0.0;
        for (Index i = 0; i < logits.size(); ++i)
        {
            const double t = target[static_cast<std::size_t>(i)];
            if (t > 0.0)
                loss -= t * (logits[i] - lse);
            tsum += t;
        }
        if (dlogits)
        {
            dlogits->resize(logits.size());
            for (Index i = 0; i < logits.size(); ++i)
                (*dlogits)[i] = tsum * std::exp(logits[i] - lse) - target[static_cast<std::size_t>(i)];
        }
        return loss;
    }
}

namespace lidarbeam
{
    double Network::loss_and_gradient(std::span<const Sample> batch, double l2, std::vector<double> *grad,
                                      std::mt19937_64 *rng) const
    {
        if (batch.empty())
            throw Error(ErrorCode::invalid_argument, "loss_and_gradient: empty batch");
        if (grad)
            grad->assign(parameter_count(), 0.0);
        detail::Workspace ws;
        double loss = 0.0;
        Eigen::VectorXd dl;
        for (const auto &s : batch)
        {
            const Eigen::VectorXd logits = detail::forward(*this, s.input, ws, rng, grad != nullptr);
            loss += detail::head_loss(spec_.head, logits, s.target, grad ? &dl : nullptr);
            if (grad)
                detail::backward(*this, ws, dl, grad->data());
        }
        const double inv = 1.0 / static_cast<double>(batch.size());
        loss *= inv;
        std::size_t off = 0;
        for (const auto &L : layers_)
        {
            loss += l2 * L.W.squaredNorm();
            if (grad)
            {
                Eigen::Map<Eigen::VectorXd> g(grad->data() + off, L.W.size() + L.b.size());
                g *= inv;
                g.head(L.W.size()) += 2.0 * l2 * Eigen::Map<const Eigen::VectorXd>(L.W.data(), L.W.size());
            }
            off += static_cast<std::size_t>(L.W.size() + L.b.size());
        }
        return loss;
    }
}
