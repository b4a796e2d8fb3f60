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

#include "lidarbeam/binio.hpp"
#include "lidarbeam/learn.hpp"
#include "network_impl.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lidarbeam
{
    namespace
    {
        const char *kind_name(LayerKind k)
        {
            switch (k)
            {
            case LayerKind::conv:
                return "conv";
            case LayerKind::maxpool:
                return "maxpool";
            case LayerKind::flatten:
                return "flatten";
            case LayerKind::dense:
                return "dense";
            case LayerKind::dropout:
                return "dropout";
            }
            return "?";
        }

        LayerKind kind_from(const std::string &s)
        {
            for (auto k : {LayerKind::conv, LayerKind::maxpool, LayerKind::flatten, LayerKind::dense, LayerKind::dropout})
                if (s == kind_name(k))
                    return k;
            throw Error(ErrorCode::format, "network descriptor: unknown layer kind '" + s + "'");
        }

        [[noreturn]] void layer_error(std::size_t i, const LayerSpec &l, const std::string &why)
        {
            throw Error(ErrorCode::invalid_argument,
                        "network layer " + std::to_string(i) + " (" + kind_name(l.kind) + "): " + why);
        }

        constexpr char kMagic[8] = {'L', 'B', 'N', 'N', 'C', 'K', 'P', 'T'};
        constexpr std::uint32_t kCheckpointVersion = 1;
    }

    NetworkSpec NetworkSpec::reference(HeadKind head, int num_classes)
    {
        NetworkSpec s;
        s.head = head;
        s.num_classes = head == HeadKind::binary ? 1 : num_classes;
        s.layers = {LayerSpec::conv_layer(13, 8),  LayerSpec::pool_layer(2),       LayerSpec::conv_layer(11, 16),
                    LayerSpec::conv_layer(9, 16),  LayerSpec::pool_layer(4),       LayerSpec::conv_layer(7, 16),
                    LayerSpec::conv_layer(5, 32),  LayerSpec::conv_layer(5, 32),   LayerSpec::conv_layer(3, 32),
                    LayerSpec::flatten_layer(),    LayerSpec::dense_layer(32),     LayerSpec::dropout_layer(0.25),
                    LayerSpec::dense_layer(s.num_classes, Activation::linear)};
        return s;
    }

    void NetworkSpec::check_reference_layout(const Shape &input) const
    {
        int convs = 0, prev_kernel = 1 << 30, first = 0, last = 0;
        for (const auto &l : layers)
        {
            if (l.kind != LayerKind::conv)
                continue;
            ++convs;
            if (l.kernel > prev_kernel)
                throw Error(ErrorCode::invalid_argument, "network spec: convolution kernels must not increase");
            if (convs == 1)
                first = l.kernel;
            last = l.kernel;
            prev_kernel = l.kernel;
        }
        if (layers.size() != 13)
            throw Error(ErrorCode::invalid_argument, "network spec: expected 13 layers, got " + std::to_string(layers.size()));
        if (convs != 7)
            throw Error(ErrorCode::invalid_argument, "network spec: expected 7 convolutional layers, got " + std::to_string(convs));
        if (first != 13 || last != 3)
            throw Error(ErrorCode::invalid_argument, "network spec: kernels must run from 13x13 down to 3x3");
        const auto params = Network(*this, input, 0).parameter_count();
        if (params < 50000 || params > 200000)
            throw Error(ErrorCode::invalid_argument,
                        "network spec: parameter count " + std::to_string(params) + " outside [0.5e5, 2e5]");
    }

    std::string NetworkSpec::descriptor() const
    {
        nlohmann::json j;
        j["head"] = head == HeadKind::binary ? "binary" : "top_m";
        j["num_classes"] = num_classes;
        auto arr = nlohmann::json::array();
        for (const auto &l : layers)
        {
            nlohmann::json e;
            e["kind"] = kind_name(l.kind);
            e["kernel"] = l.kernel;
            e["width"] = l.width;
            e["activation"] = l.activation == Activation::relu ? "relu" : "linear";
            e["dropout"] = l.dropout;
            e["pool"] = l.pool;
            arr.push_back(e);
        }
        j["layers"] = arr;
        return j.dump();
    }

    NetworkSpec NetworkSpec::from_descriptor(const std::string &text)
    {
        try
        {
            const auto j = nlohmann::json::parse(text);
            NetworkSpec s;
            const std::string head = j.at("head");
            if (head != "binary" && head != "top_m")
                throw Error(ErrorCode::format, "network descriptor: unknown head '" + head + "'");
            s.head = head == "binary" ? HeadKind::binary : HeadKind::top_m;
            s.num_classes = j.at("num_classes");
            for (const auto &e : j.at("layers"))
            {
                LayerSpec l;
                l.kind = kind_from(e.at("kind"));
                l.kernel = e.value("kernel", 0);
                l.width = e.value("width", 0);
                l.activation = e.value("activation", std::string("relu")) == "relu" ? Activation::relu : Activation::linear;
                l.dropout = e.value("dropout", 0.0);
                l.pool = e.value("pool", 0);
                s.layers.push_back(l);
            }
            return s;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::format, std::string("network descriptor: ") + e.what());
        }
    }

    SparseInput SparseInput::from_dense(const InputTensor &t)
    {
        SparseInput s;
        s.shape = {t.channels, t.height, t.width};
        for (std::size_t i = 0; i < t.data.size(); ++i)
            if (t.data[i] != 0.0)
            {
                s.index.push_back(static_cast<std::uint32_t>(i));
                s.value.push_back(t.data[i]);
            }
        return s;
    }

    InputTensor SparseInput::dense() const
    {
        InputTensor t;
        t.channels = shape.channels;
        t.height = shape.height;
        t.width = shape.width;
        t.data.assign(shape.size(), 0.0);
        for (std::size_t i = 0; i < index.size(); ++i)
            t.data[index[i]] = value[i];
        return t;
    }

    Network::Network(NetworkSpec spec, Shape input, std::uint64_t seed) : spec_(std::move(spec)), input_(input)
    {
        init_shapes();
        auto rng = make_engine(seed, {0x1417});
        for (std::size_t i = 0; i < layers_.size(); ++i)
        {
            auto &L = layers_[i];
            if (L.W.size() == 0)
                continue;
            const bool head = i + 1 == layers_.size();
            const double fan_in = static_cast<double>(L.spec.kind == LayerKind::conv ? L.W.rows() : L.W.cols());
            const double fan_out = static_cast<double>(L.spec.kind == LayerKind::conv ? L.W.cols() : L.W.rows());
            const double limit = head ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
            std::uniform_real_distribution<double> u(-limit, limit);
            for (Eigen::Index k = 0; k < L.W.size(); ++k)
                L.W.data()[k] = u(rng);
        }
    }

    void Network::init_shapes()
    {
        if (spec_.layers.empty())
            throw Error(ErrorCode::invalid_argument, "network spec: no layers");
        if (input_.channels < 1 || input_.height < 1 || input_.width < 1)
            throw Error(ErrorCode::invalid_argument, "network: input shape must be positive");
        Shape cur = input_;
        bool flat = false;
        layers_.clear();
        for (std::size_t i = 0; i < spec_.layers.size(); ++i)
        {
            const auto &ls = spec_.layers[i];
            Layer L;
            L.spec = ls;
            L.in = cur;
            switch (ls.kind)
            {
            case LayerKind::conv:
                if (flat)
                    layer_error(i, ls, "convolution after flatten");
                if (ls.kernel < 1 || ls.kernel % 2 == 0)
                    layer_error(i, ls, "kernel must be a positive odd size");
                if (ls.width < 1)
                    layer_error(i, ls, "needs at least one output channel");
                L.W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cur.channels) * ls.kernel * ls.kernel, ls.width);
                L.b = Eigen::VectorXd::Zero(ls.width);
                cur.channels = ls.width;
                break;
            case LayerKind::maxpool:
                if (flat)
                    layer_error(i, ls, "pooling after flatten");
                if (ls.pool < 1 || cur.height % ls.pool || cur.width % ls.pool)
                    layer_error(i, ls, "pool factor " + std::to_string(ls.pool) + " does not divide " +
                                           std::to_string(cur.height) + "x" + std::to_string(cur.width));
                cur.height /= ls.pool;
                cur.width /= ls.pool;
                break;
            case LayerKind::flatten:
                if (flat)
                    layer_error(i, ls, "input is already flat");
                cur = Shape{static_cast<int>(cur.size()), 1, 1};
                flat = true;
                break;
            case LayerKind::dense:
                if (!flat)
                    layer_error(i, ls, "dense layer needs a flattened input");
                if (ls.width < 1)
                    layer_error(i, ls, "needs at least one unit");
                L.W = Eigen::MatrixXd::Zero(ls.width, cur.channels);
                L.b = Eigen::VectorXd::Zero(ls.width);
                cur = Shape{ls.width, 1, 1};
                break;
            case LayerKind::dropout:
                if (!(ls.dropout >= 0.0 && ls.dropout < 1.0))
                    layer_error(i, ls, "rate must be in [0, 1)");
                break;
            }
            L.out = cur;
            layers_.push_back(std::move(L));
        }
        const auto &head = spec_.layers.back();
        const int units = spec_.head == HeadKind::binary ? 1 : spec_.num_classes;
        if (head.kind != LayerKind::dense || head.width != units || head.activation != Activation::linear)
            throw Error(ErrorCode::invalid_argument, "network spec: last layer must be a linear dense layer with " +
                                                         std::to_string(units) + " units");
    }

    std::size_t Network::parameter_count() const
    {
        std::size_t n = 0;
        for (const auto &L : layers_)
            n += static_cast<std::size_t>(L.W.size() + L.b.size());
        return n;
    }

    std::vector<double> Network::parameters() const
    {
        std::vector<double> flat;
        flat.reserve(parameter_count());
        for (const auto &L : layers_)
        {
            flat.insert(flat.end(), L.W.data(), L.W.data() + L.W.size());
            flat.insert(flat.end(), L.b.data(), L.b.data() + L.b.size());
        }
        return flat;
    }

    void Network::set_parameters(std::span<const double> flat)
    {
        if (flat.size() != parameter_count())
            throw Error(ErrorCode::invalid_argument, "set_parameters: size mismatch");
        std::size_t off = 0;
        for (auto &L : layers_)
        {
            std::copy_n(flat.data() + off, L.W.size(), L.W.data());
            off += static_cast<std::size_t>(L.W.size());
            std::copy_n(flat.data() + off, L.b.size(), L.b.data());
            off += static_cast<std::size_t>(L.b.size());
        }
    }

    std::vector<double> Network::predict(const SparseInput &x) const
    {
        detail::Workspace ws;
        const Eigen::VectorXd logits = detail::forward(*this, x, ws, nullptr, false);
        return detail::head_output(spec_.head, logits);
    }

    void Network::save(std::ostream &out) const
    {
        nlohmann::json header;
        header["spec"] = nlohmann::json::parse(spec_.descriptor());
        header["input"] = {input_.channels, input_.height, input_.width};
        const std::string desc = header.dump();

        std::string buf(kMagic, kMagic + 8);
        binio::put<std::uint32_t>(buf, kCheckpointVersion);
        binio::put<std::uint32_t>(buf, static_cast<std::uint32_t>(desc.size()));
        buf += desc;
        std::uint32_t with_params = 0;
        for (const auto &L : layers_)
            with_params += L.W.size() ? 1u : 0u;
        binio::put<std::uint32_t>(buf, with_params);
        for (std::size_t i = 0; i < layers_.size(); ++i)
        {
            const auto &L = layers_[i];
            if (!L.W.size())
                continue;
            binio::put<std::uint32_t>(buf, static_cast<std::uint32_t>(i));
            binio::put<std::uint64_t>(buf, static_cast<std::uint64_t>(L.W.size() + L.b.size()));
            for (Eigen::Index k = 0; k < L.W.size(); ++k)
                binio::put<double>(buf, L.W.data()[k]);
            for (Eigen::Index k = 0; k < L.b.size(); ++k)
                binio::put<double>(buf, L.b.data()[k]);
        }
        binio::write_all(out, buf);
    }

    Network Network::load(std::istream &in)
    {
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        binio::Reader r(all.data(), all.size());
        if (r.bytes(8) != std::string(kMagic, kMagic + 8))
            throw Error(ErrorCode::format, "checkpoint: bad magic");
        const auto version = r.get<std::uint32_t>();
        if (version != kCheckpointVersion)
            throw Error(ErrorCode::format, "checkpoint: unsupported version " + std::to_string(version));
        const auto desc_len = r.get<std::uint32_t>();
        const auto header = nlohmann::json::parse(r.bytes(desc_len), nullptr, false);
        if (header.is_discarded() || !header.contains("spec") || !header.contains("input"))
            throw Error(ErrorCode::format, "checkpoint: malformed descriptor");
        Network net;
        net.spec_ = NetworkSpec::from_descriptor(header["spec"].dump());
        net.input_ = Shape{header["input"][0].get<int>(), header["input"][1].get<int>(), header["input"][2].get<int>()};
        net.init_shapes();
        const auto blocks = r.get<std::uint32_t>();
        for (std::uint32_t b = 0; b < blocks; ++b)
        {
            const auto idx = r.get<std::uint32_t>();
            const auto count = r.get<std::uint64_t>();
            if (idx >= net.layers_.size())
                throw Error(ErrorCode::format, "checkpoint: layer index out of range");
            auto &L = net.layers_[idx];
            if (count != static_cast<std::uint64_t>(L.W.size() + L.b.size()))
                throw Error(ErrorCode::format, "checkpoint: parameter count mismatch in layer " + std::to_string(idx));
            for (Eigen::Index k = 0; k < L.W.size(); ++k)
                L.W.data()[k] = r.get<double>();
            for (Eigen::Index k = 0; k < L.b.size(); ++k)
                L.b.data()[k] = r.get<double>();
        }
        if (r.remaining() != 0)
            throw Error(ErrorCode::format, "checkpoint: trailing bytes");
        return net;
    }

    Network build_network(const NetworkSpec &spec, const Shape &input, std::uint64_t seed)
    {
        return Network(spec, input, seed);
    }

    std::vector<int> top_m_indices(std::span<const double> scores, int M)
    {
        if (M < 1 || static_cast<std::size_t>(M) > scores.size())
            throw Error(ErrorCode::invalid_argument, "top_m: M must be in [1, number of classes]");
        std::vector<int> idx(scores.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + M, idx.end(), [&](int a, int b) {
            if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
                return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
            return a < b;
        });
        idx.resize(static_cast<std::size_t>(M));
        return idx;
    }

    std::vector<int> predict_top_m(const Network &network, const SparseInput &x, int M)
    {
        if (network.spec().head != HeadKind::top_m)
            throw Error(ErrorCode::invalid_argument, "predict_top_m: network has a binary head");
        const auto out = network.predict(x);
        return top_m_indices(out, M);
    }

    LinkState predict_los(const Network &network, const SparseInput &x, double threshold)
    {
        if (network.spec().head != HeadKind::binary)
            throw Error(ErrorCode::invalid_argument, "predict_los: network has a top-M head");
        return network.predict(x)[0] >= threshold ? LinkState::los : LinkState::nlos;
    }
}
