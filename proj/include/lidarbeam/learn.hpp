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

#include "lidarbeam/features.hpp"
#include "lidarbeam/raytrace.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lidarbeam
{
    enum class LayerKind : std::uint8_t
    {
        conv = 0,
        maxpool = 1,
        flatten = 2,
        dense = 3,
        dropout = 4
    };

    enum class Activation : std::uint8_t
    {
        relu = 0,
        linear = 1
    };

    enum class HeadKind : std::uint8_t
    {
        binary = 0, // sigmoid + binary cross-entropy
        top_m = 1   // softmax + categorical cross-entropy
    };

    struct LayerSpec
    {
        LayerKind kind = LayerKind::conv;
        int kernel = 0;      // conv: odd square kernel, same padding
        int width = 0;       // conv: output channels; dense: output units
        Activation activation = Activation::relu;
        double dropout = 0.0; // dropout layers only
        int pool = 0;        // maxpool factor

        static LayerSpec conv_layer(int kernel, int channels) { return {LayerKind::conv, kernel, channels}; }
        static LayerSpec pool_layer(int factor) { return {LayerKind::maxpool, 0, 0, Activation::linear, 0.0, factor}; }
        static LayerSpec flatten_layer() { return {LayerKind::flatten, 0, 0, Activation::linear}; }
        static LayerSpec dense_layer(int units, Activation act = Activation::relu) { return {LayerKind::dense, 0, units, act}; }
        static LayerSpec dropout_layer(double rate) { return {LayerKind::dropout, 0, 0, Activation::linear, rate}; }
    };

    struct Shape
    {
        int channels = 1, height = 1, width = 1;
        std::size_t size() const { return static_cast<std::size_t>(channels) * height * width; }
        friend bool operator==(const Shape &, const Shape &) = default;
    };

    // Ordered layer list; the last layer is the dense head (num_classes units for
    // top_m, one unit for binary) whose output goes through softmax or sigmoid.
    struct NetworkSpec
    {
        std::vector<LayerSpec> layers;
        HeadKind head = HeadKind::top_m;
        int num_classes = 1;

        // 13 layers, 7 convolutions with kernels 13 down to 3.
        static NetworkSpec reference(HeadKind head, int num_classes);

        // Checks the reference-layout invariants (7 convolutions, non-increasing
        // kernels from 13 to 3, 0.5e5..2e5 parameters) for the given input.
        void check_reference_layout(const Shape &input) const;

        std::string descriptor() const; // JSON
        static NetworkSpec from_descriptor(const std::string &json);
    };

    // Sparse channel-major input (index = (c*height + h)*width + w).
    struct SparseInput
    {
        Shape shape;
        std::vector<std::uint32_t> index;
        std::vector<double> value;

        static SparseInput from_dense(const InputTensor &t);
        InputTensor dense() const;
    };

    struct Sample
    {
        SparseInput input;
        std::vector<double> target; // distribution (top_m) or {0|1} (binary; 1 = LOS)
    };

    class Network
    {
    public:
        // Weights drawn from a fan-in scaled uniform (He for rectifier layers,
        // Glorot for the linear head), biases zero. Throws on shape mismatch.
        Network(NetworkSpec spec, Shape input, std::uint64_t seed);

        const NetworkSpec &spec() const { return spec_; }
        const Shape &input_shape() const { return input_; }
        std::size_t parameter_count() const;

        // Head output: class probabilities (top_m) or a single P(LOS) (binary).
        std::vector<double> predict(const SparseInput &x) const;
        std::vector<double> predict(const InputTensor &x) const { return predict(SparseInput::from_dense(x)); }

        // Mean cross-entropy over the samples plus the L2 penalty on weights,
        // accumulating the gradient (same layout as parameters()) into `grad`.
        // Dropout is active only when `rng` is given.
        double loss_and_gradient(std::span<const Sample> batch, double l2, std::vector<double> *grad,
                                 std::mt19937_64 *rng = nullptr) const;

        // Flat parameter access in layer order (weights then biases per layer).
        std::vector<double> parameters() const;
        void set_parameters(std::span<const double> flat);

        void save(std::ostream &out) const;
        static Network load(std::istream &in);

        struct Layer
        {
            LayerSpec spec;
            Shape in, out;
            Eigen::MatrixXd W; // conv: (in_channels*k*k) x out_channels; dense: out x in
            Eigen::VectorXd b;
        };
        const std::vector<Layer> &layers() const { return layers_; }

    private:
        Network() = default;
        void init_shapes();

        NetworkSpec spec_;
        Shape input_;
        std::vector<Layer> layers_;
    };

    Network build_network(const NetworkSpec &spec, const Shape &input, std::uint64_t seed);

    struct TrainConfig
    {
        int epochs = 30;
        int batch_size = 32;
        double rho = 0.95;
        double epsilon = 1e-6;
        double learning_rate = 0.5;
        double l2 = 1e-4;
        std::optional<double> dropout; // overrides every dropout layer when set
        std::uint64_t seed = 1;

        void validate() const;
    };

    struct EpochLoss
    {
        int epoch = 0;
        double train_loss = 0.0;
        double val_loss = std::numeric_limits<double>::quiet_NaN();
    };

    // Adadelta mini-batch training; single-threaded and bit-reproducible for a fixed seed.
    std::vector<EpochLoss> train(Network &network, std::span<const Sample> train_set, const TrainConfig &cfg,
                                 std::span<const Sample> validation_set = {},
                                 const std::function<void(const EpochLoss &)> &on_epoch = {});

    void write_loss_csv(const std::vector<EpochLoss> &history, std::ostream &out);

    // Indices of the M largest outputs, descending; ties to the smaller index.
    std::vector<int> top_m_indices(std::span<const double> scores, int M);
    std::vector<int> predict_top_m(const Network &network, const SparseInput &x, int M);
    LinkState predict_los(const Network &network, const SparseInput &x, double threshold = 0.5);

    // Distance from every point to the segment p_b -> p_v, minimized; +inf for an empty cloud.
    double min_dist_to_line(const PointCloud &cloud, const Vec3 &p_b, const Vec3 &p_v);

    struct StumpModel
    {
        double gamma = 0.0; // NLOS iff d < gamma

        LinkState predict(double d) const { return d < gamma ? LinkState::nlos : LinkState::los; }
    };

    StumpModel fit_stump(std::span<const double> dhats, std::span<const LinkState> labels);
    double stump_error(const StumpModel &model, std::span<const double> dhats, std::span<const LinkState> labels);
}
