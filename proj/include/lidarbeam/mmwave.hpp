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

#include "lidarbeam/raytrace.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace lidarbeam
{
    // Uniform planar array in the yz-plane facing +x. Element (m1, m2) sits at
    // (0, m1*d, m2*d) wavelengths and has flat index m1*n2 + m2.
    struct ArrayGeometry
    {
        int n1 = 1;
        int n2 = 1;
        double element_spacing = 0.5; // wavelengths

        int size() const { return n1 * n2; }
        void validate() const;
    };

    // a(phi, theta): element (m1, m2) = exp(j 2 pi d (m1 u + m2 v)) / sqrt(N), with
    // u = cos(theta) sin(phi) and v = sin(theta) the y and z direction cosines.
    Eigen::VectorXcd steering_vector(const ArrayGeometry &array, double phi, double theta);

    struct OfdmConfig
    {
        int K = 64;                 // subcarriers
        double bandwidth_hz = 100e6;
        double carrier_hz = 60e9;
        int L_taps = 64;
        double rolloff = 0.1;

        double Ts() const { return 1.0 / bandwidth_hz; }
        void validate() const;
    };

    // Unit-peak raised-cosine pulse.
    double raised_cosine(double t, double Ts, double rolloff);

    struct ChannelTaps
    {
        std::vector<Eigen::MatrixXcd> taps; // L_taps matrices, N_r x N_t
    };

    struct FreqChannel
    {
        std::vector<Eigen::MatrixXcd> subcarriers; // K matrices, N_r x N_t
        int rows() const { return subcarriers.empty() ? 0 : static_cast<int>(subcarriers.front().rows()); }
        int cols() const { return subcarriers.empty() ? 0 : static_cast<int>(subcarriers.front().cols()); }
    };

    // H[n] = sqrt(Nt Nr) sum_l alpha_l g(n Ts - tau_l) a_r(phi_A, theta_A) a_t^H(phi_D, theta_D).
    ChannelTaps assemble_taps(const MpcList &mpcs, const OfdmConfig &cfg, const ArrayGeometry &tx_array,
                              const ArrayGeometry &rx_array);

    // H[k] = sum_n H[n] exp(-j 2 pi k n / K); requires K >= number of taps.
    FreqChannel freq_channel(const ChannelTaps &taps, int K);
    ChannelTaps inverse_freq_channel(const FreqChannel &H, int L_taps);

    enum class CodevectorKind : std::uint8_t
    {
        dft = 0,
        steered = 1,
        combo = 2,
        random = 3,
        unspecified = 4
    };

    // Unit-norm beamforming vectors stored column-wise.
    struct Codebook
    {
        Eigen::MatrixXcd vectors; // N x size()
        std::vector<CodevectorKind> kinds;

        int size() const { return static_cast<int>(vectors.cols()); }
        int dim() const { return static_cast<int>(vectors.rows()); }
        void validate() const;
        Codebook subset(std::span<const int> columns) const;
    };

    Codebook dft_codebook(const ArrayGeometry &array);

    // 2D-DFT vectors, steering vectors on `steered_angles` (phi, theta), normalized
    // sums of grid-adjacent DFT vectors, and n_random uniform unit vectors. Near
    // duplicates (|<a,b>| > 1 - 1e-9) keep their first occurrence.
    Codebook build_candidate_codebook(const ArrayGeometry &array,
                                      std::span<const std::pair<double, double>> steered_angles, int n_random,
                                      std::uint64_t seed);

    // Text format: "N count" header, then one vector per line as N "re+imj" tokens.
    void write_codebook(const Codebook &cb, std::ostream &out);
    Codebook read_codebook(std::istream &in);

    struct BeamPowerMatrix
    {
        Eigen::MatrixXd y; // |C_t| x |C_r|, row p = precoder, column q = combiner
        int tx_count() const { return static_cast<int>(y.rows()); }
        int rx_count() const { return static_cast<int>(y.cols()); }
        int flat(int p, int q) const { return p * rx_count() + q; }
    };

    struct BeamPair
    {
        int p = 0;
        int q = 0;
        friend bool operator==(const BeamPair &, const BeamPair &) = default;
    };

    struct LabelDistribution
    {
        std::vector<double> probs; // flat index p*|C_r| + q
    };

    // y[p][q] = sum_k |w_q^H H[k] f_p|^2
    BeamPowerMatrix beam_powers(const FreqChannel &H, const Codebook &Ct, const Codebook &Cr);

    // Argmax with ties to the smaller flat index. Throws Error(outage) on an all-zero matrix.
    BeamPair best_pair(const BeamPowerMatrix &y);

    // Zero every entry more than clip_db below the maximum, normalize to unit sum.
    LabelDistribution make_label(const BeamPowerMatrix &y, double clip_db = 6.0);

    // Streaming selection counter behind prune_codebooks.
    class CodebookPruner
    {
    public:
        CodebookPruner(Codebook candidates_t, Codebook candidates_r);
        // Returns false (and counts nothing) for an outage channel.
        bool add(const FreqChannel &H);
        void add_counts(const BeamPair &best);
        std::pair<Codebook, Codebook> finish(int min_count) const;
        const std::vector<long> &tx_counts() const { return tx_counts_; }
        const std::vector<long> &rx_counts() const { return rx_counts_; }
        const Codebook &candidates_t() const { return ct_; }
        const Codebook &candidates_r() const { return cr_; }

    private:
        Codebook ct_, cr_;
        std::vector<long> tx_counts_, rx_counts_;
        long channels_ = 0;
    };

    // Keeps the candidate vectors chosen as optimum more than min_count times.
    std::pair<Codebook, Codebook> prune_codebooks(const Codebook &candidates_t, const Codebook &candidates_r,
                                                  std::span<const FreqChannel> training_channels, int min_count);
}
