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

namespace lidarbeam
{
    void OfdmConfig::validate() const
    {
        if (L_taps < 1)
            throw Error(ErrorCode::config, "ofdm config: L_taps must be at least 1");
        if (K < L_taps)
            throw Error(ErrorCode::config, "ofdm config: K must be at least L_taps");
        if (!(bandwidth_hz > 0.0))
            throw Error(ErrorCode::config, "ofdm config: bandwidth_hz must be positive");
        if (!(rolloff >= 0.0 && rolloff <= 1.0))
            throw Error(ErrorCode::config, "ofdm config: rolloff must be in [0, 1]");
    }

    double raised_cosine(double t, double Ts, double rolloff)
    {
        const double x = t / Ts;
        if (x == 0.0)
            return 1.0;
        const double sinc = std::sin(pi * x) / (pi * x);
        if (rolloff > 0.0)
        {
            const double edge = 1.0 / (2.0 * rolloff);
            if (std::abs(std::abs(x) - edge) < 1e-12)
            {
                const double s = std::sin(pi * edge) / (pi * edge);
                return pi / 4.0 * s;
            }
        }
        const double den = 1.0 - (2.0 * rolloff * x) * (2.0 * rolloff * x);
        return sinc * std::cos(pi * rolloff * x) / den;
    }

    ChannelTaps assemble_taps(const MpcList &mpcs, const OfdmConfig &cfg, const ArrayGeometry &tx_array,
                              const ArrayGeometry &rx_array)
    {
        cfg.validate();
        const int nt = tx_array.size(), nr = rx_array.size();
        const double scale = std::sqrt(static_cast<double>(nt) * nr);
        const double Ts = cfg.Ts();

        ChannelTaps out;
        out.taps.assign(static_cast<std::size_t>(cfg.L_taps), Eigen::MatrixXcd::Zero(nr, nt));
        for (const auto &m : mpcs)
        {
            const Eigen::VectorXcd ar = steering_vector(rx_array, m.phi_A, m.theta_A);
            const Eigen::VectorXcd at = steering_vector(tx_array, m.phi_D, m.theta_D);
            const Eigen::MatrixXcd outer = ar * at.adjoint();
            for (int n = 0; n < cfg.L_taps; ++n)
            {
                const double g = raised_cosine(n * Ts - m.tau, Ts, cfg.rolloff);
                if (g == 0.0)
                    continue;
                out.taps[static_cast<std::size_t>(n)] += (scale * g * m.alpha) * outer;
            }
        }
        return out;
    }

    namespace
    {
        // exp(sign * j 2 pi (k n mod K) / K), reduced modulo K for accuracy.
        cdouble twiddle(long k, long n, long K, double sign)
        {
            const long r = (k * n) % K;
            return std::polar(1.0, sign * 2.0 * pi * static_cast<double>(r) / static_cast<double>(K));
        }
    }

    FreqChannel freq_channel(const ChannelTaps &taps, int K)
    {
        const int L = static_cast<int>(taps.taps.size());
        if (K < L || K < 1)
            throw Error(ErrorCode::invalid_argument, "freq_channel: K must be at least the number of taps");
        FreqChannel out;
        if (L == 0)
            return out;
        const auto rows = taps.taps.front().rows(), cols = taps.taps.front().cols();
        const Eigen::Index cells = rows * cols;

        Eigen::MatrixXcd stacked(cells, L);
        for (int n = 0; n < L; ++n)
            stacked.col(n) = taps.taps[static_cast<std::size_t>(n)].reshaped();
        Eigen::MatrixXcd dft(L, K);
        for (int n = 0; n < L; ++n)
            for (int k = 0; k < K; ++k)
                dft(n, k) = twiddle(k, n, K, -1.0);
        const Eigen::MatrixXcd spectrum = stacked * dft;

        out.subcarriers.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            out.subcarriers[static_cast<std::size_t>(k)] = spectrum.col(k).reshaped(rows, cols);
        return out;
    }

    ChannelTaps inverse_freq_channel(const FreqChannel &H, int L_taps)
    {
        const int K = static_cast<int>(H.subcarriers.size());
        if (L_taps < 1 || L_taps > K)
            throw Error(ErrorCode::invalid_argument, "inverse_freq_channel: need 1 <= L_taps <= K");
        const auto rows = H.rows(), cols = H.cols();
        Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(rows) * cols, K);
        for (int k = 0; k < K; ++k)
            stacked.col(k) = H.subcarriers[static_cast<std::size_t>(k)].reshaped();
        Eigen::MatrixXcd idft(K, L_taps);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < L_taps; ++n)
                idft(k, n) = twiddle(k, n, K, 1.0) / static_cast<double>(K);
        const Eigen::MatrixXcd taps = stacked * idft;
        ChannelTaps out;
        out.taps.resize(static_cast<std::size_t>(L_taps));
        for (int n = 0; n < L_taps; ++n)
            out.taps[static_cast<std::size_t>(n)] = taps.col(n).reshaped(rows, cols);
        return out;
    }
}
