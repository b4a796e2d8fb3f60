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

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace lidarbeam
{
    void Codebook::validate() const
    {
        if (static_cast<std::size_t>(vectors.cols()) != kinds.size())
            throw Error(ErrorCode::invalid_argument, "codebook: provenance list does not match vector count");
        for (Eigen::Index c = 0; c < vectors.cols(); ++c)
            if (std::abs(vectors.col(c).norm() - 1.0) > 1e-12)
                throw Error(ErrorCode::invalid_argument, "codebook: vector " + std::to_string(c) + " is not unit norm");
    }

    Codebook Codebook::subset(std::span<const int> columns) const
    {
        Codebook out;
        out.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(columns.size()));
        for (std::size_t i = 0; i < columns.size(); ++i)
        {
            out.vectors.col(static_cast<Eigen::Index>(i)) = vectors.col(columns[i]);
            out.kinds.push_back(kinds[static_cast<std::size_t>(columns[i])]);
        }
        return out;
    }

    namespace
    {
        Eigen::VectorXcd dft_vector(const ArrayGeometry &array, int k1, int k2)
        {
            const double scale = 1.0 / std::sqrt(static_cast<double>(array.size()));
            Eigen::VectorXcd v(array.size());
            for (int m1 = 0; m1 < array.n1; ++m1)
                for (int m2 = 0; m2 < array.n2; ++m2)
                {
                    const double frac = static_cast<double>((k1 * m1) % array.n1) / array.n1 +
                                        static_cast<double>((k2 * m2) % array.n2) / array.n2;
                    v(m1 * array.n2 + m2) = std::polar(scale, 2.0 * pi * frac);
                }
            return v;
        }

        void append(std::vector<Eigen::VectorXcd> &cols, std::vector<CodevectorKind> &kinds, Eigen::VectorXcd v,
                    CodevectorKind kind)
        {
            v /= v.norm();
            for (const auto &c : cols)
                if (std::abs(c.dot(v)) > 1.0 - 1e-9)
                    return;
            cols.push_back(std::move(v));
            kinds.push_back(kind);
        }

        Codebook assemble(const std::vector<Eigen::VectorXcd> &cols, std::vector<CodevectorKind> kinds, int dim)
        {
            Codebook cb;
            cb.vectors.resize(dim, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t i = 0; i < cols.size(); ++i)
                cb.vectors.col(static_cast<Eigen::Index>(i)) = cols[i];
            cb.kinds = std::move(kinds);
            return cb;
        }

        void write_double(std::ostream &out, double v)
        {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, res.ptr - buf);
        }

        double parse_double(std::string_view s, const std::string &token)
        {
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw Error(ErrorCode::format, "codebook: malformed complex token '" + token + "'");
            return v;
        }

        cdouble parse_complex(const std::string &token)
        {
            if (token.size() < 2 || token.back() != 'j')
                throw Error(ErrorCode::format, "codebook: malformed complex token '" + token + "'");
            const std::string_view body(token.data(), token.size() - 1);
            // The imaginary sign is the last +/- not at the start and not part of an exponent.
            std::size_t split = std::string_view::npos;
            for (std::size_t i = body.size(); i-- > 1;)
                if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E')
                {
                    split = i;
                    break;
                }
            if (split == std::string_view::npos)
                throw Error(ErrorCode::format, "codebook: malformed complex token '" + token + "'");
            const double re = parse_double(body.substr(0, split), token);
            std::string_view im_text = body.substr(split + 1);
            double im = parse_double(im_text, token);
            if (body[split] == '-')
                im = -im;
            return {re, im};
        }
    }

    Codebook dft_codebook(const ArrayGeometry &array)
    {
        array.validate();
        std::vector<Eigen::VectorXcd> cols;
        std::vector<CodevectorKind> kinds;
        for (int k1 = 0; k1 < array.n1; ++k1)
            for (int k2 = 0; k2 < array.n2; ++k2)
            {
                cols.push_back(dft_vector(array, k1, k2));
                kinds.push_back(CodevectorKind::dft);
            }
        return assemble(cols, std::move(kinds), array.size());
    }

    Codebook build_candidate_codebook(const ArrayGeometry &array,
                                      std::span<const std::pair<double, double>> steered_angles, int n_random,
                                      std::uint64_t seed)
    {
        array.validate();
        if (n_random < 0)
            throw Error(ErrorCode::invalid_argument, "build_candidate_codebook: n_random must be nonnegative");
        std::vector<Eigen::VectorXcd> cols;
        std::vector<CodevectorKind> kinds;

        for (int k1 = 0; k1 < array.n1; ++k1)
            for (int k2 = 0; k2 < array.n2; ++k2)
                append(cols, kinds, dft_vector(array, k1, k2), CodevectorKind::dft);

        for (const auto &[phi, theta] : steered_angles)
            append(cols, kinds, steering_vector(array, phi, theta), CodevectorKind::steered);

        for (int k1 = 0; k1 < array.n1; ++k1)
            for (int k2 = 0; k2 < array.n2; ++k2)
            {
                const Eigen::VectorXcd base = dft_vector(array, k1, k2);
                if (k1 + 1 < array.n1)
                    append(cols, kinds, base + dft_vector(array, k1 + 1, k2), CodevectorKind::combo);
                if (k2 + 1 < array.n2)
                    append(cols, kinds, base + dft_vector(array, k1, k2 + 1), CodevectorKind::combo);
            }

        auto rng = make_engine(seed, {0xc0deb00c});
        std::normal_distribution<double> gauss;
        for (int r = 0; r < n_random; ++r)
        {
            Eigen::VectorXcd v(array.size());
            for (int i = 0; i < array.size(); ++i)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                v(i) = cdouble(re, im);
            }
            append(cols, kinds, std::move(v), CodevectorKind::random);
        }
        return assemble(cols, std::move(kinds), array.size());
    }

    void write_codebook(const Codebook &cb, std::ostream &out)
    {
        out << cb.dim() << ' ' << cb.size() << '\n';
        for (int c = 0; c < cb.size(); ++c)
        {
            for (int r = 0; r < cb.dim(); ++r)
            {
                if (r)
                    out << ' ';
                const cdouble z = cb.vectors(r, c);
                write_double(out, z.real());
                out << (std::signbit(z.imag()) ? '-' : '+');
                write_double(out, std::abs(z.imag()));
                out << 'j';
            }
            out << '\n';
        }
    }

    Codebook read_codebook(std::istream &in)
    {
        std::string header;
        if (!std::getline(in, header))
            throw Error(ErrorCode::format, "codebook: missing header line");
        std::istringstream hs(header);
        long n = -1, count = -1;
        if (!(hs >> n >> count) || n < 1 || count < 0)
            throw Error(ErrorCode::format, "codebook: header must be 'N count'");
        Codebook cb;
        cb.vectors.resize(n, count);
        cb.kinds.assign(static_cast<std::size_t>(count), CodevectorKind::unspecified);
        for (long c = 0; c < count; ++c)
        {
            std::string line;
            if (!std::getline(in, line))
                throw Error(ErrorCode::format, "codebook: expected " + std::to_string(count) + " vectors");
            std::istringstream ls(line);
            std::string token;
            long r = 0;
            while (ls >> token)
            {
                if (r >= n)
                    throw Error(ErrorCode::format, "codebook: too many entries in vector " + std::to_string(c));
                cb.vectors(r++, c) = parse_complex(token);
            }
            if (r != n)
                throw Error(ErrorCode::format, "codebook: vector " + std::to_string(c) + " has " + std::to_string(r) +
                                                   " entries, expected " + std::to_string(n));
        }
        return cb;
    }
}
