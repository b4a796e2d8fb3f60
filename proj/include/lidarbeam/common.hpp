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

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidarbeam
{
    using Vec3 = Eigen::Vector3d;
    using cdouble = std::complex<double>;

    inline constexpr double speed_of_light = 299792458.0;
    inline constexpr double pi = 3.14159265358979323846;

    // Error categories. The numeric values are mirrored by the C API status codes.
    enum class ErrorCode : int
    {
        invalid_argument = 1,
        config = 2,
        placement = 3,
        outage = 4,
        divergence = 5,
        io = 6,
        format = 7,
        empty_split = 8,
        internal = 9
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    // Deterministic sub-stream seeding: the same (base, stream ids) always yields the same engine.
    inline std::mt19937_64 make_engine(std::uint64_t base, std::initializer_list<std::uint64_t> streams = {})
    {
        std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32)};
        for (auto s : streams)
        {
            words.push_back(static_cast<std::uint32_t>(s));
            words.push_back(static_cast<std::uint32_t>(s >> 32));
        }
        std::seed_seq seq(words.begin(), words.end());
        return std::mt19937_64(seq);
    }
}
