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

// Little-endian scalar encoding shared by checkpoints and dataset records.

#include "lidarbeam/common.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

namespace lidarbeam::binio
{
    template <typename T>
    void put(std::string &buf, T v)
    {
        static_assert(std::is_arithmetic_v<T>);
        using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
        U u;
        std::memcpy(&u, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
    }

    // Bounds-checked cursor over a byte buffer.
    class Reader
    {
    public:
        Reader(const char *data, std::size_t size) : data_(data), size_(size) {}

        template <typename T>
        T get()
        {
            static_assert(std::is_arithmetic_v<T>);
            need(sizeof(T));
            using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                      std::conditional_t<sizeof(T) == 2, std::uint16_t,
                      std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
            U u = 0;
            for (std::size_t i = 0; i < sizeof(T); ++i)
                u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i));
            pos_ += sizeof(T);
            T v;
            std::memcpy(&v, &u, sizeof(T));
            return v;
        }

        std::string bytes(std::size_t n)
        {
            need(n);
            std::string s(data_ + pos_, n);
            pos_ += n;
            return s;
        }

        std::size_t remaining() const { return size_ - pos_; }

    private:
        void need(std::size_t n) const
        {
            if (n > size_ - pos_)
                throw Error(ErrorCode::format, "truncated binary data");
        }

        const char *data_;
        std::size_t size_;
        std::size_t pos_ = 0;
    };

    inline void write_all(std::ostream &out, const std::string &buf)
    {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out)
            throw Error(ErrorCode::io, "write failed");
    }

    inline std::string read_exact(std::istream &in, std::size_t n)
    {
        std::string s(n, '\0');
        in.read(s.data(), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw Error(ErrorCode::format, "unexpected end of file");
        return s;
    }
}
