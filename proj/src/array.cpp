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
    void ArrayGeometry::validate() const
    {
        if (n1 < 1 || n2 < 1)
            throw Error(ErrorCode::config, "array geometry: n1 and n2 must be at least 1");
        if (!(element_spacing > 0.0))
            throw Error(ErrorCode::config, "array geometry: element_spacing must be positive");
    }

    Eigen::VectorXcd steering_vector(const ArrayGeometry &array, double phi, double theta)
    {
        array.validate();
        const double u = std::cos(theta) * std::sin(phi);
        const double v = std::sin(theta);
        const double scale = 1.0 / std::sqrt(static_cast<double>(array.size()));
        Eigen::VectorXcd a(array.size());
        for (int m1 = 0; m1 < array.n1; ++m1)
            for (int m2 = 0; m2 < array.n2; ++m2)
                a(m1 * array.n2 + m2) = std::polar(scale, 2.0 * pi * array.element_spacing * (m1 * u + m2 * v));
        return a;
    }
}
