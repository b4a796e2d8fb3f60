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

#include "lidarbeam/scene.hpp"

#include <vector>

namespace lidarbeam
{
    // One propagation path. Angles are global: azimuth from +x in the xy-plane,
    // elevation from the horizon. Departure angles point from the transmitter
    // towards the first interaction, arrival angles from the receiver towards
    // the last one.
    struct Mpc
    {
        cdouble alpha{0.0, 0.0};
        double tau = 0.0;
        double phi_D = 0.0, theta_D = 0.0;
        double phi_A = 0.0, theta_A = 0.0;
        int order = 0;
        bool is_los = false;
    };

    using MpcList = std::vector<Mpc>;

    struct RayTraceConfig
    {
        int max_order = 2;                 // 0, 1 or 2 specular bounces
        double carrier_hz = 60e9;
        std::size_t cap = 25;              // strongest paths kept
        double reflection_magnitude = 0.5; // |Gamma| per bounce
        double reflection_phase = pi;      // arg(Gamma) per bounce
        bool random_phase = true;          // extra uniform [0, 2pi) phase per path
        std::uint64_t phase_seed = 0;

        void validate() const;
    };

    enum class LinkState : std::uint8_t
    {
        los = 0,
        nlos = 1,
        outage = 2
    };

    const char *to_string(LinkState s);

    // Image-method tracer over building/vehicle faces and the ground plane.
    // Returns at most config.cap paths sorted by descending |alpha| (ties: smaller delay).
    MpcList trace_mpcs(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const RayTraceConfig &config);

    LinkState link_state(const MpcList &mpcs);

    // Keeps the `cap` strongest paths; used by trace_mpcs.
    void cap_paths(MpcList &mpcs, std::size_t cap);

    // Unit direction -> (azimuth, elevation).
    std::pair<double, double> direction_angles(const Vec3 &unit);
    Vec3 angles_direction(double azimuth, double elevation);
}
