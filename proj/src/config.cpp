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

#include "lidarbeam/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lidarbeam
{
    using nlohmann::json;

    namespace
    {
        [[noreturn]] void config_error(const std::string &field, const std::string &why)
        {
            throw Error(ErrorCode::config, "config field '" + field + "': " + why);
        }

        // Reads known keys of one JSON object and rejects the rest.
        class Section
        {
        public:
            Section(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    config_error(path_, "must be an object");
            }

            template <typename T>
            void get(const char *key, T &out)
            {
                seen_.insert(key);
                if (!j_.contains(key))
                    return;
                try
                {
                    out = j_.at(key).get<T>();
                }
                catch (const json::exception &)
                {
                    config_error(name(key), "has the wrong type");
                }
            }

            bool has(const char *key) const { return j_.contains(key); }

            Section sub(const char *key)
            {
                seen_.insert(key);
                static const json empty = json::object();
                return Section(j_.contains(key) ? j_.at(key) : empty, name(key));
            }

            const json *raw(const char *key)
            {
                seen_.insert(key);
                return j_.contains(key) ? &j_.at(key) : nullptr;
            }

            std::string name(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!seen_.count(it.key()))
                        config_error(name(it.key()), "unknown field");
            }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> seen_;
        };

        json vec3(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

        void read_vec3(Section &s, const char *key, Vec3 &v)
        {
            std::array<double, 3> a{v.x(), v.y(), v.z()};
            s.get(key, a);
            v = Vec3(a[0], a[1], a[2]);
        }

        void read_array(Section &s, const char *key, ArrayGeometry &a)
        {
            auto sec = s.sub(key);
            sec.get("n1", a.n1);
            sec.get("n2", a.n2);
            sec.get("element_spacing", a.element_spacing);
            sec.finish();
        }

        json write_array(const ArrayGeometry &a)
        {
            return json{{"n1", a.n1}, {"n2", a.n2}, {"element_spacing", a.element_spacing}};
        }

        std::vector<std::pair<double, double>> grid(std::array<double, 2> az, std::array<double, 2> el, int naz, int nel)
        {
            std::vector<std::pair<double, double>> g;
            auto at = [](std::array<double, 2> r, int n, int i) {
                return n == 1 ? 0.5 * (r[0] + r[1]) : r[0] + (r[1] - r[0]) * i / (n - 1);
            };
            for (int i = 0; i < naz; ++i)
                for (int k = 0; k < nel; ++k)
                    g.emplace_back(at(az, naz, i) * pi / 180.0, at(el, nel, k) * pi / 180.0);
            return g;
        }
    }

    void CodebookConfig::validate() const
    {
        try
        {
            tx.validate();
        }
        catch (const Error &e)
        {
            config_error("codebook.tx", e.what());
        }
        try
        {
            rx.validate();
        }
        catch (const Error &e)
        {
            config_error("codebook.rx", e.what());
        }
        if (tx_azimuth_points < 0 || tx_elevation_points < 0 || rx_azimuth_points < 0 || rx_elevation_points < 0)
            config_error("codebook", "grid point counts must be nonnegative");
        if (tx_random < 0 || rx_random < 0)
            config_error("codebook", "random vector counts must be nonnegative");
        if (min_count < 0)
            config_error("codebook.min_count", "must be nonnegative");
    }

    std::vector<std::pair<double, double>> CodebookConfig::tx_grid() const
    {
        return grid(tx_azimuth_deg, tx_elevation_deg, tx_azimuth_points, tx_elevation_points);
    }

    std::vector<std::pair<double, double>> CodebookConfig::rx_grid() const
    {
        return grid(rx_azimuth_deg, rx_elevation_deg, rx_azimuth_points, rx_elevation_points);
    }

    const char *to_string(NoiseMode m) { return m == NoiseMode::noisy ? "noisy" : "none"; }

    NoiseMode noise_mode_from(const std::string &s)
    {
        if (s == "none" || s == "noise-free")
            return NoiseMode::none;
        if (s == "noisy")
            return NoiseMode::noisy;
        throw Error(ErrorCode::invalid_argument, "noise mode must be 'none' or 'noisy', got '" + s + "'");
    }

    void RunConfig::validate() const
    {
        scene.validate();
        try
        {
            lidar.validate();
            raytrace.validate();
            ofdm.validate();
            features.validate();
        }
        catch (const Error &e)
        {
            throw Error(ErrorCode::config, e.what());
        }
        codebook.validate();
        train.validate();
        if (ofdm.carrier_hz != raytrace.carrier_hz)
            config_error("ofdm.carrier_hz", "must equal raytrace.carrier_hz");
        if (!(split_fraction > 0.0 && split_fraction < 1.0))
            config_error("split_fraction", "must be in (0, 1)");
        if (!(noisy_sigma_G >= 0.0) || !(noisy_sigma_L >= 0.0))
            config_error("noise", "standard deviations must be nonnegative");
        if (!(clip_db >= 0.0))
            config_error("clip_db", "must be nonnegative");
        if (M.empty())
            config_error("M", "must list at least one value");
        for (int m : M)
            if (m < 1)
                config_error("M", "entries must be >= 1");
        if (!(rt_floor > 0.0 && rt_floor <= 1.0))
            config_error("rt_floor", "must be in (0, 1]");
        if (los_detector_epochs < 1)
            config_error("los_detector_epochs", "must be >= 1");
    }

    RunConfig RunConfig::with_noise(NoiseMode mode) const
    {
        RunConfig c = *this;
        c.lidar.sigma_L = mode == NoiseMode::noisy ? noisy_sigma_L : 0.0;
        c.features.sigma_G = mode == NoiseMode::noisy ? noisy_sigma_G : 0.0;
        return c;
    }

    RunConfig parse_run_config(const std::string &json_text)
    {
        json root;
        try
        {
            root = json::parse(json_text);
        }
        catch (const json::exception &e)
        {
            throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
        }
        RunConfig c;
        Section top(root, "");
        {
            auto s = top.sub("scene");
            auto &sc = c.scene;
            s.get("canyon_length_m", sc.canyon_length_m);
            s.get("canyon_width_m", sc.canyon_width_m);
            s.get("building_height_range_m", sc.building_height_range_m);
            s.get("building_width_range_m", sc.building_width_range_m);
            s.get("building_gap_range_m", sc.building_gap_range_m);
            s.get("building_depth_m", sc.building_depth_m);
            s.get("slot_length_m", sc.slot_length_m);
            s.get("vehicle_count_range", sc.vehicle_count_range);
            s.get("ground", sc.ground);
            read_vec3(s, "bs_position", sc.bs_position);
            if (const json *lanes = s.raw("lanes"))
            {
                if (!lanes->is_array())
                    config_error("scene.lanes", "must be an array");
                sc.lanes.clear();
                for (std::size_t i = 0; i < lanes->size(); ++i)
                {
                    Section l((*lanes)[i], "scene.lanes[" + std::to_string(i) + "]");
                    Lane lane;
                    l.get("x", lane.x);
                    l.get("direction", lane.direction);
                    l.finish();
                    sc.lanes.push_back(lane);
                }
            }
            if (const json *classes = s.raw("size_classes"))
            {
                if (!classes->is_array())
                    config_error("scene.size_classes", "must be an array");
                sc.size_classes.clear();
                for (std::size_t i = 0; i < classes->size(); ++i)
                {
                    Section l((*classes)[i], "scene.size_classes[" + std::to_string(i) + "]");
                    SizeClass k;
                    l.get("name", k.name);
                    l.get("length", k.length);
                    l.get("width", k.width);
                    l.get("height", k.height);
                    l.get("weight", k.weight);
                    l.finish();
                    sc.size_classes.push_back(k);
                }
            }
            {
                auto z = s.sub("zone");
                z.get("x1", sc.zone.x1);
                z.get("y1", sc.zone.y1);
                z.get("x2", sc.zone.x2);
                z.get("y2", sc.zone.y2);
                z.get("h", sc.zone.h);
                z.finish();
            }
            s.finish();
        }
        {
            auto s = top.sub("lidar");
            s.get("azimuth_resolution_deg", c.lidar.azimuth_resolution_deg);
            s.get("elevation_angles_deg", c.lidar.elevation_angles_deg);
            s.get("max_range", c.lidar.max_range);
            s.get("sensor_height_offset", c.lidar.sensor_height_offset);
            s.get("sigma_L", c.lidar.sigma_L);
            s.finish();
        }
        {
            auto s = top.sub("raytrace");
            s.get("max_order", c.raytrace.max_order);
            s.get("carrier_hz", c.raytrace.carrier_hz);
            s.get("cap", c.raytrace.cap);
            s.get("reflection_magnitude", c.raytrace.reflection_magnitude);
            s.get("reflection_phase", c.raytrace.reflection_phase);
            s.get("random_phase", c.raytrace.random_phase);
            s.finish();
        }
        {
            auto s = top.sub("ofdm");
            s.get("K", c.ofdm.K);
            s.get("bandwidth_hz", c.ofdm.bandwidth_hz);
            s.get("carrier_hz", c.ofdm.carrier_hz);
            s.get("L_taps", c.ofdm.L_taps);
            s.get("rolloff", c.ofdm.rolloff);
            s.finish();
        }
        {
            auto s = top.sub("codebook");
            auto &cb = c.codebook;
            read_array(s, "tx", cb.tx);
            read_array(s, "rx", cb.rx);
            s.get("tx_azimuth_deg", cb.tx_azimuth_deg);
            s.get("tx_elevation_deg", cb.tx_elevation_deg);
            s.get("tx_azimuth_points", cb.tx_azimuth_points);
            s.get("tx_elevation_points", cb.tx_elevation_points);
            s.get("rx_azimuth_deg", cb.rx_azimuth_deg);
            s.get("rx_elevation_deg", cb.rx_elevation_deg);
            s.get("rx_azimuth_points", cb.rx_azimuth_points);
            s.get("rx_elevation_points", cb.rx_elevation_points);
            s.get("tx_random", cb.tx_random);
            s.get("rx_random", cb.rx_random);
            s.get("min_count", cb.min_count);
            s.finish();
        }
        {
            auto s = top.sub("features");
            s.get("b_x", c.features.b_x);
            s.get("b_y", c.features.b_y);
            s.get("b_z", c.features.b_z);
            s.get("d_max", c.features.d_max);
            s.get("ground_z_min", c.features.ground_z_min);
            s.get("sigma_G", c.features.sigma_G);
            s.finish();
        }
        {
            auto s = top.sub("train");
            auto &t = c.train;
            s.get("epochs", t.epochs);
            s.get("batch_size", t.batch_size);
            s.get("rho", t.rho);
            s.get("epsilon", t.epsilon);
            s.get("learning_rate", t.learning_rate);
            s.get("l2", t.l2);
            if (const json *d = s.raw("dropout"); d && !d->is_null())
            {
                if (!d->is_number())
                    config_error("train.dropout", "has the wrong type");
                t.dropout = d->get<double>();
            }
            s.get("seed", t.seed);
            s.finish();
        }
        {
            auto s = top.sub("noise");
            s.get("sigma_G", c.noisy_sigma_G);
            s.get("sigma_L", c.noisy_sigma_L);
            s.finish();
        }
        top.get("episodes", c.episodes);
        top.get("split_fraction", c.split_fraction);
        top.get("seed", c.seed);
        top.get("clip_db", c.clip_db);
        top.get("M", c.M);
        top.get("rt_floor", c.rt_floor);
        top.get("los_detector_epochs", c.los_detector_epochs);
        top.finish();
        c.raytrace.carrier_hz = top.has("raytrace") && root["raytrace"].contains("carrier_hz") ? c.raytrace.carrier_hz
                                                                                              : c.ofdm.carrier_hz;
        c.validate();
        return c;
    }

    RunConfig load_run_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::io, "cannot open config file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_run_config(ss.str());
    }

    std::string to_json(const RunConfig &c)
    {
        json j;
        const auto &sc = c.scene;
        json lanes = json::array(), classes = json::array();
        for (const auto &l : sc.lanes)
            lanes.push_back({{"x", l.x}, {"direction", l.direction}});
        for (const auto &k : sc.size_classes)
            classes.push_back({{"name", k.name}, {"length", k.length}, {"width", k.width}, {"height", k.height}, {"weight", k.weight}});
        j["scene"] = {{"canyon_length_m", sc.canyon_length_m},
                      {"canyon_width_m", sc.canyon_width_m},
                      {"building_height_range_m", sc.building_height_range_m},
                      {"building_width_range_m", sc.building_width_range_m},
                      {"building_gap_range_m", sc.building_gap_range_m},
                      {"building_depth_m", sc.building_depth_m},
                      {"slot_length_m", sc.slot_length_m},
                      {"vehicle_count_range", sc.vehicle_count_range},
                      {"ground", sc.ground},
                      {"bs_position", vec3(sc.bs_position)},
                      {"lanes", lanes},
                      {"size_classes", classes},
                      {"zone", {{"x1", sc.zone.x1}, {"y1", sc.zone.y1}, {"x2", sc.zone.x2}, {"y2", sc.zone.y2}, {"h", sc.zone.h}}}};
        j["lidar"] = {{"azimuth_resolution_deg", c.lidar.azimuth_resolution_deg},
                      {"elevation_angles_deg", c.lidar.elevation_angles_deg},
                      {"max_range", c.lidar.max_range},
                      {"sensor_height_offset", c.lidar.sensor_height_offset},
                      {"sigma_L", c.lidar.sigma_L}};
        j["raytrace"] = {{"max_order", c.raytrace.max_order},
                         {"carrier_hz", c.raytrace.carrier_hz},
                         {"cap", c.raytrace.cap},
                         {"reflection_magnitude", c.raytrace.reflection_magnitude},
                         {"reflection_phase", c.raytrace.reflection_phase},
                         {"random_phase", c.raytrace.random_phase}};
        j["ofdm"] = {{"K", c.ofdm.K},
                     {"bandwidth_hz", c.ofdm.bandwidth_hz},
                     {"carrier_hz", c.ofdm.carrier_hz},
                     {"L_taps", c.ofdm.L_taps},
                     {"rolloff", c.ofdm.rolloff}};
        const auto &cb = c.codebook;
        j["codebook"] = {{"tx", write_array(cb.tx)},
                         {"rx", write_array(cb.rx)},
                         {"tx_azimuth_deg", cb.tx_azimuth_deg},
                         {"tx_elevation_deg", cb.tx_elevation_deg},
                         {"tx_azimuth_points", cb.tx_azimuth_points},
                         {"tx_elevation_points", cb.tx_elevation_points},
                         {"rx_azimuth_deg", cb.rx_azimuth_deg},
                         {"rx_elevation_deg", cb.rx_elevation_deg},
                         {"rx_azimuth_points", cb.rx_azimuth_points},
                         {"rx_elevation_points", cb.rx_elevation_points},
                         {"tx_random", cb.tx_random},
                         {"rx_random", cb.rx_random},
                         {"min_count", cb.min_count}};
        j["features"] = {{"b_x", c.features.b_x},
                         {"b_y", c.features.b_y},
                         {"b_z", c.features.b_z},
                         {"d_max", c.features.d_max},
                         {"ground_z_min", c.features.ground_z_min},
                         {"sigma_G", c.features.sigma_G}};
        const auto &t = c.train;
        j["train"] = {{"epochs", t.epochs},
                      {"batch_size", t.batch_size},
                      {"rho", t.rho},
                      {"epsilon", t.epsilon},
                      {"learning_rate", t.learning_rate},
                      {"l2", t.l2},
                      {"dropout", t.dropout ? json(*t.dropout) : json(nullptr)},
                      {"seed", t.seed}};
        j["noise"] = {{"sigma_G", c.noisy_sigma_G}, {"sigma_L", c.noisy_sigma_L}};
        j["episodes"] = c.episodes;
        j["split_fraction"] = c.split_fraction;
        j["seed"] = c.seed;
        j["clip_db"] = c.clip_db;
        j["M"] = c.M;
        j["rt_floor"] = c.rt_floor;
        j["los_detector_epochs"] = c.los_detector_epochs;
        return j.dump();
    }

    std::uint64_t config_hash(const RunConfig &cfg)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char ch : to_json(cfg))
        {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        return h;
    }
}
