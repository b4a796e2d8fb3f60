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

#include "lidarbeam/dataset.hpp"
#include "lidarbeam/binio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace lidarbeam
{
    namespace
    {
        constexpr char kMagic[8] = {'L', 'B', 'D', 'A', 'T', 'S', 'E', 'T'};
        constexpr std::uint32_t kVersion = 1;

        void put_vec(std::string &b, const Vec3 &v)
        {
            for (int i = 0; i < 3; ++i)
                binio::put<double>(b, v[i]);
        }

        Vec3 get_vec(binio::Reader &r)
        {
            const double x = r.get<double>();
            const double y = r.get<double>();
            const double z = r.get<double>();
            return {x, y, z};
        }

        [[noreturn]] void invalid(const DatasetRecord &r, const std::string &why)
        {
            throw Error(ErrorCode::format, "record " + std::to_string(r.episode) + ": " + why);
        }

        bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
    }

    void DatasetRecord::validate(double clip_db) const
    {
        if (link_state(mpcs) != state)
            invalid(*this, "stored link state disagrees with the paths");
        if (y.y.size() == 0)
            invalid(*this, "empty beam power matrix");
        if (!y.y.allFinite() || (y.y.array() < 0.0).any())
            invalid(*this, "beam powers must be finite and nonnegative");
        if (state == LinkState::outage)
        {
            if (!label.probs.empty())
                invalid(*this, "outage record carries a label");
            return;
        }
        if (!(y.y.maxCoeff() > 0.0))
            invalid(*this, "non-outage record has an all-zero beam power matrix");
        if (!(best_pair(y) == best))
            invalid(*this, "stored best pair does not match the beam powers");
        const auto expect = make_label(y, clip_db);
        if (expect.probs.size() != label.probs.size())
            invalid(*this, "label length mismatch");
        for (std::size_t i = 0; i < expect.probs.size(); ++i)
            if (!same_bits(expect.probs[i], label.probs[i]))
                invalid(*this, "label does not re-derive from the beam powers");
        if (grid)
        {
            const auto n = static_cast<std::size_t>(grid->nx) * grid->ny * grid->nz;
            if (grid->counts.size() != n)
                invalid(*this, "histogram size mismatch");
        }
    }

    std::string encode_record(const DatasetRecord &r)
    {
        std::string b;
        b.reserve(256 + r.cloud.size() * 12 + static_cast<std::size_t>(r.y.y.size()) * 8);
        binio::put<std::uint64_t>(b, r.episode);
        binio::put<std::uint64_t>(b, r.scene_seed);
        put_vec(b, r.bs_position);
        put_vec(b, r.ego_position);
        put_vec(b, r.ego_estimate);
        binio::put<double>(b, r.ego_heading);
        for (double v : {r.zone.x1, r.zone.y1, r.zone.x2, r.zone.y2, r.zone.h})
            binio::put<double>(b, v);
        binio::put<std::uint32_t>(b, r.vehicle_count);
        binio::put<std::uint8_t>(b, static_cast<std::uint8_t>(r.noise));

        binio::put<std::uint64_t>(b, r.cloud.size());
        for (const auto &p : r.cloud.points)
            for (int i = 0; i < 3; ++i)
                binio::put<float>(b, static_cast<float>(p[i]));

        binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(r.mpcs.size()));
        for (const auto &m : r.mpcs)
        {
            for (double v : {m.alpha.real(), m.alpha.imag(), m.tau, m.phi_D, m.theta_D, m.phi_A, m.theta_A})
                binio::put<double>(b, v);
            binio::put<std::int32_t>(b, m.order);
            binio::put<std::uint8_t>(b, m.is_los ? 1 : 0);
        }

        binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(r.y.tx_count()));
        binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(r.y.rx_count()));
        for (int p = 0; p < r.y.tx_count(); ++p)
            for (int q = 0; q < r.y.rx_count(); ++q)
                binio::put<double>(b, r.y.y(p, q));

        binio::put<std::uint8_t>(b, static_cast<std::uint8_t>(r.state));
        binio::put<std::int32_t>(b, r.best.p);
        binio::put<std::int32_t>(b, r.best.q);
        std::uint32_t nnz = 0;
        for (double v : r.label.probs)
            nnz += v != 0.0;
        binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(r.label.probs.size()));
        binio::put<std::uint32_t>(b, nnz);
        for (std::size_t i = 0; i < r.label.probs.size(); ++i)
            if (r.label.probs[i] != 0.0)
            {
                binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(i));
                binio::put<double>(b, r.label.probs[i]);
            }

        binio::put<std::uint8_t>(b, r.grid ? 1 : 0);
        if (r.grid)
        {
            const auto &g = *r.grid;
            binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(g.nx));
            binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(g.ny));
            binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(g.nz));
            for (int v : g.bs_bin)
                binio::put<std::int32_t>(b, v);
            std::uint32_t cells = 0;
            for (auto c : g.counts)
                cells += c != 0;
            binio::put<std::uint32_t>(b, cells);
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j)
                    for (int k = 0; k < g.nz; ++k)
                        if (const auto c = g.at(i, j, k))
                        {
                            binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(i));
                            binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(j));
                            binio::put<std::uint32_t>(b, static_cast<std::uint32_t>(k));
                            binio::put<std::uint32_t>(b, c);
                        }
        }
        binio::put<std::uint8_t>(b, r.d_hat ? 1 : 0);
        if (r.d_hat)
            binio::put<double>(b, *r.d_hat);
        return b;
    }

    DatasetRecord decode_record(const std::string &bytes, bool keep_cloud)
    {
        binio::Reader rd(bytes.data(), bytes.size());
        DatasetRecord r;
        r.episode = rd.get<std::uint64_t>();
        r.scene_seed = rd.get<std::uint64_t>();
        r.bs_position = get_vec(rd);
        r.ego_position = get_vec(rd);
        r.ego_estimate = get_vec(rd);
        r.ego_heading = rd.get<double>();
        r.zone.x1 = rd.get<double>();
        r.zone.y1 = rd.get<double>();
        r.zone.x2 = rd.get<double>();
        r.zone.y2 = rd.get<double>();
        r.zone.h = rd.get<double>();
        r.vehicle_count = rd.get<std::uint32_t>();
        const auto noise = rd.get<std::uint8_t>();
        if (noise > 1)
            throw Error(ErrorCode::format, "record: bad noise tag");
        r.noise = static_cast<NoiseMode>(noise);

        const auto D = rd.get<std::uint64_t>();
        if (D > rd.remaining() / 12)
            throw Error(ErrorCode::format, "record: truncated point cloud");
        if (keep_cloud)
        {
            r.cloud.points.resize(D);
            for (auto &p : r.cloud.points)
            {
                const float x = rd.get<float>();
                const float y = rd.get<float>();
                const float z = rd.get<float>();
                p = Vec3(x, y, z);
            }
        }
        else
            rd.bytes(D * 12);

        const auto n_mpc = rd.get<std::uint32_t>();
        r.mpcs.resize(n_mpc);
        for (auto &m : r.mpcs)
        {
            const double re = rd.get<double>();
            const double im = rd.get<double>();
            m.alpha = {re, im};
            m.tau = rd.get<double>();
            m.phi_D = rd.get<double>();
            m.theta_D = rd.get<double>();
            m.phi_A = rd.get<double>();
            m.theta_A = rd.get<double>();
            m.order = rd.get<std::int32_t>();
            m.is_los = rd.get<std::uint8_t>() != 0;
        }

        const auto P = rd.get<std::uint32_t>();
        const auto Q = rd.get<std::uint32_t>();
        if (static_cast<std::uint64_t>(P) * Q > rd.remaining() / 8)
            throw Error(ErrorCode::format, "record: truncated beam powers");
        r.y.y.resize(P, Q);
        for (std::uint32_t p = 0; p < P; ++p)
            for (std::uint32_t q = 0; q < Q; ++q)
                r.y.y(p, q) = rd.get<double>();

        const auto state = rd.get<std::uint8_t>();
        if (state > 2)
            throw Error(ErrorCode::format, "record: bad link state");
        r.state = static_cast<LinkState>(state);
        r.best.p = rd.get<std::int32_t>();
        r.best.q = rd.get<std::int32_t>();
        const auto len = rd.get<std::uint32_t>();
        const auto nnz = rd.get<std::uint32_t>();
        if (nnz > len || len > static_cast<std::uint64_t>(P) * Q)
            throw Error(ErrorCode::format, "record: bad label size");
        r.label.probs.assign(len, 0.0);
        for (std::uint32_t n = 0; n < nnz; ++n)
        {
            const auto i = rd.get<std::uint32_t>();
            if (i >= len)
                throw Error(ErrorCode::format, "record: label index out of range");
            r.label.probs[i] = rd.get<double>();
        }

        if (rd.get<std::uint8_t>())
        {
            HistogramGrid g;
            g.nx = static_cast<int>(rd.get<std::uint32_t>());
            g.ny = static_cast<int>(rd.get<std::uint32_t>());
            g.nz = static_cast<int>(rd.get<std::uint32_t>());
            if (g.nx < 1 || g.ny < 1 || g.nz < 1 || g.nx > 4096 || g.ny > 4096 || g.nz > 4096)
                throw Error(ErrorCode::format, "record: bad histogram shape");
            for (auto &v : g.bs_bin)
                v = rd.get<std::int32_t>();
            g.counts.assign(static_cast<std::size_t>(g.nx) * g.ny * g.nz, 0u);
            const auto cells = rd.get<std::uint32_t>();
            for (std::uint32_t n = 0; n < cells; ++n)
            {
                const auto i = rd.get<std::uint32_t>();
                const auto j = rd.get<std::uint32_t>();
                const auto k = rd.get<std::uint32_t>();
                const auto c = rd.get<std::uint32_t>();
                if (i >= static_cast<std::uint32_t>(g.nx) || j >= static_cast<std::uint32_t>(g.ny) ||
                    k >= static_cast<std::uint32_t>(g.nz))
                    throw Error(ErrorCode::format, "record: histogram index out of range");
                g.counts[(static_cast<std::size_t>(i) * g.ny + j) * g.nz + k] = c;
            }
            r.grid = std::move(g);
        }
        if (rd.get<std::uint8_t>())
            r.d_hat = rd.get<double>();
        if (rd.remaining() != 0)
            throw Error(ErrorCode::format, "record: trailing bytes");
        return r;
    }

    DatasetWriter::DatasetWriter(const std::filesystem::path &path) : out_(path, std::ios::binary | std::ios::trunc), path_(path)
    {
        if (!out_)
            throw Error(ErrorCode::io, "cannot create dataset file " + path.string());
        std::string h(kMagic, kMagic + 8);
        binio::put<std::uint32_t>(h, kVersion);
        binio::write_all(out_, h);
    }

    void DatasetWriter::write(const DatasetRecord &r)
    {
        const std::string body = encode_record(r);
        std::string len;
        binio::put<std::uint64_t>(len, body.size());
        binio::write_all(out_, len);
        binio::write_all(out_, body);
        ++count_;
    }

    void DatasetWriter::close()
    {
        out_.flush();
        if (!out_)
            throw Error(ErrorCode::io, "write failed on " + path_.string());
        out_.close();
    }

    DatasetReader::DatasetReader(const std::filesystem::path &path, double clip_db, bool keep_cloud)
        : in_(path, std::ios::binary), path_(path), clip_db_(clip_db), keep_cloud_(keep_cloud)
    {
        if (!in_)
            throw Error(ErrorCode::io, "cannot open dataset file " + path.string());
        const std::string h = binio::read_exact(in_, 12);
        if (std::memcmp(h.data(), kMagic, 8) != 0)
            throw Error(ErrorCode::format, path.string() + ": not a dataset file");
        binio::Reader r(h.data() + 8, 4);
        const auto v = r.get<std::uint32_t>();
        if (v != kVersion)
            throw Error(ErrorCode::format, path.string() + ": unsupported dataset version " + std::to_string(v));
    }

    bool DatasetReader::next(DatasetRecord &r)
    {
        char lenbuf[8];
        in_.read(lenbuf, 8);
        if (in_.gcount() == 0 && in_.eof())
            return false;
        if (in_.gcount() != 8)
            throw Error(ErrorCode::format, path_.string() + ": truncated record header");
        binio::Reader lr(lenbuf, 8);
        const auto len = lr.get<std::uint64_t>();
        if (len > (std::uint64_t{1} << 32))
            throw Error(ErrorCode::format, path_.string() + ": implausible record length");
        r = decode_record(binio::read_exact(in_, len), keep_cloud_);
        try
        {
            r.validate(clip_db_);
        }
        catch (const Error &e)
        {
            throw Error(ErrorCode::format, path_.string() + " (record #" + std::to_string(index_) + "): " + e.what());
        }
        ++index_;
        return true;
    }

    std::vector<DatasetRecord> read_dataset(const std::filesystem::path &path, double clip_db, bool keep_cloud)
    {
        DatasetReader reader(path, clip_db, keep_cloud);
        std::vector<DatasetRecord> out;
        DatasetRecord r;
        while (reader.next(r))
            out.push_back(std::move(r));
        return out;
    }

    Split stratified_split(const std::vector<LinkState> &states, double fraction, std::uint64_t seed)
    {
        if (!(fraction > 0.0 && fraction < 1.0))
            throw Error(ErrorCode::invalid_argument, "split fraction must be in (0, 1)");
        std::array<std::vector<std::uint64_t>, 3> strata;
        for (std::size_t i = 0; i < states.size(); ++i)
            strata[static_cast<std::size_t>(states[i])].push_back(i);
        if (strata[0].size() < 2 || strata[1].size() < 2)
            throw Error(ErrorCode::empty_split, "dataset too small to split: need at least two LOS and two NLOS records (have " +
                                                    std::to_string(strata[0].size()) + " LOS, " +
                                                    std::to_string(strata[1].size()) + " NLOS)");
        Split s;
        for (std::size_t k = 0; k < strata.size(); ++k)
        {
            auto &ids = strata[k];
            auto rng = make_engine(seed, {0x5911, k});
            std::shuffle(ids.begin(), ids.end(), rng);
            auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size())));
            if (ids.size() >= 2)
                n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
            s.train.insert(s.train.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
            s.test.insert(s.test.end(), ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
        }
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.test.begin(), s.test.end());
        return s;
    }

    void write_manifest(const Manifest &m, const std::filesystem::path &path)
    {
        nlohmann::json j;
        j["format"] = "lidarbeam-dataset";
        j["version"] = kVersion;
        j["config"] = nlohmann::json::parse(m.config_json);
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
        j["config_hash"] = hash;
        j["seed"] = m.seed;
        j["episodes"] = m.episodes;
        j["noise"] = to_string(m.noise);
        j["sigma_L"] = m.sigma_L;
        j["sigma_G"] = m.sigma_G;
        j["counts"] = {{"los", m.los}, {"nlos", m.nlos}, {"outage", m.outage}};
        j["split"] = {{"fraction", m.split_fraction}, {"train", m.split.train}, {"test", m.split.test}};
        j["codebooks"] = {{"tx", m.codebook_tx_file},
                          {"rx", m.codebook_rx_file},
                          {"tx_size", m.tx_codebook_size},
                          {"rx_size", m.rx_codebook_size}};
        j["dataset"] = m.dataset_file;
        j["featurized"] = m.featurized;
        std::ofstream out(path, std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::io, "cannot write manifest " + path.string());
        out << j.dump(2) << '\n';
        if (!out)
            throw Error(ErrorCode::io, "cannot write manifest " + path.string());
    }

    Manifest read_manifest(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::io, "cannot open manifest " + path.string());
        try
        {
            const auto j = nlohmann::json::parse(in);
            if (j.at("format") != "lidarbeam-dataset")
                throw Error(ErrorCode::format, path.string() + ": not a dataset manifest");
            Manifest m;
            m.config_json = j.at("config").dump();
            m.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
            m.seed = j.at("seed");
            m.episodes = j.at("episodes");
            m.noise = noise_mode_from(j.at("noise"));
            m.sigma_L = j.at("sigma_L");
            m.sigma_G = j.at("sigma_G");
            m.los = j.at("counts").at("los");
            m.nlos = j.at("counts").at("nlos");
            m.outage = j.at("counts").at("outage");
            m.split_fraction = j.at("split").at("fraction");
            m.split.train = j.at("split").at("train").get<std::vector<std::uint64_t>>();
            m.split.test = j.at("split").at("test").get<std::vector<std::uint64_t>>();
            m.codebook_tx_file = j.at("codebooks").at("tx");
            m.codebook_rx_file = j.at("codebooks").at("rx");
            m.tx_codebook_size = j.at("codebooks").at("tx_size");
            m.rx_codebook_size = j.at("codebooks").at("rx_size");
            m.dataset_file = j.at("dataset");
            m.featurized = j.at("featurized");
            return m;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::format, path.string() + ": malformed manifest: " + e.what());
        }
    }
}
