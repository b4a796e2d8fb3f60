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

#include "lidarbeam/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace lidarbeam
{
    namespace fs = std::filesystem;

    namespace
    {
        template <typename F>
        auto staged(const char *stage, F &&f)
        {
            try
            {
                return f();
            }
            catch (const Error &e)
            {
                throw Error(e.code(), std::string(stage) + ": " + e.what());
            }
            catch (const std::exception &e)
            {
                throw Error(ErrorCode::internal, std::string(stage) + ": " + e.what());
            }
        }

        void say(const Progress &p, const std::string &msg)
        {
            if (p)
                p(msg);
        }

        struct EpisodeSeeds
        {
            std::uint64_t scene, lidar, gnss, phase;
        };

        EpisodeSeeds episode_seeds(std::uint64_t seed, std::uint64_t episode)
        {
            auto e = make_engine(seed, {0xe915, episode});
            EpisodeSeeds s;
            s.scene = e();
            s.lidar = e();
            s.gnss = e();
            s.phase = e();
            return s;
        }

        FreqChannel channel_of(const MpcList &mpcs, const RunConfig &cfg)
        {
            return freq_channel(assemble_taps(mpcs, cfg.ofdm, cfg.codebook.tx, cfg.codebook.rx), cfg.ofdm.K);
        }

        void write_text(const fs::path &path, const std::function<void(std::ostream &)> &f)
        {
            std::ofstream out(path, std::ios::trunc | std::ios::binary);
            if (!out)
                throw Error(ErrorCode::io, "cannot write " + path.string());
            f(out);
            out.flush();
            if (!out)
                throw Error(ErrorCode::io, "write failed on " + path.string());
        }

        Network load_network(const fs::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw Error(ErrorCode::io, "cannot open checkpoint " + path.string() + " (train it first)");
            return Network::load(in);
        }

        SparseInput input_of(const DatasetRecord &r)
        {
            if (!r.grid)
                throw Error(ErrorCode::format, "record " + std::to_string(r.episode) + " is not featurized");
            return SparseInput::from_dense(encode_input(*r.grid));
        }

        std::string model_file(Subset s)
        {
            switch (s)
            {
            case Subset::all:
                return "los_detector.ckpt";
            case Subset::los:
                return "selector_los.ckpt";
            case Subset::nlos:
                return "selector_nlos.ckpt";
            }
            return "";
        }

        // Records of the featurized dataset at the given positions.
        std::vector<DatasetRecord> load_positions(const fs::path &dir, const Manifest &m,
                                                  const std::vector<std::uint64_t> &positions)
        {
            if (!m.featurized)
                throw Error(ErrorCode::format, "dataset in " + dir.string() + " is not featurized; run featurize first");
            const double clip = m.config().clip_db;
            DatasetReader reader(dir / "featurized.lbd", clip, false);
            std::vector<DatasetRecord> out;
            DatasetRecord r;
            std::size_t pos = 0, k = 0;
            while (reader.next(r))
            {
                while (k < positions.size() && positions[k] < pos)
                    ++k;
                if (k < positions.size() && positions[k] == pos)
                    out.push_back(std::move(r));
                ++pos;
            }
            if (pos != m.episodes)
                throw Error(ErrorCode::format, "featurized dataset holds " + std::to_string(pos) + " records, manifest says " +
                                                   std::to_string(m.episodes));
            return out;
        }

        bool in_subset(const DatasetRecord &r, Subset s)
        {
            if (r.state == LinkState::outage)
                return false;
            return s == Subset::all || (s == Subset::los) == (r.state == LinkState::los);
        }

        std::vector<Sample> samples_of(const std::vector<DatasetRecord> &recs, Subset s)
        {
            std::vector<Sample> out;
            for (const auto &r : recs)
            {
                if (!in_subset(r, s))
                    continue;
                Sample x;
                x.input = input_of(r);
                if (s == Subset::all)
                    x.target = {r.state == LinkState::los ? 1.0 : 0.0};
                else
                    x.target = r.label.probs;
                out.push_back(std::move(x));
            }
            return out;
        }

        std::uint64_t subset_seed(std::uint64_t seed, Subset s)
        {
            auto e = make_engine(seed, {0x7a17, static_cast<std::uint64_t>(s)});
            return e();
        }
    }

    const char *to_string(Subset s)
    {
        switch (s)
        {
        case Subset::all:
            return "all";
        case Subset::los:
            return "los";
        case Subset::nlos:
            return "nlos";
        }
        return "?";
    }

    Subset subset_from(const std::string &s)
    {
        if (s == "all")
            return Subset::all;
        if (s == "los")
            return Subset::los;
        if (s == "nlos")
            return Subset::nlos;
        throw Error(ErrorCode::invalid_argument, "subset must be 'los', 'nlos' or 'all', got '" + s + "'");
    }

    Manifest generate(const RunConfig &base, NoiseMode noise, const fs::path &dir, const Progress &progress)
    {
        const RunConfig cfg = base.with_noise(noise);
        staged("generate", [&] {
            cfg.validate();
            return 0;
        });
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw Error(ErrorCode::io, "generate: cannot create " + dir.string() + ": " + ec.message());

        Manifest m;
        m.config_json = to_json(cfg);
        m.config_hash = config_hash(cfg);
        m.seed = cfg.seed;
        m.episodes = cfg.episodes;
        m.noise = noise;
        m.sigma_L = cfg.lidar.sigma_L;
        m.sigma_G = cfg.features.sigma_G;
        m.split_fraction = cfg.split_fraction;

        struct Episode
        {
            Scene scene;
            MpcList mpcs;
            LinkState state = LinkState::outage;
            EpisodeSeeds seeds{};
        };
        std::vector<Episode> eps(cfg.episodes);
        std::vector<LinkState> states(cfg.episodes);
        staged("generate/trace", [&] {
            for (std::size_t i = 0; i < eps.size(); ++i)
            {
                auto &e = eps[i];
                e.seeds = episode_seeds(cfg.seed, i);
                e.scene = generate_scene(cfg.scene, e.seeds.scene);
                RayTraceConfig rt = cfg.raytrace;
                rt.phase_seed = e.seeds.phase;
                e.mpcs = trace_mpcs(e.scene, e.scene.bs_position, e.scene.ego_position, rt);
                e.state = states[i] = link_state(e.mpcs);
                (e.state == LinkState::los ? m.los : e.state == LinkState::nlos ? m.nlos : m.outage) += 1;
                if ((i + 1) % 250 == 0)
                    say(progress, "traced " + std::to_string(i + 1) + "/" + std::to_string(eps.size()) + " episodes");
            }
            return 0;
        });

        if (eps.empty())
        {
            DatasetWriter w(dir / m.dataset_file);
            w.close();
            m.codebook_tx_file.clear();
            m.codebook_rx_file.clear();
            write_manifest(m, dir / "manifest.json");
            return m;
        }

        m.split = staged("generate/split", [&] { return stratified_split(states, cfg.split_fraction, cfg.seed); });

        auto [Ct, Cr] = staged("generate/codebooks", [&] {
            auto e = make_engine(cfg.seed, {0xc0de});
            const std::uint64_t st = e(), sr = e();
            const auto tg = cfg.codebook.tx_grid(), rg = cfg.codebook.rx_grid();
            CodebookPruner pruner(build_candidate_codebook(cfg.codebook.tx, tg, cfg.codebook.tx_random, st),
                                  build_candidate_codebook(cfg.codebook.rx, rg, cfg.codebook.rx_random, sr));
            say(progress, "pruning " + std::to_string(pruner.candidates_t().size()) + "x" +
                              std::to_string(pruner.candidates_r().size()) + " candidate codebooks on " +
                              std::to_string(m.split.train.size()) + " training links");
            for (auto id : m.split.train)
                if (eps[id].state != LinkState::outage)
                    pruner.add(channel_of(eps[id].mpcs, cfg));
            return pruner.finish(cfg.codebook.min_count);
        });
        m.tx_codebook_size = Ct.size();
        m.rx_codebook_size = Cr.size();
        write_text(dir / m.codebook_tx_file, [&](std::ostream &o) { write_codebook(Ct, o); });
        write_text(dir / m.codebook_rx_file, [&](std::ostream &o) { write_codebook(Cr, o); });
        say(progress, "codebooks pruned to " + std::to_string(Ct.size()) + " x " + std::to_string(Cr.size()) + " = " +
                          std::to_string(m.num_classes()) + " classes");

        staged("generate/records", [&] {
            DatasetWriter w(dir / m.dataset_file);
            for (std::size_t i = 0; i < eps.size(); ++i)
            {
                const auto &e = eps[i];
                DatasetRecord r;
                r.episode = i;
                r.scene_seed = e.seeds.scene;
                r.bs_position = e.scene.bs_position;
                r.ego_position = e.scene.ego_position;
                r.ego_estimate = apply_gnss_noise(e.scene.ego_position, cfg.features.sigma_G, e.seeds.gnss);
                r.ego_heading = e.scene.ego_heading;
                r.zone = e.scene.zone;
                r.vehicle_count = static_cast<std::uint32_t>(e.scene.count(ObstacleKind::vehicle));
                r.noise = noise;

                const auto cloud = scan(e.scene, cfg.lidar, e.seeds.lidar);
                for (const auto &p : cloud.points)
                    if (p.z() >= cfg.features.ground_z_min && (p - r.ego_position).norm() <= cfg.features.d_max)
                        r.cloud.points.push_back(p);

                r.mpcs = e.mpcs;
                r.state = e.state;
                if (e.state == LinkState::outage)
                    r.y.y = Eigen::MatrixXd::Zero(Ct.size(), Cr.size());
                else
                {
                    r.y = beam_powers(channel_of(e.mpcs, cfg), Ct, Cr);
                    if (!(r.y.y.maxCoeff() > 0.0))
                        throw Error(ErrorCode::internal,
                                    "episode " + std::to_string(i) +
                                        " has paths but zero power in every beam pair (path delays beyond L_taps samples?)");
                    r.best = best_pair(r.y);
                    r.label = make_label(r.y, cfg.clip_db);
                }
                w.write(r);
                if ((i + 1) % 250 == 0)
                    say(progress, "wrote " + std::to_string(i + 1) + "/" + std::to_string(eps.size()) + " records");
            }
            w.close();
            return 0;
        });
        write_manifest(m, dir / "manifest.json");
        return m;
    }

    Manifest featurize(const fs::path &dir, const Progress &progress)
    {
        return staged("featurize", [&] {
            Manifest m = read_manifest(dir / "manifest.json");
            const RunConfig cfg = m.config();
            DatasetReader reader(dir / m.dataset_file, cfg.clip_db);
            DatasetWriter writer(dir / "featurized.lbd");
            DatasetRecord r;
            while (reader.next(r))
            {
                const auto pts = feature_points(r.cloud, r.ego_position, r.ego_estimate, r.zone, cfg.features);
                r.grid = featurize(r.cloud, r.ego_position, r.ego_estimate, r.zone, r.bs_position, cfg.features);
                r.d_hat = min_dist_to_line(pts, r.bs_position, r.ego_estimate);
                r.cloud.points.clear(); // the histogram stands in for the cloud from here on
                writer.write(r);
                if (writer.count() % 500 == 0)
                    say(progress, "featurized " + std::to_string(writer.count()) + " records");
            }
            writer.close();
            if (writer.count() != m.episodes)
                throw Error(ErrorCode::format, "dataset holds " + std::to_string(writer.count()) +
                                                   " records, manifest says " + std::to_string(m.episodes));
            m.featurized = true;
            write_manifest(m, dir / "manifest.json");
            return m;
        });
    }

    TrainOutcome train_subset(const fs::path &dir, Subset subset, const Progress &progress)
    {
        return staged((std::string("train/") + to_string(subset)).c_str(), [&] {
            const Manifest m = read_manifest(dir / "manifest.json");
            const RunConfig cfg = m.config();
            const auto train_recs = load_positions(dir, m, m.split.train);
            const auto test_recs = load_positions(dir, m, m.split.test);
            const auto train_set = samples_of(train_recs, subset);
            const auto val_set = samples_of(test_recs, subset);
            if (train_set.empty())
                throw Error(ErrorCode::empty_split, std::string("empty training split for subset ") + to_string(subset));

            TrainOutcome out;
            out.model = model_file(subset);
            out.examples = train_set.size();
            const auto &g = *train_recs.front().grid;
            const Shape shape{g.nz, g.nx, g.ny};
            const auto spec = subset == Subset::all ? NetworkSpec::reference(HeadKind::binary, 1)
                                                    : NetworkSpec::reference(HeadKind::top_m, m.num_classes());
            Network net(spec, shape, subset_seed(cfg.train.seed, subset));
            TrainConfig tc = cfg.train;
            tc.seed = subset_seed(cfg.train.seed ^ 0x5eed, subset);
            if (subset == Subset::all)
                tc.epochs = cfg.los_detector_epochs;
            say(progress, std::string("training ") + out.model + " on " + std::to_string(train_set.size()) +
                              " examples (" + std::to_string(net.parameter_count()) + " parameters)");
            const auto t0 = std::chrono::steady_clock::now();
            out.history = train(net, train_set, tc, val_set, [&](const EpochLoss &e) {
                const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                char buf[160];
                std::snprintf(buf, sizeof buf, "epoch %d  train %.4f  val %.4f  (%.0f s)", e.epoch, e.train_loss,
                              e.val_loss, s);
                say(progress, buf);
            });
            write_text(dir / out.model, [&](std::ostream &o) { net.save(o); });
            const std::string stem = out.model.substr(0, out.model.find('.'));
            write_text(dir / ("loss_" + stem + ".csv"), [&](std::ostream &o) { write_loss_csv(out.history, o); });

            if (subset == Subset::all)
            {
                std::vector<double> d;
                std::vector<LinkState> s;
                for (const auto &r : train_recs)
                    if (r.state != LinkState::outage)
                    {
                        d.push_back(*r.d_hat);
                        s.push_back(r.state);
                    }
                const auto stump = fit_stump(d, s);
                out.stump_gamma = stump.gamma;
                nlohmann::json j;
                j["gamma"] = std::isfinite(stump.gamma) ? nlohmann::json(stump.gamma) : nlohmann::json("inf");
                j["train_error"] = stump_error(stump, d, s);
                write_text(dir / "stump.json", [&](std::ostream &o) { o << j.dump(2) << '\n'; });
            }
            return out;
        });
    }

    std::vector<EvalReport> evaluate(const fs::path &dir, std::vector<int> M, const Progress &progress)
    {
        return staged("evaluate", [&] {
            const Manifest m = read_manifest(dir / "manifest.json");
            const RunConfig cfg = m.config();
            if (M.empty())
                M = cfg.M;
            const auto test = load_positions(dir, m, m.split.test);
            const auto train_recs = load_positions(dir, m, m.split.train);
            const std::string noise = m.noise == NoiseMode::noisy ? "noisy" : "noise-free";
            std::vector<EvalReport> reports;
            std::vector<LinkState> gate; // detector output per non-outage test record

            {
                say(progress, "evaluating the LOS detector");
                const Network det = load_network(dir / model_file(Subset::all));
                std::ifstream sin(dir / "stump.json");
                if (!sin)
                    throw Error(ErrorCode::io, "cannot open stump.json (train --subset all first)");
                const auto sj = nlohmann::json::parse(sin);
                StumpModel stump;
                stump.gamma = sj["gamma"].is_string() ? std::numeric_limits<double>::infinity() : sj["gamma"].get<double>();
                std::vector<LinkState> truth, pred, spred;
                for (const auto &r : test)
                {
                    if (r.state == LinkState::outage)
                        continue;
                    truth.push_back(r.state);
                    pred.push_back(predict_los(det, input_of(r)));
                    gate.push_back(pred.back());
                    spred.push_back(stump.predict(*r.d_hat));
                }
                if (truth.empty())
                    throw Error(ErrorCode::empty_split, "empty test split");
                EvalReport rep;
                rep.condition = "los-detection/" + noise;
                rep.num_classes = 2;
                rep.examples = truth.size();
                rep.outages = test.size() - truth.size();
                rep.binary_error = misclassification_error(pred, truth);
                rep.stump_error = misclassification_error(spred, truth);
                reports.push_back(rep);
            }

            for (Subset s : {Subset::los, Subset::nlos})
            {
                say(progress, std::string("evaluating the ") + to_string(s) + " selector");
                const Network net = load_network(dir / model_file(s));
                const int C = m.num_classes();
                std::vector<BeamPowerMatrix> ys;
                std::vector<std::vector<int>> recs;
                for (const auto &r : test)
                    if (in_subset(r, s))
                    {
                        ys.push_back(r.y);
                        recs.push_back(top_m_indices(net.predict(input_of(r)), C));
                    }
                if (ys.empty())
                    throw Error(ErrorCode::empty_split, std::string("empty test split for subset ") + to_string(s));
                auto rep = evaluate_selection(ys, recs, M, C, std::string(to_string(s)) + "/" + noise);

                std::vector<double> freq(static_cast<std::size_t>(C), 0.0);
                for (const auto &r : train_recs)
                    if (in_subset(r, s))
                        freq[static_cast<std::size_t>(r.y.flat(r.best.p, r.best.q))] += 1.0;
                const auto prior = top_m_indices(freq, C);
                std::vector<std::vector<int>> prior_recs(ys.size(), prior);
                std::vector<int> truths;
                for (const auto &y : ys)
                {
                    const auto b = best_pair(y);
                    truths.push_back(y.flat(b.p, b.q));
                }
                for (int mm : rep.M)
                    rep.prior_accuracy.push_back(topM_accuracy(prior_recs, truths, mm));
                rep.check();
                reports.push_back(rep);
                write_text(dir / ("report_" + std::string(to_string(s)) + ".csv"),
                           [&](std::ostream &o) { write_report_csv(rep, o); });
            }

            {
                // Runtime gating: the detector picks the selector for each link.
                say(progress, "evaluating the gated selector");
                const Network los = load_network(dir / model_file(Subset::los));
                const Network nlos = load_network(dir / model_file(Subset::nlos));
                const int C = m.num_classes();
                std::vector<BeamPowerMatrix> ys;
                std::vector<std::vector<int>> recs;
                std::size_t k = 0;
                for (const auto &r : test)
                {
                    if (r.state == LinkState::outage)
                        continue;
                    const Network &net = gate[k++] == LinkState::los ? los : nlos;
                    ys.push_back(r.y);
                    recs.push_back(top_m_indices(net.predict(input_of(r)), C));
                }
                auto rep = evaluate_selection(ys, recs, M, C, "gated/" + noise);
                rep.check();
                reports.push_back(rep);
                write_text(dir / "report_gated.csv", [&](std::ostream &o) { write_report_csv(rep, o); });
            }
            write_text(dir / "report.json", [&](std::ostream &o) { write_report_json(reports, o, cfg.rt_floor); });
            return reports;
        });
    }

    std::string report_summary(const fs::path &dir)
    {
        std::ifstream in(dir / "report.json");
        if (!in)
            throw Error(ErrorCode::io, "cannot open " + (dir / "report.json").string() + " (run evaluate first)");
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::format, std::string("report.json: ") + e.what());
        }
        std::ostringstream os;
        char buf[200];
        for (const auto &r : j)
        {
            os << r["condition"].get<std::string>() << "  (" << r["examples"].get<std::size_t>() << " examples, "
               << r["outages"].get<std::size_t>() << " outages)\n";
            if (r.contains("binary_error"))
            {
                std::snprintf(buf, sizeof buf, "  misclassification: network %.4f, stump %.4f\n",
                              r["binary_error"].get<double>(), r["stump_error"].get<double>());
                os << buf;
                continue;
            }
            const bool prior = r.contains("prior_accuracy");
            os << "     M  accuracy       R_T" << (prior ? "     prior" : "") << '\n';
            for (std::size_t i = 0; i < r["M"].size(); ++i)
            {
                std::snprintf(buf, sizeof buf, "  %4d  %8.4f  %8.4f", r["M"][i].get<int>(), r["accuracy"][i].get<double>(),
                              r["throughput_ratio"][i].get<double>());
                os << buf;
                if (prior)
                {
                    std::snprintf(buf, sizeof buf, "  %8.4f", r["prior_accuracy"][i].get<double>());
                    os << buf;
                }
                os << '\n';
            }
            if (!r["overhead_reduction"].is_null())
            {
                std::snprintf(buf, sizeof buf, "  overhead reduction at R_T >= %.2f: %.1fx\n", r["rt_floor"].get<double>(),
                              r["overhead_reduction"].get<double>());
                os << buf;
            }
        }
        return os.str();
    }

    std::vector<EvalReport> run_pipeline(const RunConfig &config, NoiseMode noise, const fs::path &dir,
                                         const Progress &progress)
    {
        generate(config, noise, dir, progress);
        featurize(dir, progress);
        for (Subset s : {Subset::all, Subset::los, Subset::nlos})
            train_subset(dir, s, progress);
        return evaluate(dir, {}, progress);
    }
}
