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


#include <catch2/catch_amalgamated.hpp>
#include "lidarbeam/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lidarbeam;
namespace fs = std::filesystem;

namespace
{
    RunConfig tiny_config(std::size_t episodes)
    {
        RunConfig c;
        c.episodes = episodes;
        c.seed = 5;
        c.lidar.azimuth_resolution_deg = 1.0;
        c.codebook.tx = {4, 4, 0.5};
        c.codebook.rx = {2, 2, 0.5};
        c.codebook.tx_azimuth_points = 4;
        c.codebook.tx_elevation_points = 2;
        c.codebook.rx_azimuth_points = 2;
        c.codebook.rx_elevation_points = 1;
        c.codebook.tx_random = 4;
        c.codebook.rx_random = 2;
        c.codebook.min_count = 0;
        c.features.b_x = 5;
        c.features.b_y = 5;
        c.train.epochs = 1;
        c.los_detector_epochs = 1;
        c.M = {1, 2, 3, 5};
        return c;
    }

    fs::path temp_dir(const std::string &name)
    {
        const auto d = fs::temp_directory_path() / ("lidarbeam_pipeline_" + name);
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
}

TEST_CASE("generate - Zero episodes")
{
    const auto dir = temp_dir("zero");
    const auto m = generate(tiny_config(0), NoiseMode::none, dir);
    CHECK(m.episodes == 0);
    CHECK(m.los + m.nlos + m.outage == 0);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(read_dataset(dir / m.dataset_file, 6.0).empty());
    CHECK(read_manifest(dir / "manifest.json").config_hash == m.config_hash);
    fs::remove_all(dir);
}

TEST_CASE("generate - Conservation on the default configuration")
{
    const auto dir = temp_dir("default500");
    RunConfig cfg;
    cfg.episodes = 500;
    const auto m = generate(cfg, NoiseMode::none, dir);
    CHECK(m.los + m.nlos + m.outage == 500);
    std::size_t los = 0, nlos = 0, outage = 0;
    DatasetReader reader(dir / m.dataset_file, cfg.clip_db, false);
    DatasetRecord r;
    while (reader.next(r))
    {
        los += r.state == LinkState::los;
        nlos += r.state == LinkState::nlos;
        outage += r.state == LinkState::outage;
    }
    CHECK(los == m.los);
    CHECK(nlos == m.nlos);
    CHECK(outage == m.outage);
    CHECK(m.split.train.size() + m.split.test.size() == 500);
    fs::remove_all(dir);
}

TEST_CASE("generate - Byte reproducible, noise only touches sigma fields")
{
    const auto a = temp_dir("det_a"), b = temp_dir("det_b"), n = temp_dir("det_noisy");
    const auto cfg = tiny_config(40);
    generate(cfg, NoiseMode::none, a);
    generate(cfg, NoiseMode::none, b);
    for (const char *f : {"dataset.lbd", "manifest.json", "codebook_tx.txt", "codebook_rx.txt"})
        CHECK(slurp(a / f) == slurp(b / f));

    generate(cfg, NoiseMode::noisy, n);
    auto ja = nlohmann::json::parse(slurp(a / "manifest.json"));
    auto jn = nlohmann::json::parse(slurp(n / "manifest.json"));
    CHECK(ja["noise"] == "none");
    CHECK(jn["noise"] == "noisy");
    CHECK(jn["sigma_G"] == 3.0);
    CHECK(jn["sigma_L"] == 0.1);
    CHECK(ja["sigma_G"] == 0.0);
    auto ca = ja["config"], cn = jn["config"];
    CHECK(cn["lidar"]["sigma_L"] == 0.1);
    CHECK(cn["features"]["sigma_G"] == 3.0);
    ca["lidar"]["sigma_L"] = cn["lidar"]["sigma_L"];
    ca["features"]["sigma_G"] = cn["features"]["sigma_G"];
    CHECK(ca == cn);
    // Same scenes, same link states.
    CHECK(ja["counts"] == jn["counts"]);
    CHECK(ja["split"] == jn["split"]);
    for (const auto &d : {a, b, n})
        fs::remove_all(d);
}

TEST_CASE("run_pipeline - End to end on a tiny run")
{
    const auto dir = temp_dir("e2e");
    const auto reports = run_pipeline(tiny_config(60), NoiseMode::none, dir);
    REQUIRE(reports.size() == 4);
    CHECK(reports[3].condition == "gated/noise-free");
    CHECK(reports[3].examples == reports[1].examples + reports[2].examples);
    CHECK(reports[0].binary_error.has_value());
    CHECK(reports[0].stump_error.has_value());
    for (std::size_t i = 1; i < 4; ++i)
    {
        CHECK_NOTHROW(reports[i].check());
        CHECK(reports[i].M.back() == reports[i].num_classes);
        CHECK(reports[i].throughput_ratio.back() == 1.0);
    }
    CHECK(reports[1].prior_accuracy.size() == reports[1].M.size());
    for (const char *f : {"featurized.lbd", "los_detector.ckpt", "selector_los.ckpt", "selector_nlos.ckpt", "stump.json",
                          "report.json", "report_los.csv", "report_nlos.csv", "report_gated.csv",
                          "loss_los_detector.csv"})
        CHECK(fs::exists(dir / f));
    CHECK(read_manifest(dir / "manifest.json").featurized);
    const auto summary = report_summary(dir);
    CHECK(summary.find("los/noise-free") != std::string::npos);
    CHECK(summary.find("stump") != std::string::npos);

    // Rerun from the persisted dataset: identical checkpoints and reports.
    const auto first_report = slurp(dir / "report.json");
    const auto first_ckpt = slurp(dir / "selector_los.ckpt");
    featurize(dir);
    for (Subset s : {Subset::all, Subset::los, Subset::nlos})
        train_subset(dir, s);
    evaluate(dir);
    CHECK(slurp(dir / "report.json") == first_report);
    CHECK(slurp(dir / "selector_los.ckpt") == first_ckpt);
    fs::remove_all(dir);
}

TEST_CASE("Pipeline errors carry the stage")
{
    const auto dir = temp_dir("errors");
    generate(tiny_config(40), NoiseMode::none, dir);
    try
    {
        train_subset(dir, Subset::all);
        FAIL("training before featurize must fail");
    }
    catch (const Error &e)
    {
        CHECK(std::string(e.what()).rfind("train/all: ", 0) == 0);
    }

    featurize(dir);
    for (Subset s : {Subset::all, Subset::los, Subset::nlos})
        train_subset(dir, s);
    auto m = read_manifest(dir / "manifest.json");
    m.split.test.clear();
    write_manifest(m, dir / "manifest.json");
    try
    {
        evaluate(dir);
        FAIL("expected an empty test split");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::empty_split);
        CHECK(std::string(e.what()).find("empty test split") != std::string::npos);
        CHECK(std::string(e.what()).rfind("evaluate: ", 0) == 0);
    }
    CHECK_THROWS_AS(read_manifest(dir / "none" / "manifest.json"), Error);
    fs::remove_all(dir);
}

TEST_CASE("selftest - Oracle suite passes")
{
    const auto results = selftest(17, 200);
    REQUIRE(results.size() == 4);
    for (const auto &r : results)
    {
        INFO(r.name << ": " << r.detail);
        CHECK(r.passed);
    }
}
