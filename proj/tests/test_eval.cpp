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
#include "lidarbeam/eval.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace lidarbeam;

namespace
{
    BeamPowerMatrix row(std::initializer_list<double> v)
    {
        BeamPowerMatrix y;
        y.y.resize(1, static_cast<Eigen::Index>(v.size()));
        int j = 0;
        for (double e : v)
            y.y(0, j++) = e;
        return y;
    }

    std::vector<int> identity(int n)
    {
        std::vector<int> v(static_cast<std::size_t>(n));
        std::iota(v.begin(), v.end(), 0);
        return v;
    }
}

TEST_CASE("topM_accuracy - Examples")
{
    const std::vector<std::vector<int>> perm{{2, 0, 1}, {1, 2, 0}};
    CHECK(topM_accuracy(perm, std::vector<int>{1, 0}, 3) == 1.0);

    const std::vector<std::vector<int>> lead{{4, 1}, {4, 0}, {4, 2}};
    CHECK(topM_accuracy(lead, std::vector<int>{4, 4, 4}, 1) == 1.0);

    // Hits at ranks 1, 4 and 2.
    const std::vector<std::vector<int>> B{{7, 1, 2, 3}, {1, 2, 3, 7}, {1, 7, 2, 3}};
    CHECK(topM_accuracy(B, std::vector<int>{7, 7, 7}, 2) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(topM_accuracy(B, std::vector<int>{7, 7, 7}, 4) == 1.0);

    CHECK_THROWS_AS(topM_accuracy(B, std::vector<int>{7, 7}, 2), Error);
    CHECK_THROWS_AS(topM_accuracy(B, std::vector<int>{7, 7, 7}, 5), Error);
}

TEST_CASE("throughput_ratio - Examples")
{
    const std::vector<BeamPowerMatrix> y{row({3.0, 1.0, 0.5})};
    CHECK(throughput_ratio(y, std::vector<std::vector<int>>{{1, 2, 0}}, 1) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(throughput_ratio(y, std::vector<std::vector<int>>{{1, 2, 0}}, 3) == 1.0);
    CHECK(throughput_ratio(y, std::vector<std::vector<int>>{{0, 2, 1}}, 1) == 1.0);

    // Ties in y: any tied pair achieves the optimum.
    const std::vector<BeamPowerMatrix> tie{row({2.0, 2.0, 1.0})};
    CHECK(throughput_ratio(tie, std::vector<std::vector<int>>{{1, 0, 2}}, 1) == 1.0);

    // Outages are skipped; all-outage input has no denominator.
    const std::vector<BeamPowerMatrix> mixed{row({3.0, 1.0}), row({0.0, 0.0})};
    CHECK(throughput_ratio(mixed, std::vector<std::vector<int>>{{1, 0}, {0, 1}}, 1) == Catch::Approx(0.5));
    try
    {
        throughput_ratio(std::vector<BeamPowerMatrix>{row({0.0, 0.0})}, std::vector<std::vector<int>>{{0, 1}}, 1);
        FAIL("expected an outage error");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::outage);
    }
}

TEST_CASE("throughput_ratio - Bounded and monotone in M")
{
    auto rng = make_engine(41);
    std::uniform_real_distribution<double> U(0.0, 5.0);
    std::vector<BeamPowerMatrix> ys;
    std::vector<std::vector<int>> recs;
    for (int i = 0; i < 50; ++i)
    {
        BeamPowerMatrix y;
        y.y.resize(3, 4);
        for (int k = 0; k < 12; ++k)
            y.y(k / 4, k % 4) = U(rng);
        ys.push_back(y);
        auto r = identity(12);
        std::shuffle(r.begin(), r.end(), rng);
        recs.push_back(r);
    }
    double prev = 0.0;
    for (int M = 1; M <= 12; ++M)
    {
        const double rt = throughput_ratio(ys, recs, M);
        CHECK(rt <= 1.0);
        CHECK(rt >= prev);
        prev = rt;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("misclassification_error - Examples")
{
    using L = LinkState;
    const std::vector<L> a{L::los, L::nlos, L::los};
    const std::vector<L> inv{L::nlos, L::los, L::nlos};
    CHECK(misclassification_error(a, a) == 0.0);
    CHECK(misclassification_error(a, inv) == 1.0);
    std::vector<L> truth(10, L::los), pred(10, L::los);
    pred[0] = pred[4] = pred[9] = L::nlos;
    CHECK(misclassification_error(pred, truth) == Catch::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(misclassification_error(a, truth), Error);
    CHECK_THROWS_AS(misclassification_error(std::vector<L>{}, std::vector<L>{}), Error);
}

TEST_CASE("evaluate_selection - Curves, invariants and outages")
{
    auto rng = make_engine(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<BeamPowerMatrix> ys;
    std::vector<std::vector<int>> recs;
    for (int i = 0; i < 40; ++i)
    {
        BeamPowerMatrix y;
        y.y.resize(2, 3);
        for (int k = 0; k < 6; ++k)
            y.y(k / 3, k % 3) = i == 7 ? 0.0 : U(rng);
        ys.push_back(y);
        auto r = identity(6);
        std::shuffle(r.begin(), r.end(), rng);
        recs.push_back(r);
    }
    const auto rep = evaluate_selection(ys, recs, {1, 2, 3, 6}, 6, "los/noise-free");
    CHECK(rep.examples == 39);
    CHECK(rep.outages == 1);
    CHECK_NOTHROW(rep.check());
    CHECK(rep.accuracy.back() == 1.0);
    CHECK(rep.throughput_ratio.back() == 1.0);
    CHECK(rep.throughput_ratio.front() < rep.throughput_ratio[2]);
    for (std::size_t i = 1; i < rep.M.size(); ++i)
    {
        CHECK(rep.accuracy[i] >= rep.accuracy[i - 1]);
        CHECK(rep.throughput_ratio[i] >= rep.throughput_ratio[i - 1]);
    }

    // Overhead factor: num_classes / smallest M meeting the floor.
    const auto f = rep.overhead_reduction(0.0);
    REQUIRE(f.has_value());
    CHECK(*f == 6.0);
    CHECK(*rep.overhead_reduction(1.0) <= 6.0 / 1.0);

    std::vector<BeamPowerMatrix> dead(2, BeamPowerMatrix{Eigen::MatrixXd::Zero(2, 3)});
    try
    {
        evaluate_selection(dead, std::vector<std::vector<int>>(2, identity(6)), {1}, 6, "nlos");
        FAIL("expected an empty split error");
    }
    catch (const Error &e)
    {
        CHECK(std::string(e.what()).find("empty test split") != std::string::npos);
    }
}

TEST_CASE("EvalReport - check rejects broken curves")
{
    EvalReport r;
    r.condition = "los/noise-free";
    r.num_classes = 4;
    r.M = {1, 2, 4};
    r.accuracy = {0.5, 0.75, 1.0};
    r.throughput_ratio = {0.8, 0.9, 1.0};
    r.examples = 4;
    CHECK_NOTHROW(r.check());
    auto bad = r;
    bad.accuracy = {0.5, 0.25, 1.0};
    CHECK_THROWS_AS(bad.check(), Error);
    bad = r;
    bad.throughput_ratio = {0.8, 0.9, 0.99};
    CHECK_THROWS_AS(bad.check(), Error);
    bad = r;
    bad.binary_error = 1.5;
    CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("EvalReport - JSON and CSV output")
{
    EvalReport r;
    r.condition = "nlos/noisy";
    r.num_classes = 4;
    r.M = {1, 4};
    r.accuracy = {0.25, 1.0};
    r.throughput_ratio = {0.5, 1.0};
    r.examples = 8;
    std::ostringstream csv;
    write_report_csv(r, csv);
    CHECK(csv.str().rfind("M,accuracy,R_T\n1,", 0) == 0);
    std::istringstream lines(csv.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line))
        ++count;
    CHECK(count == 3);

    std::ostringstream js;
    write_report_json({r}, js, 0.9);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j.dump().find("nlos/noisy") != std::string::npos);
}
