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

// Command-line front end. Talks to the library only through the C API.

#include "lidarbeam/lidarbeam.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace
{
    void print_progress(const char *msg, void *) { std::fprintf(stderr, "%s\n", msg); }

    int check(int status, const char *stage)
    {
        if (status != LB_OK)
            std::fprintf(stderr, "error (%s, code %d): %s\n", stage, status, lb_last_error());
        return status;
    }

    std::string text_of(int (*fn)(const char *, char *, size_t, size_t *), const char *arg, int &status)
    {
        size_t needed = 0;
        status = fn(arg, nullptr, 0, &needed);
        if (status != LB_OK)
            return {};
        std::string s(needed, '\0');
        status = fn(arg, s.data(), s.size(), &needed);
        s.resize(needed ? needed - 1 : 0);
        return s;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"LIDAR-aided mmWave beam selection: paired dataset generation, training and evaluation"};
    app.set_version_flag("--version", std::string(lb_version()));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = "run", noise = "none", subset = "all";
    std::uint64_t seed = 0, episodes = 0;
    std::vector<int> M;
    int instances = 1000;
    bool quiet = false;

    auto add_generate_flags = [&](CLI::App *c) {
        c->add_option("--config", config_path, "JSON run configuration (defaults when omitted)")->check(CLI::ExistingFile);
        c->add_option("--seed", seed, "global seed (overrides the config)");
        c->add_option("--episodes", episodes, "number of episodes (overrides the config)");
        c->add_option("--noise", noise, "noise condition")->check(CLI::IsMember({"none", "noisy"}));
    };
    auto add_out = [&](CLI::App *c) { c->add_option("--out", out_dir, "run directory")->capture_default_str(); };
    auto add_m = [&](CLI::App *c) { c->add_option("--M", M, "M values (comma separated)")->delimiter(','); };

    auto *gen = app.add_subcommand("generate", "simulate paired LIDAR scans and channels");
    add_generate_flags(gen);
    add_out(gen);
    auto *feat = app.add_subcommand("featurize", "compute histogram features for a generated dataset");
    add_out(feat);
    auto *tr = app.add_subcommand("train", "train the LOS detector and stump (all) or a top-M selector (los, nlos)");
    add_out(tr);
    tr->add_option("--subset", subset, "training subset")->check(CLI::IsMember({"all", "los", "nlos"}))->capture_default_str();
    auto *ev = app.add_subcommand("evaluate", "score the trained models on the held-out split");
    add_out(ev);
    add_m(ev);
    auto *rep = app.add_subcommand("report", "print the evaluation summary");
    add_out(rep);
    auto *st = app.add_subcommand("selftest", "run the brute-force oracle checks");
    st->add_option("--seed", seed, "seed for the random instances");
    st->add_option("--instances", instances, "instances per check")->capture_default_str();
    auto *run = app.add_subcommand("run", "generate, featurize, train all models and evaluate");
    add_generate_flags(run);
    add_out(run);
    add_m(run);
    auto *cfg = app.add_subcommand("config", "print the effective configuration as JSON");
    cfg->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_flag("-q,--quiet", quiet, "suppress progress messages");

    CLI11_PARSE(app, argc, argv);

    lb_progress_fn progress = quiet ? nullptr : print_progress;
    lb_generate_options opts{};
    opts.has_seed = (gen->count("--seed") + run->count("--seed")) > 0;
    opts.seed = seed;
    opts.has_episodes = (gen->count("--episodes") + run->count("--episodes")) > 0;
    opts.episodes = episodes;
    opts.noise = noise == "noisy" ? LB_NOISE_NOISY : LB_NOISE_NONE;
    const char *cfg_arg = config_path.empty() ? nullptr : config_path.c_str();
    const char *dir = out_dir.c_str();

    int status = LB_OK;
    if (*gen)
        status = check(lb_generate(cfg_arg, &opts, dir, progress, nullptr), "generate");
    else if (*feat)
        status = check(lb_featurize(dir, progress, nullptr), "featurize");
    else if (*tr)
    {
        const int s = subset == "los" ? LB_SUBSET_LOS : subset == "nlos" ? LB_SUBSET_NLOS : LB_SUBSET_ALL;
        status = check(lb_train(dir, s, progress, nullptr), "train");
    }
    else if (*ev)
        status = check(lb_evaluate(dir, M.data(), M.size(), progress, nullptr), "evaluate");
    else if (*rep)
    {
        const std::string text = text_of(lb_report, dir, status);
        if (check(status, "report") == LB_OK)
            std::fputs(text.c_str(), stdout);
    }
    else if (*st)
    {
        int failures = 0;
        status = check(lb_selftest(seed, instances, [](const char *m, void *) { std::printf("%s\n", m); }, nullptr,
                                   &failures),
                       "selftest");
        if (status == LB_OK && failures)
        {
            std::fprintf(stderr, "%d check(s) failed\n", failures);
            return 1;
        }
    }
    else if (*run)
    {
        status = check(lb_generate(cfg_arg, &opts, dir, progress, nullptr), "generate");
        if (status == LB_OK)
            status = check(lb_featurize(dir, progress, nullptr), "featurize");
        for (int s : {LB_SUBSET_ALL, LB_SUBSET_LOS, LB_SUBSET_NLOS})
            if (status == LB_OK)
                status = check(lb_train(dir, s, progress, nullptr), "train");
        if (status == LB_OK)
            status = check(lb_evaluate(dir, M.data(), M.size(), progress, nullptr), "evaluate");
        if (status == LB_OK)
        {
            const std::string text = text_of(lb_report, dir, status);
            if (check(status, "report") == LB_OK)
                std::fputs(text.c_str(), stdout);
        }
    }
    else if (*cfg)
    {
        std::string text;
        if (cfg_arg)
            text = text_of(lb_config_load, cfg_arg, status);
        else
        {
            size_t needed = 0;
            status = lb_config_default(nullptr, 0, &needed);
            text.assign(needed, '\0');
            if (status == LB_OK)
                status = lb_config_default(text.data(), text.size(), &needed);
            text.resize(needed ? needed - 1 : 0);
        }
        if (check(status, "config") == LB_OK)
            std::printf("%s\n", text.c_str());
    }
    return status == LB_OK ? 0 : 2;
}
