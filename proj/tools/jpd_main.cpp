// Copyright 2026 the jpdkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "jpd/pipeline.hpp"
#include "jpd/staircase.hpp"
#include "jpd/stats.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool config_required = true) {
    auto* config_opt =
        cmd->add_option("--config", args->config_path, "experiment config (JSON)");
    if (config_required) config_opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", args->out_dir, "output directory");
    cmd->add_option("--seed", args->seed, "override the config seed")
        ->each([args](const std::string&) { args->seed_set = true; });
}

jpd::ExperimentConfig load(const CommonArgs& args) {
    jpd::ExperimentConfig config = jpd::load_config(args.config_path);
    if (args.seed_set) {
        config.seed = args.seed;
        for (auto& subject : config.subjects)
            subject.seed = jpd::derive_key(
                {config.seed, static_cast<std::uint64_t>(subject.id)});
    }
    return config;
}

void print_summary(const jpd::RunReport& report) {
    std::printf("run complete: %s\n", report.out_dir.c_str());
    for (const auto& [stage, output] : report.stage_outputs)
        std::printf("  %-9s -> %s\n", stage.c_str(), output.c_str());
    if (report.jpd.upper_bound_mels)
        std::printf("  JPD upper bound: %.2f mels (reference %d)\n",
                    *report.jpd.upper_bound_mels, *report.jpd.upper_reference);
    if (report.jpd.lower_bound_mels)
        std::printf("  JPD lower bound: %.2f mels (reference %d)\n",
                    *report.jpd.lower_bound_mels, *report.jpd.lower_reference);
    for (const auto& note : report.jpd.fit_exceptions)
        std::printf("  fit exception: %s\n", note.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vowel continuum synthesis, mimicry simulation, and JPD estimation"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* synth = app.add_subcommand("synth", "render the stimulus continuum");
    add_common(synth, &args);
    auto* simulate = app.add_subcommand("simulate", "simulate mimicry subjects");
    add_common(simulate, &args);
    auto* analyze = app.add_subcommand("analyze", "extract formants from response audio");
    add_common(analyze, &args);
    auto* tabulate =
        app.add_subcommand("tabulate", "pairwise difference tabulation of responses");
    add_common(tabulate, &args);
    auto* fit = app.add_subcommand("fit", "fit floor-corrected probit JPD estimates");
    add_common(fit, &args);
    auto* report = app.add_subcommand("report", "render plots and the summary table");
    add_common(report, &args);
    auto* run = app.add_subcommand("run", "full pipeline");
    add_common(run, &args);

    auto* staircase =
        app.add_subcommand("staircase", "adaptive interstimulus step search");
    add_common(staircase, &args);
    int staircase_subject = 0;
    double staircase_ref = 1.0;
    double staircase_target_p = 0.5;
    staircase->add_option("--subject", staircase_subject,
                          "subject id from the config (default: first)");
    staircase->add_option("--reference", staircase_ref,
                          "reference position in stimulus coordinates");
    staircase->add_option("--target-p", staircase_target_p,
                          "target probability of a different response");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            std::printf("%s\n", jpd::run_synth(load(args), args.out_dir).c_str());
        } else if (simulate->parsed()) {
            std::printf("%s\n", jpd::run_simulate(load(args), args.out_dir).c_str());
        } else if (analyze->parsed()) {
            std::printf("%s\n", jpd::run_analyze(load(args), args.out_dir).c_str());
        } else if (tabulate->parsed()) {
            std::printf("%s\n", jpd::run_tabulate(load(args), args.out_dir).c_str());
        } else if (fit->parsed()) {
            std::printf("%s\n", jpd::run_fit(load(args), args.out_dir).c_str());
        } else if (report->parsed()) {
            std::printf("%s\n", jpd::run_render_report(load(args), args.out_dir).c_str());
        } else if (run->parsed()) {
            print_summary(jpd::run_pipeline(load(args), args.out_dir));
        } else if (staircase->parsed()) {
            const jpd::ExperimentConfig config = load(args);
            if (config.subjects.empty())
                throw jpd::data_error("staircase: config has no subjects");
            jpd::SubjectProfile profile = config.subjects.front();
            if (staircase_subject != 0) {
                bool found = false;
                for (const auto& s : config.subjects)
                    if (s.id == staircase_subject) {
                        profile = s;
                        found = true;
                    }
                if (!found) throw jpd::data_error("staircase: unknown subject id");
            }
            const jpd::ContinuumAxis axis = jpd::ContinuumAxis::from_endpoints(
                config.continuum.endpoint_a, config.continuum.endpoint_b,
                config.continuum.n_stimuli);
            profile.axis = axis;
            profile.axis_set = true;
            const jpd::FormantPoint reference =
                jpd::to_hz(axis.point_at(staircase_ref));
            jpd::StaircaseOptions options;
            options.target_p = staircase_target_p;
            options.seed = config.seed;
            const jpd::StaircaseResult result = jpd::adaptive_step_search(
                profile, reference, axis.dir_f1_mel, axis.dir_f2_mel, config.rule,
                options);
            std::printf("staircase: %.2f mels (%d trials, %d reversals%s)\n",
                        result.distance_mels, result.n_trials, result.n_reversals,
                        result.converged ? "" : ", NOT CONVERGED");
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
