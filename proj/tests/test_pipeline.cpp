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

#include "jpd/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "jpd/error.hpp"

using namespace jpd;
namespace fs = std::filesystem;

namespace {

std::string write_temp_config(const std::string& name, const std::string& body) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallConfig = R"json({
  "mode": "exp1-parametric",
  "seed": 777,
  "reps": 3,
  "continuum": {"n_stimuli": 5, "duration_s": 0.12, "sample_rate": 16000.0},
  "subjects": [
    {"id": 1, "boundary_stim": 3.5, "warp_strength": 0.3, "category_weight": 0.3,
     "prototypes": [{"f1_hz": 270.0, "f2_hz": 2290.0}, {"f1_hz": 390.0, "f2_hz": 1990.0}],
     "noise_sd_f1_hz": 29.0, "noise_sd_f2_hz": 58.0},
    {"id": 2, "boundary_stim": 3.0, "warp_strength": 0.2, "category_weight": 0.5,
     "prototypes": [{"f1_hz": 270.0, "f2_hz": 2290.0}, {"f1_hz": 390.0, "f2_hz": 1990.0}],
     "noise_sd_f1_hz": 29.0, "noise_sd_f2_hz": 58.0}
  ]
})json";

}  // namespace

TEST_CASE("load_config resolves defaults and derives subject seeds") {
    const std::string path = write_temp_config("jpd_cfg_small.json", kSmallConfig);
    const ExperimentConfig config = load_config(path);
    CHECK(config.mode == ExperimentMode::kExp1Parametric);
    CHECK(config.seed == 777);
    CHECK(config.reps == 3);
    CHECK(config.continuum.n_stimuli == 5);
    CHECK(config.rule.f1_threshold_hz == doctest::Approx(81.3));
    CHECK(config.rule.f2_threshold_hz == doctest::Approx(161.4));
    CHECK(config.fit.floor_c == doctest::Approx(0.1));
    REQUIRE(config.subjects.size() == 2);
    CHECK(config.subjects[0].seed != 0);
    CHECK(config.subjects[0].seed != config.subjects[1].seed);
    fs::remove(path);
}

TEST_CASE("load_config requires a seed for simulated runs only") {
    const char* simulated = R"json({
      "mode": "exp1-parametric",
      "subjects": [{"id": 1,
        "prototypes": [{"f1_hz": 270.0, "f2_hz": 2290.0}, {"f1_hz": 390.0, "f2_hz": 1990.0}]}]
    })json";
    const std::string path = write_temp_config("jpd_cfg_noseed.json", simulated);
    CHECK_THROWS_AS(load_config(path), error);
    fs::remove(path);

    // Audio-ingestion configs carry no subjects and need no seed.
    const std::string audio_path = write_temp_config(
        "jpd_cfg_audio_noseed.json",
        R"json({"mode": "exp1-parametric", "audio_responses_dir": "/tmp"})json");
    CHECK_NOTHROW(load_config(audio_path));
    fs::remove(audio_path);
}

TEST_CASE("full pipeline produces every stage artifact and is deterministic") {
    const std::string path = write_temp_config("jpd_cfg_run.json", kSmallConfig);
    const ExperimentConfig config = load_config(path);
    const fs::path out1 = fs::temp_directory_path() / "jpd_run_a";
    const fs::path out2 = fs::temp_directory_path() / "jpd_run_b";
    fs::remove_all(out1);
    fs::remove_all(out2);

    const RunReport report = run_pipeline(config, out1.string());
    CHECK(fs::exists(out1 / "stimuli/continuum.json"));
    CHECK(fs::exists(out1 / "stimuli/stim_001.wav"));
    CHECK(fs::exists(out1 / "responses.csv"));
    CHECK(fs::exists(out1 / "categorization.csv"));
    CHECK(fs::exists(out1 / "difference_table.csv"));
    CHECK(fs::exists(out1 / "jpd.csv"));
    CHECK(fs::exists(out1 / "boundaries.csv"));
    CHECK(fs::exists(out1 / "manifest.json"));
    CHECK(fs::exists(out1 / "report/categorization.svg"));
    CHECK(fs::exists(out1 / "report/responses_f1f2.svg"));
    CHECK(fs::exists(out1 / "report/jpd_x50.svg"));
    CHECK(fs::exists(out1 / "report/jpd_inverse_steepness.svg"));
    CHECK(fs::exists(out1 / "report/summary.csv"));
    CHECK(fs::exists(out1 / "report/summary.txt"));
    CHECK(report.stage_outputs.size() == 5);

    // Same config, same seed: byte-identical CSV outputs.
    run_pipeline(config, out2.string());
    for (const char* name :
         {"responses.csv", "categorization.csv", "difference_table.csv", "jpd.csv"})
        CHECK(read_file((out1 / name).string()) == read_file((out2 / name).string()));

    fs::remove_all(out1);
    fs::remove_all(out2);
    fs::remove(path);
}

TEST_CASE("identity subjects produce degenerate fits, flagged not thrown") {
    const char* config_json = R"json({
      "mode": "exp1-parametric",
      "seed": 5,
      "reps": 3,
      "continuum": {"n_stimuli": 5, "duration_s": 0.12},
      "subjects": [
        {"id": 1, "boundary_stim": 3.5, "warp_strength": 0.0, "category_weight": 0.0,
         "prototypes": [{"f1_hz": 270.0, "f2_hz": 2290.0}, {"f1_hz": 390.0, "f2_hz": 1990.0}],
         "noise_sd_f1_hz": 0.001, "noise_sd_f2_hz": 0.001}
      ]
    })json";
    const std::string path = write_temp_config("jpd_cfg_identity.json", config_json);
    const ExperimentConfig config = load_config(path);
    const fs::path out = fs::temp_directory_path() / "jpd_run_identity";
    fs::remove_all(out);
    const RunReport report = run_pipeline(config, out.string());
    // No differences anywhere: every per-reference fit is degenerate.
    CHECK_FALSE(report.jpd.upper_bound_mels.has_value());
    CHECK_FALSE(report.jpd.fit_exceptions.empty());
    fs::remove_all(out);
    fs::remove(path);
}

TEST_CASE("audio ingestion replaces simulation with zero downstream changes") {
    // Render three tokens as fake recorded responses for one subject and
    // confirm the analyze stage produces the shared schema.
    const fs::path audio_dir = fs::temp_directory_path() / "jpd_fake_recordings";
    fs::remove_all(audio_dir);
    fs::create_directories(audio_dir);
    StimulusSpec spec;
    spec.duration_s = 0.2;
    int stim = 1;
    for (double f1 : {280.0, 330.0, 380.0}) {
        spec.target = {f1, 2200.0 - f1};
        write_wav((audio_dir / ("s1_stim" + std::to_string(stim) + "_rep1.wav")).string(),
                  render_vowel(spec, 16000.0));
        ++stim;
    }

    ExperimentConfig config;
    config.audio_responses_dir = audio_dir.string();
    const fs::path out = fs::temp_directory_path() / "jpd_run_analyze";
    fs::remove_all(out);
    fs::create_directories(out);
    const std::string responses_path = run_analyze(config, out.string());
    const auto rows = read_responses_csv(responses_path);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.subject == 1);
        CHECK(row.flags.empty());
    }
    CHECK(std::abs(rows[0].f1_hz - 280.0) <= 20.0);
    CHECK(std::abs(rows[0].f2_hz - 1920.0) <= 50.0);

    fs::remove_all(audio_dir);
    fs::remove_all(out);
}

TEST_CASE("per-subject-mean pooling averages converged subject fits") {
    std::string body = kSmallConfig;
    body.insert(body.rfind('}'), R"(,
  "fit": {"floor_c": 0.1, "pooling": "per-subject-mean"})");
    const std::string path = write_temp_config("jpd_cfg_psm.json", body);
    const ExperimentConfig config = load_config(path);
    CHECK(config.fit.pooling == FitPooling::kPerSubjectMean);
    const fs::path out = fs::temp_directory_path() / "jpd_run_psm";
    fs::remove_all(out);
    const RunReport report = run_pipeline(config, out.string());
    // Estimates exist for every reference; each is either finite or listed
    // among the exceptions.
    CHECK(report.jpd.estimates.size() == 5);
    for (const auto& est : report.jpd.estimates) {
        if (est.fit.converged && !est.fit.non_monotone)
            CHECK(std::isfinite(est.x50_mels));
    }
    fs::remove_all(out);
    fs::remove(path);
}

TEST_CASE("resynthesis-mode pipeline runs end to end") {
    const char* config_json = R"json({
      "mode": "exp2-resynthesis",
      "seed": 11,
      "reps": 2,
      "continuum": {"duration_s": 0.25},
      "resynthesis": {
        "synthesize_standins": true,
        "hid_target": {"f1_hz": 390.0, "f2_hz": 1990.0},
        "head_target": {"f1_hz": 530.0, "f2_hz": 1840.0},
        "n_standin_tokens": 2,
        "index_min": 0, "index_max": 5
      },
      "subjects": [
        {"id": 1, "boundary_stim": 3.0, "warp_strength": 0.2, "category_weight": 0.3,
         "prototypes": [{"f1_hz": 390.0, "f2_hz": 1990.0}, {"f1_hz": 530.0, "f2_hz": 1840.0}],
         "noise_sd_f1_hz": 40.0, "noise_sd_f2_hz": 80.0},
        {"id": 2, "boundary_stim": 3.5, "warp_strength": 0.2, "category_weight": 0.3,
         "prototypes": [{"f1_hz": 390.0, "f2_hz": 1990.0}, {"f1_hz": 530.0, "f2_hz": 1840.0}],
         "noise_sd_f1_hz": 40.0, "noise_sd_f2_hz": 80.0}
      ]
    })json";
    const std::string path = write_temp_config("jpd_cfg_exp2.json", config_json);
    const ExperimentConfig config = load_config(path);
    const fs::path out = fs::temp_directory_path() / "jpd_run_exp2";
    fs::remove_all(out);
    const RunReport report = run_pipeline(config, out.string());
    CHECK(fs::exists(out / "stimuli/continuum.json"));
    CHECK(fs::exists(out / "jpd.csv"));

    const Continuum series = read_continuum((out / "stimuli/continuum.json").string());
    CHECK(series.mode == ContinuumMode::kResynthesis);
    CHECK(series.stimuli.size() == 6);  // indices 0..5
    CHECK(series.stimuli.front().id == 0);
    CHECK(series.sample_rate == doctest::Approx(11025.0));
    // 2 subjects x 6 stimuli x 2 reps
    CHECK(read_responses_csv((out / "responses.csv").string()).size() == 24);
    (void)report;
    fs::remove_all(out);
    fs::remove(path);
}

TEST_CASE("stages fail with stage-tagged diagnostics on missing intermediates") {
    ExperimentConfig config;
    config.subjects.resize(1);
    config.subjects[0].prototypes = {{270.0, 2290.0}, {390.0, 1990.0}};
    const fs::path out = fs::temp_directory_path() / "jpd_run_empty";
    fs::remove_all(out);
    fs::create_directories(out);
    CHECK_THROWS_AS(run_simulate(config, out.string()), data_error);
    CHECK_THROWS_AS(run_tabulate(config, out.string()), data_error);
    CHECK_THROWS_AS(run_render_report(config, out.string()), data_error);
    fs::remove_all(out);
}
