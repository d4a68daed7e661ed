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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jpd/csv.hpp"
#include "jpd/psychometrics.hpp"
#include "jpd/resynth.hpp"
#include "jpd/simulate.hpp"
#include "jpd/synth.hpp"

namespace jpd {

inline constexpr const char* kToolkitVersion = "jpdkit 0.1.0";

enum class ExperimentMode { kExp1Parametric, kExp2Resynthesis };
enum class FitPooling { kPooled, kPerSubjectMean };

struct ContinuumConfig {
    FormantPoint endpoint_a = kPetersonBarneyMaleI;
    FormantPoint endpoint_b = kPetersonBarneyMaleIh;
    int n_stimuli = 9;
    double duration_s = 0.25;
    double sample_rate = 16000.0;
    PitchContour f0;
    SynthesizerSettings synthesizer;
};

// Exp 2 stimulus creation: either directories of recorded hid/head tokens,
// or synthesized stand-ins at desk scale.
struct ResynthesisConfig {
    std::string hid_dir;
    std::string head_dir;
    bool synthesize_standins = true;
    FormantPoint hid_target = kPetersonBarneyMaleIh;
    FormantPoint head_target = kPetersonBarneyMaleEh;
    int n_standin_tokens = 3;
    int steps_between = 10;
    int index_min = -1;
    int index_max = 12;
    int lpc_order = 12;
    double window_s = 0.025;
    double time_step_s = 0.010;
    double target_rate = 11025.0;
};

struct FitConfig {
    double floor_c = 0.1;
    bool estimate_floor = false;  // fit c jointly instead of fixing it
    FitPooling pooling = FitPooling::kPooled;
};

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::kExp1Parametric;
    std::uint64_t seed = 0;
    int reps = 6;
    ContinuumConfig continuum;
    ResynthesisConfig resynthesis;
    std::vector<SubjectProfile> subjects;
    DifferenceRule rule;
    FitConfig fit;
    AnalysisSettings analysis;
    // Audio-ingestion mode: a directory of WAVs named
    // s<subject>_stim<stimulus>_rep<repetition>.wav replaces simulation.
    std::string audio_responses_dir;
};

ExperimentConfig load_config(const std::string& path);

struct JpdSummary {
    std::optional<double> upper_bound_mels;  // max converged X50
    std::optional<double> lower_bound_mels;  // min converged X50
    std::optional<int> upper_reference;
    std::optional<int> lower_reference;
    std::vector<JpdEstimate> estimates;          // one per reference
    std::vector<std::string> fit_exceptions;     // non-converged / degenerate fits
};

struct RunReport {
    std::string out_dir;
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> stage_outputs;
    JpdSummary jpd;
    std::vector<double> categorization_boundaries;  // per subject
    std::string version = kToolkitVersion;
};

// Individual stages. Each reads its inputs from `out_dir` files written by
// earlier stages, so any stage can be rerun or replaced independently.
std::string run_synth(const ExperimentConfig& config, const std::string& out_dir);
std::string run_simulate(const ExperimentConfig& config, const std::string& out_dir);
std::string run_analyze(const ExperimentConfig& config, const std::string& out_dir);
std::string run_tabulate(const ExperimentConfig& config, const std::string& out_dir);
std::string run_fit(const ExperimentConfig& config, const std::string& out_dir);
std::string run_render_report(const ExperimentConfig& config, const std::string& out_dir);

// The full pipeline: synth -> (simulate | analyze) -> tabulate -> fit ->
// report. Idempotent given the seed; every intermediate is persisted.
RunReport run_pipeline(const ExperimentConfig& config, const std::string& out_dir);

// Helpers shared with the CLI and tests.
std::vector<MimicryResponse> responses_from_rows(const std::vector<ResponseRow>& rows);
JpdSummary fit_all_references(const ExperimentConfig& config,
                              const std::vector<MimicryResponse>& responses,
                              const Continuum& continuum);

}  // namespace jpd
