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
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the binary exits nonzero if any fail. Usage: jpd_acceptance <configs-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "jpd/analysis.hpp"
#include "jpd/pipeline.hpp"
#include "jpd/psychometrics.hpp"
#include "jpd/refine.hpp"
#include "jpd/resynth.hpp"
#include "jpd/simulate.hpp"
#include "jpd/staircase.hpp"
#include "jpd/stats.hpp"
#include "jpd/synth.hpp"
#include "jpd/units.hpp"

namespace fs = std::filesystem;
using namespace jpd;

namespace {

int g_failures = 0;
std::string g_configs_dir;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %-28s %s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criterion 1: mel round trip ----------------------------------------
void criterion_mel_round_trip() {
    const auto start = std::chrono::steady_clock::now();
    RngStream rng(derive_key({1}));
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double f = 50.0 + rng.next_uniform() * 3950.0;
        worst = std::max(worst, std::abs(mel_to_hz(hz_to_mel(f)) - f) / f);
    }
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "worst rel err %.2e, %.2f s", worst, elapsed);
    report(1, "mel round trip", worst < 1e-6 && elapsed < 1.0, detail);
}

// --- criterion 2: continuum geometry ------------------------------------
void criterion_continuum_geometry() {
    const auto start = std::chrono::steady_clock::now();
    PitchContour f0;
    const Continuum c = build_parametric_continuum(kPetersonBarneyMaleI,
                                                   kPetersonBarneyMaleIh, 9, 0.25, f0);
    // Spec level: all consecutive mel gaps equal within 1e-6 relative.
    std::vector<double> gaps;
    for (std::size_t i = 1; i < c.stimuli.size(); ++i)
        gaps.push_back(mel_distance(c.stimuli[i - 1].target, c.stimuli[i].target));
    double mean_gap = 0.0;
    for (double g : gaps) mean_gap += g;
    mean_gap /= gaps.size();
    double spec_dev = 0.0;
    for (double g : gaps) spec_dev = std::max(spec_dev, std::abs(g - mean_gap) / mean_gap);

    // Audio level: re-extracted gaps within 5% of their mean. Extraction
    // uses the bias-corrected estimator; raw single-frame estimates carry a
    // harmonic-attraction bias too large for gap geometry.
    std::vector<MelPoint> measured;
    for (const auto& wf : c.audio) {
        const MeasurementPoint mp = measure_token_refined(wf);
        measured.push_back(to_mel(mp.point));
    }
    std::vector<double> audio_gaps;
    for (std::size_t i = 1; i < measured.size(); ++i)
        audio_gaps.push_back(mel_distance(measured[i - 1], measured[i]));
    double audio_mean = 0.0;
    for (double g : audio_gaps) audio_mean += g;
    audio_mean /= audio_gaps.size();
    double audio_dev = 0.0;
    for (double g : audio_gaps)
        audio_dev = std::max(audio_dev, std::abs(g - audio_mean) / audio_mean);

    const double elapsed = seconds_since(start);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "spec dev %.2e, audio dev %.1f%%, %.2f s", spec_dev, 100.0 * audio_dev,
                  elapsed);
    report(2, "continuum geometry", spec_dev < 1e-6 && audio_dev < 0.05 && elapsed < 10.0,
           detail);
}

// --- criterion 3: analysis-by-synthesis ---------------------------------
void criterion_analysis_by_synthesis() {
    const auto start = std::chrono::steady_clock::now();
    double worst_f1 = 0.0, worst_f2 = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            StimulusSpec spec;
            spec.target = {250.0 + 50.0 * i, 1800.0 + 150.0 * j};
            spec.duration_s = 0.25;
            const Waveform wf = render_vowel(spec, 16000.0);
            const MeasurementPoint mp = measure_token(wf);
            worst_f1 = std::max(worst_f1, std::abs(mp.point.f1_hz - spec.target.f1_hz));
            worst_f2 = std::max(worst_f2, std::abs(mp.point.f2_hz - spec.target.f2_hz));
        }
    }
    const double elapsed = seconds_since(start);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "max |dF1| %.1f Hz, max |dF2| %.1f Hz, %.2f s",
                  worst_f1, worst_f2, elapsed);
    report(3, "analysis-by-synthesis", worst_f1 <= 20.0 && worst_f2 <= 50.0 &&
                                           elapsed < 30.0,
           detail);
}

// --- criterion 4: resynthesis identity and monotonicity ------------------
void criterion_resynthesis() {
    const auto start = std::chrono::steady_clock::now();
    auto make_word = [](double f1, double f2, double f0) {
        StimulusSpec spec;
        spec.target = {f1, f2};
        spec.duration_s = 0.3;
        spec.f0.mean_f0_hz = f0;
        return render_vowel(spec, 16000.0);
    };
    const std::vector<Waveform> hid{make_word(390.0, 1990.0, 117.0),
                                    make_word(390.0, 1990.0, 119.0)};
    const std::vector<Waveform> head{make_word(530.0, 1840.0, 117.0),
                                     make_word(530.0, 1840.0, 115.0)};
    ResynthesisPlan plan = plan_resynthesis(hid, head);
    Continuum series = resynthesize_series(plan);

    AnalysisSettings settings;
    settings.lpc_order = plan.lpc_order;

    bool identity_ok = false, monotone_ok = true, flags_clean = true, flag_works = false;
    // Identity: index 1 matches the base token within extraction tolerance.
    const MeasurementPoint base_mp =
        measure_token(resample(plan.base_token, plan.target_rate), settings);
    for (std::size_t i = 0; i < series.stimuli.size(); ++i) {
        if (series.stimuli[i].id != 1) continue;
        const MeasurementPoint mp = measure_token(series.audio[i], settings);
        identity_ok = std::abs(mp.point.f1_hz - base_mp.point.f1_hz) <= 20.0 &&
                      std::abs(mp.point.f2_hz - base_mp.point.f2_hz) <= 50.0;
    }
    // Monotonicity of the re-extracted tracks.
    std::vector<double> f1s, f2s;
    for (const auto& wf : series.audio) {
        const MeasurementPoint mp = measure_token(wf, settings);
        f1s.push_back(mp.point.f1_hz);
        f2s.push_back(mp.point.f2_hz);
    }
    for (std::size_t i = 1; i < f1s.size(); ++i) {
        if (f1s[i] < f1s[i - 1] - 20.0) monotone_ok = false;
        if (f2s[i] > f2s[i - 1] + 50.0) monotone_ok = false;
    }
    // The clean series must carry no failure flags...
    for (const auto& flags : series.flags)
        for (const auto& flag : flags)
            if (flag.find("unverified") != std::string::npos ||
                flag.find("non_monotone") != std::string::npos)
                flags_clean = false;
    // ...and the round-trip audit must flag a tampered series.
    Continuum tampered = series;
    tampered.audio.back() = tampered.audio.front();
    tampered.flags.assign(tampered.stimuli.size(), {});
    verify_series_roundtrip(tampered, settings);
    for (const auto& flag : tampered.flags.back())
        if (flag.find("unverified") != std::string::npos ||
            flag.find("non_monotone") != std::string::npos)
            flag_works = true;

    const double elapsed = seconds_since(start);
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "identity %s, monotone %s, clean flags %s, tamper flagged %s, %.2f s",
                  identity_ok ? "ok" : "BAD", monotone_ok ? "ok" : "BAD",
                  flags_clean ? "ok" : "BAD", flag_works ? "ok" : "BAD", elapsed);
    report(4, "resynthesis round trip",
           identity_ok && monotone_ok && flags_clean && flag_works && elapsed < 60.0,
           detail);
}

// --- criterion 5: probit recovery ----------------------------------------
void criterion_probit_recovery() {
    const auto start = std::chrono::steady_clock::now();

    // Closed-form targets at (alpha=-2, beta=0.05, c=0.1).
    const std::vector<double> distances{10, 22, 35, 50, 65, 80, 100, 120};
    DifferenceTable table;
    int comp = 1;
    for (double d : distances) {
        const double p = 0.1 + 0.9 * normal_cdf(-2.0 + 0.05 * d);
        DifferenceCell cell;
        cell.n_pairs = 10000;
        cell.n_different = static_cast<long>(std::lround(10000 * p));
        cell.distance_mels = d;
        table.cells[{1, ++comp}] = cell;
    }
    const JpdEstimate est = fit_jpd(table, 1, 0.1);
    const bool x50_ok = est.fit.converged &&
                        std::abs(est.x50_mels - 37.2058) / 37.2058 < 0.02;
    const bool steep_ok =
        std::abs(est.inverse_steepness_mels - 14.583) / 14.583 < 0.05;

    // MLE dominates the exhaustive grid on 20 random tables.
    RngStream rng(derive_key({5}));
    std::vector<DifferenceTable> tables(20);
    for (auto& t : tables) {
        const double alpha = -3.0 + 2.5 * rng.next_uniform();
        const double beta = 0.01 + 0.09 * rng.next_uniform();
        int c2 = 1;
        for (int i = 0; i < 8; ++i) {
            const double d = 10.0 + 18.0 * i;
            const double p = 0.1 + 0.9 * normal_cdf(alpha + beta * d);
            long k = 0;
            for (int n = 0; n < 500; ++n)
                if (rng.next_uniform() < p) ++k;
            DifferenceCell cell;
            cell.n_pairs = 500;
            cell.n_different = k;
            cell.distance_mels = d;
            t.cells[{1, ++c2}] = cell;
        }
    }
    std::vector<std::future<bool>> futures;
    for (const auto& t : tables)
        futures.push_back(std::async(std::launch::async, [&t] {
            const JpdEstimate mle = fit_jpd(t, 1, 0.1);
            const ProbitFit oracle = grid_oracle_fit(t, 1, 0.1);
            return mle.fit.converged &&
                   mle.fit.log_likelihood >= oracle.log_likelihood - 1e-3;
        }));
    bool dominance = true;
    for (auto& f : futures) dominance &= f.get();

    const double elapsed = seconds_since(start);
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "X50 %.2f (want 37.2), steep %.2f (want 14.6), oracle %s, %.2f s",
                  est.x50_mels, est.inverse_steepness_mels,
                  dominance ? "dominated" : "VIOLATED", elapsed);
    report(5, "probit recovery", x50_ok && steep_ok && dominance && elapsed < 30.0,
           detail);
}

// --- criterion 6: floor reproduction -------------------------------------
void criterion_floor() {
    const auto start = std::chrono::steady_clock::now();
    SubjectProfile p;
    p.id = 1;
    p.boundary_stim = 6.5;
    p.prototypes = {kPetersonBarneyMaleI, kPetersonBarneyMaleIh};
    p.noise_sd_f1_hz = 29.0;
    p.noise_sd_f2_hz = 58.0;
    p.seed = derive_key({6});
    p.axis = ContinuumAxis::from_endpoints(kPetersonBarneyMaleI, kPetersonBarneyMaleIh, 9);
    p.axis_set = true;

    const FormantPoint stim = to_hz(p.axis.point_at(3.0));
    const DifferenceRule rule;
    long n_diff = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const MimicryResponse a = respond(p, stim, 3, 2 * i);
        const MimicryResponse b = respond(p, stim, 3, 2 * i + 1);
        if (classify_pair(a, b, rule)) ++n_diff;
    }
    const double observed = static_cast<double>(n_diff) / n;
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "same-stimulus P(diff) %.4f, %.2f s", observed,
                  elapsed);
    report(6, "floor reproduction",
           observed > 0.08 && observed < 0.12 && elapsed < 10.0, detail);
}

// --- criterion 7: Table I reproduction -----------------------------------
void criterion_table1(const std::string& out_root) {
    const auto start = std::chrono::steady_clock::now();
    const std::string config_path = g_configs_dir + "/exp1_reference.json";
    const ExperimentConfig config = load_config(config_path);
    const std::string out = out_root + "/exp1_reference";
    fs::remove_all(out);
    const RunReport report_obj = run_pipeline(config, out);

    bool bounds_ok = false, ordering_ok = false;
    double upper = 0.0, lower = 0.0;
    if (report_obj.jpd.upper_bound_mels && report_obj.jpd.lower_bound_mels) {
        upper = *report_obj.jpd.upper_bound_mels;
        lower = *report_obj.jpd.lower_bound_mels;
        bounds_ok = std::abs(upper - 45.96) / 45.96 <= 0.25 &&
                    std::abs(lower - 11.67) / 11.67 <= 0.25;
        // Prototype peaks / boundary valley: the maximum must sit at a
        // series endpoint (prototype-adjacent) and the minimum at a
        // boundary-adjacent reference (5..7 for the 6.25-6.75 boundaries).
        const int up_ref = *report_obj.jpd.upper_reference;
        const int low_ref = *report_obj.jpd.lower_reference;
        ordering_ok = (up_ref <= 2 || up_ref >= 8) && (low_ref >= 5 && low_ref <= 7);
    }
    const double elapsed = seconds_since(start);
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "upper %.1f (45.96 +/- 25%%), lower %.1f (11.67 +/- 25%%), refs %d/%d, %.1f s",
                  upper, lower,
                  report_obj.jpd.upper_reference ? *report_obj.jpd.upper_reference : -1,
                  report_obj.jpd.lower_reference ? *report_obj.jpd.lower_reference : -1,
                  elapsed);
    report(7, "Table I reproduction", bounds_ok && ordering_ok && elapsed < 120.0,
           detail);
}

// --- criterion 8: estimator cross-check ----------------------------------
void criterion_staircase_crosscheck() {
    const auto start = std::chrono::steady_clock::now();
    bool all_ok = true;
    std::string details;

    const ContinuumAxis axis =
        ContinuumAxis::from_endpoints(kPetersonBarneyMaleI, kPetersonBarneyMaleIh, 9);
    const double warp_levels[3] = {0.0, 0.15, 0.3};
    for (int pi = 0; pi < 3; ++pi) {
        SubjectProfile p;
        p.id = pi + 1;
        p.boundary_stim = 20.0;  // comparisons stay within one category
        p.warp_strength = warp_levels[pi];
        p.category_weight = 0.0;
        p.prototypes = {kPetersonBarneyMaleI, kPetersonBarneyMaleIh};
        p.noise_sd_f1_hz = 29.0;
        p.noise_sd_f2_hz = 58.0;
        p.seed = derive_key({8, static_cast<std::uint64_t>(pi)});
        p.axis = axis;
        p.axis_set = true;

        // fit_jpd estimate from a dense simulated block on a wide continuum.
        Continuum wide;
        for (int i = 0; i < 13; ++i) {
            StimulusSpec spec;
            spec.id = i + 1;
            spec.target = to_hz(axis.point_at(1.0 + 0.75 * i));
            wide.stimuli.push_back(spec);
            wide.audio.emplace_back();
            wide.flags.emplace_back();
        }
        const auto responses = run_block(p, wide, 40);
        const DifferenceTable table = tabulate(responses, wide, DifferenceRule{});
        const JpdEstimate est = fit_jpd(table, 1, 0.1);

        // Staircase from the same reference along the continuum direction.
        double sum = 0.0;
        const int runs = 10;
        for (int r = 0; r < runs; ++r) {
            StaircaseOptions options;
            options.seed = 50 + r;
            const StaircaseResult sc = adaptive_step_search(
                p, wide.stimuli[0].target, axis.dir_f1_mel, axis.dir_f2_mel,
                DifferenceRule{}, options);
            sum += sc.distance_mels;
        }
        const double staircase_x50 = sum / runs;
        const double rel = std::abs(staircase_x50 - est.x50_mels) / est.x50_mels;
        all_ok &= est.fit.converged && rel < 0.2;
        char buf[80];
        std::snprintf(buf, sizeof(buf), " [w=%.2f: fit %.1f vs stair %.1f]",
                      warp_levels[pi], est.x50_mels, staircase_x50);
        details += buf;
    }
    const double elapsed = seconds_since(start);
    char detail[260];
    std::snprintf(detail, sizeof(detail), "%s, %.1f s", details.c_str(), elapsed);
    report(8, "estimator cross-check", all_ok && elapsed < 60.0, detail);
}

// --- criterion 9: determinism --------------------------------------------
void criterion_determinism(const std::string& out_root) {
    const std::string config_path = g_configs_dir + "/exp1_reference.json";
    const ExperimentConfig config = load_config(config_path);
    const std::string out_a = out_root + "/determinism_a";
    const std::string out_b = out_root + "/determinism_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    run_pipeline(config, out_a);
    run_pipeline(config, out_b);

    bool identical = true;
    for (const char* name : {"responses.csv", "categorization.csv",
                             "difference_table.csv", "jpd.csv", "boundaries.csv"}) {
        const std::string a = read_file(out_a + "/" + name);
        const std::string b = read_file(out_b + "/" + name);
        if (a.empty() || a != b) identical = false;
    }
    report(9, "determinism", identical,
           identical ? "all CSVs byte-identical" : "CSV mismatch between runs");
}

}  // namespace

int main(int argc, char** argv) {
    g_configs_dir = argc > 1 ? argv[1] : "configs";
    const std::string out_root =
        (fs::temp_directory_path() / "jpd_acceptance").string();
    fs::create_directories(out_root);

    try {
        criterion_mel_round_trip();
        criterion_continuum_geometry();
        criterion_analysis_by_synthesis();
        criterion_resynthesis();
        criterion_probit_recovery();
        criterion_floor();
        criterion_table1(out_root);
        criterion_staircase_crosscheck();
        criterion_determinism(out_root);
    } catch (const std::exception& e) {
        std::printf("FAIL  acceptance suite aborted: %s\n", e.what());
        return 2;
    }

    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
