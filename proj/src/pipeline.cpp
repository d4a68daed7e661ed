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

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "jpd/error.hpp"
#include "jpd/stats.hpp"
#include "jpd/svg.hpp"

namespace fs = std::filesystem;

namespace jpd {

namespace {

FormantPoint parse_point(const nlohmann::json& js) {
    return {js.at("f1_hz").get<double>(), js.at("f2_hz").get<double>()};
}

PitchContour parse_f0(const nlohmann::json& js) {
    PitchContour f0;
    if (js.contains("mean_f0_hz")) f0.mean_f0_hz = js.at("mean_f0_hz").get<double>();
    if (js.contains("start_frac")) f0.start_frac = js.at("start_frac").get<double>();
    if (js.contains("peak_frac")) f0.peak_frac = js.at("peak_frac").get<double>();
    if (js.contains("end_frac")) f0.end_frac = js.at("end_frac").get<double>();
    if (js.contains("peak_position"))
        f0.peak_position = js.at("peak_position").get<double>();
    return f0;
}

std::string stage_path(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

Continuum load_stage_continuum(const std::string& out_dir) {
    const std::string manifest = stage_path(out_dir, "stimuli/continuum.json");
    if (!fs::exists(manifest))
        throw data_error("missing intermediate: " + manifest + " (run synth first)");
    return read_continuum(manifest);
}

std::vector<ResponseRow> load_stage_responses(const std::string& out_dir) {
    const std::string path = stage_path(out_dir, "responses.csv");
    if (!fs::exists(path))
        throw data_error("missing intermediate: " + path +
                         " (run simulate or analyze first)");
    return read_responses_csv(path);
}

// Difference tables CSV: subject 0 holds the pooled table, remaining rows
// the per-subject tables.
void write_tables_csv(const std::string& path,
                      const std::map<int, DifferenceTable>& tables) {
    std::ofstream out(path);
    if (!out) throw error("cannot write " + path);
    out << "subject,reference,comparison,n_pairs,n_different,distance_mels\n";
    for (const auto& [subject, table] : tables)
        for (const auto& [key, cell] : table.cells)
            out << subject << ',' << key.first << ',' << key.second << ','
                << cell.n_pairs << ',' << cell.n_different << ','
                << csv_num(cell.distance_mels) << '\n';
}

std::map<int, DifferenceTable> read_tables_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("missing intermediate: " + path + " (run tabulate first)");
    std::string line;
    std::getline(in, line);
    std::map<int, DifferenceTable> tables;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() < 6) throw data_error("malformed difference table row in " + path);
        DifferenceCell cell;
        cell.n_pairs = std::stol(f[3]);
        cell.n_different = std::stol(f[4]);
        cell.distance_mels = std::stod(f[5]);
        tables[std::stoi(f[0])].cells[{std::stoi(f[1]), std::stoi(f[2])}] = cell;
    }
    return tables;
}

SubjectProfile parse_subject(const nlohmann::json& js) {
    SubjectProfile p;
    p.id = js.at("id").get<int>();
    if (js.contains("boundary_stim")) p.boundary_stim = js.at("boundary_stim").get<double>();
    if (js.contains("warp_strength")) p.warp_strength = js.at("warp_strength").get<double>();
    if (js.contains("category_weight"))
        p.category_weight = js.at("category_weight").get<double>();
    if (js.contains("prototypes"))
        for (const auto& proto : js.at("prototypes"))
            p.prototypes.push_back(parse_point(proto));
    if (js.contains("noise_sd_f1_hz")) p.noise_sd_f1_hz = js.at("noise_sd_f1_hz").get<double>();
    if (js.contains("noise_sd_f2_hz")) p.noise_sd_f2_hz = js.at("noise_sd_f2_hz").get<double>();
    if (js.contains("categorization_slope"))
        p.categorization_slope = js.at("categorization_slope").get<double>();
    if (js.contains("seed")) p.seed = js.at("seed").get<std::uint64_t>();
    return p;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("load_config: cannot open " + path);
    nlohmann::json js = nlohmann::json::parse(in);

    ExperimentConfig config;
    const std::string mode = js.value("mode", "exp1-parametric");
    if (mode == "exp1-parametric")
        config.mode = ExperimentMode::kExp1Parametric;
    else if (mode == "exp2-resynthesis")
        config.mode = ExperimentMode::kExp2Resynthesis;
    else
        throw error("load_config: unknown mode " + mode);

    const bool has_seed = js.contains("seed");
    if (has_seed) config.seed = js.at("seed").get<std::uint64_t>();
    config.reps = js.value("reps", 6);

    if (js.contains("continuum")) {
        const auto& c = js.at("continuum");
        if (c.contains("endpoint_a")) config.continuum.endpoint_a = parse_point(c.at("endpoint_a"));
        if (c.contains("endpoint_b")) config.continuum.endpoint_b = parse_point(c.at("endpoint_b"));
        config.continuum.n_stimuli = c.value("n_stimuli", 9);
        config.continuum.duration_s = c.value("duration_s", 0.25);
        config.continuum.sample_rate = c.value("sample_rate", 16000.0);
        if (c.contains("f0")) config.continuum.f0 = parse_f0(c.at("f0"));
    }

    if (js.contains("resynthesis")) {
        const auto& r = js.at("resynthesis");
        ResynthesisConfig& rc = config.resynthesis;
        rc.hid_dir = r.value("hid_dir", "");
        rc.head_dir = r.value("head_dir", "");
        rc.synthesize_standins = r.value("synthesize_standins", rc.hid_dir.empty());
        if (r.contains("hid_target")) rc.hid_target = parse_point(r.at("hid_target"));
        if (r.contains("head_target")) rc.head_target = parse_point(r.at("head_target"));
        rc.n_standin_tokens = r.value("n_standin_tokens", 3);
        rc.steps_between = r.value("steps_between", 10);
        rc.index_min = r.value("index_min", -1);
        rc.index_max = r.value("index_max", 12);
        rc.lpc_order = r.value("lpc_order", 12);
        rc.window_s = r.value("window_s", 0.025);
        rc.time_step_s = r.value("time_step_s", 0.010);
        rc.target_rate = r.value("target_rate", 11025.0);
    }

    if (js.contains("subjects"))
        for (const auto& s : js.at("subjects")) config.subjects.push_back(parse_subject(s));

    if (js.contains("rule")) {
        const auto& r = js.at("rule");
        config.rule.f1_threshold_hz = r.value("f1_threshold_hz", 81.3);
        config.rule.f2_threshold_hz = r.value("f2_threshold_hz", 161.4);
        config.rule.directional = r.value("directional", false);
    }

    if (js.contains("fit")) {
        const auto& f = js.at("fit");
        config.fit.floor_c = f.value("floor_c", 0.1);
        config.fit.estimate_floor = f.value("estimate_floor", false);
        const std::string pooling = f.value("pooling", "pooled");
        if (pooling == "pooled")
            config.fit.pooling = FitPooling::kPooled;
        else if (pooling == "per-subject-mean")
            config.fit.pooling = FitPooling::kPerSubjectMean;
        else
            throw error("load_config: unknown pooling " + pooling);
    }

    if (js.contains("analysis")) {
        const auto& a = js.at("analysis");
        config.analysis.window_s = a.value("window_s", config.analysis.window_s);
        config.analysis.step_s = a.value("step_s", config.analysis.step_s);
        config.analysis.lpc_order = a.value("lpc_order", config.analysis.lpc_order);
        config.analysis.preemphasis_hz =
            a.value("preemphasis_hz", config.analysis.preemphasis_hz);
        config.analysis.resample_to_hz =
            a.value("resample_to_hz", config.analysis.resample_to_hz);
    }

    config.audio_responses_dir = js.value("audio_responses_dir", "");

    if (!config.subjects.empty() && !has_seed)
        throw error("load_config: seed is mandatory for simulated runs");

    // Subjects without an explicit seed get one derived from the run seed.
    for (auto& subject : config.subjects)
        if (subject.seed == 0)
            subject.seed = derive_key({config.seed, static_cast<std::uint64_t>(subject.id)});
    return config;
}

std::string run_synth(const ExperimentConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    Continuum continuum;
    if (config.mode == ExperimentMode::kExp1Parametric) {
        continuum = build_parametric_continuum(
            config.continuum.endpoint_a, config.continuum.endpoint_b,
            config.continuum.n_stimuli, config.continuum.duration_s, config.continuum.f0,
            config.continuum.sample_rate, config.continuum.synthesizer);
    } else {
        const ResynthesisConfig& rc = config.resynthesis;
        std::vector<Waveform> hid, head;
        if (rc.synthesize_standins) {
            // Desk-scale stand-ins for natural recordings: rendered tokens
            // with slight per-token f0 variation.
            for (int i = 0; i < rc.n_standin_tokens; ++i) {
                StimulusSpec spec;
                spec.duration_s = config.continuum.duration_s;
                spec.f0 = config.continuum.f0;
                spec.f0.mean_f0_hz += 2.0 * i;
                spec.id = i + 1;
                spec.target = rc.hid_target;
                hid.push_back(render_vowel(spec, config.continuum.sample_rate,
                                           config.continuum.synthesizer));
                spec.target = rc.head_target;
                head.push_back(render_vowel(spec, config.continuum.sample_rate,
                                            config.continuum.synthesizer));
            }
        } else {
            for (const auto& entry : fs::directory_iterator(rc.hid_dir))
                if (entry.path().extension() == ".wav")
                    hid.push_back(read_wav(entry.path().string()));
            for (const auto& entry : fs::directory_iterator(rc.head_dir))
                if (entry.path().extension() == ".wav")
                    head.push_back(read_wav(entry.path().string()));
            std::sort(hid.begin(), hid.end(),
                      [](const Waveform& a, const Waveform& b) {
                          return a.samples.size() < b.samples.size();
                      });
        }
        ResynthesisPlan plan = plan_resynthesis(hid, head, rc.steps_between, rc.index_min,
                                                rc.index_max, config.analysis);
        plan.lpc_order = rc.lpc_order;
        plan.window_s = rc.window_s;
        plan.time_step_s = rc.time_step_s;
        plan.target_rate = rc.target_rate;
        continuum = resynthesize_series(plan);
    }
    return write_continuum(continuum, stage_path(out_dir, "stimuli"),
                           config.continuum.synthesizer);
}

std::string run_simulate(const ExperimentConfig& config, const std::string& out_dir) {
    if (config.subjects.empty())
        throw data_error("run_simulate: config has no subjects");
    const Continuum continuum = load_stage_continuum(out_dir);
    const ContinuumAxis axis = ContinuumAxis::from_continuum(continuum);

    // Per-subject blocks are independent; run them concurrently. Responses
    // land in per-subject slots, so the merged output is order-free.
    std::vector<std::future<std::vector<MimicryResponse>>> futures;
    for (const auto& subject : config.subjects) {
        SubjectProfile bound = subject;
        bound.axis = axis;
        bound.axis_set = true;
        futures.push_back(std::async(std::launch::async, [bound, &continuum, &config] {
            return run_block(bound, continuum, config.reps);
        }));
    }

    std::vector<ResponseRow> rows;
    for (auto& f : futures) {
        for (const MimicryResponse& r : f.get()) {
            ResponseRow row;
            row.subject = r.subject;
            row.stimulus = r.stimulus_id;
            row.repetition = r.repetition;
            row.trial = r.trial_index;
            row.f1_hz = r.produced.f1_hz;
            row.f2_hz = r.produced.f2_hz;
            rows.push_back(row);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const ResponseRow& a, const ResponseRow& b) {
        return std::tie(a.subject, a.stimulus, a.repetition) <
               std::tie(b.subject, b.stimulus, b.repetition);
    });
    const std::string responses_path = stage_path(out_dir, "responses.csv");
    write_responses_csv(responses_path, rows);

    // Perceptual categorization block, reported alongside mimicry.
    std::ofstream cat(stage_path(out_dir, "categorization.csv"));
    cat << "subject,stimulus,repetition,label,p_high\n";
    for (const auto& subject : config.subjects) {
        SubjectProfile bound = subject;
        bound.axis = axis;
        bound.axis_set = true;
        for (const auto& spec : continuum.stimuli) {
            const double coord = axis.coordinate(to_mel(spec.target));
            for (int rep = 1; rep <= config.reps; ++rep) {
                const CategorizationResult r = categorize(bound, coord, rep);
                cat << subject.id << ',' << spec.id << ',' << rep << ',' << r.label
                    << ',' << csv_num(r.p_high) << '\n';
            }
        }
    }
    return responses_path;
}

std::string run_analyze(const ExperimentConfig& config, const std::string& out_dir) {
    if (config.audio_responses_dir.empty())
        throw data_error("run_analyze: config has no audio_responses_dir");
    fs::create_directories(out_dir);

    std::vector<ResponseRow> rows;
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(config.audio_responses_dir))
        if (entry.path().extension() == ".wav") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty())
        throw data_error("run_analyze: no WAV files in " + config.audio_responses_dir);

    for (const std::string& path : paths) {
        // Expected stem: s<subject>_stim<stimulus>_rep<repetition>
        const std::string stem = fs::path(path).stem().string();
        int subject = 0, stimulus = 0, repetition = 0;
        if (std::sscanf(stem.c_str(), "s%d_stim%d_rep%d", &subject, &stimulus,
                        &repetition) != 3)
            throw data_error("run_analyze: cannot parse token name " + stem);
        const Waveform wf = read_wav(path);
        ResponseRow row;
        row.subject = subject;
        row.stimulus = stimulus;
        row.repetition = repetition;
        try {
            const FormantTrack track = track_formants(wf, config.analysis);
            const F0Track f0 = track_f0(wf, config.analysis);
            const MeasurementPoint mp =
                measure_at_tenth_period(track, f0, wf.duration());
            row.time_s = mp.time_s;
            row.f1_hz = mp.point.f1_hz;
            row.f2_hz = mp.point.f2_hz;
            row.f0_hz = f0.mean_voiced();
            if (!track.reliable) row.flags = "unreliable";
        } catch (const audio_error& e) {
            row.flags = std::string("unmeasurable:") + e.what();
        }
        rows.push_back(row);
    }
    const std::string responses_path = stage_path(out_dir, "responses.csv");
    write_responses_csv(responses_path, rows);
    return responses_path;
}

std::vector<MimicryResponse> responses_from_rows(const std::vector<ResponseRow>& rows) {
    std::vector<MimicryResponse> responses;
    for (const auto& row : rows) {
        if (!row.flags.empty() && row.flags.rfind("unmeasurable", 0) == 0) continue;
        MimicryResponse r;
        r.subject = row.subject;
        r.stimulus_id = row.stimulus;
        r.repetition = row.repetition;
        r.trial_index = row.trial;
        r.produced = {row.f1_hz, row.f2_hz};
        responses.push_back(r);
    }
    return responses;
}

std::string run_tabulate(const ExperimentConfig& config, const std::string& out_dir) {
    const Continuum continuum = load_stage_continuum(out_dir);
    const std::vector<MimicryResponse> responses =
        responses_from_rows(load_stage_responses(out_dir));
    if (responses.empty()) throw data_error("run_tabulate: no usable responses");

    std::map<int, DifferenceTable> tables;
    tables[0] = tabulate(responses, continuum, config.rule);
    std::map<int, std::vector<MimicryResponse>> by_subject;
    for (const auto& r : responses) by_subject[r.subject].push_back(r);
    for (const auto& [subject, rs] : by_subject)
        tables[subject] = tabulate(rs, continuum, config.rule);

    const std::string path = stage_path(out_dir, "difference_table.csv");
    write_tables_csv(path, tables);
    return path;
}

namespace {

JpdSummary summarize_fits(const ExperimentConfig& config,
                          const std::map<int, DifferenceTable>& tables) {
    JpdSummary summary;
    const DifferenceTable& pooled = tables.at(0);

    for (int ref : pooled.reference_ids()) {
        JpdEstimate est;
        if (config.fit.pooling == FitPooling::kPooled) {
            try {
                est = fit_jpd(pooled, ref, config.fit.floor_c, config.fit.estimate_floor);
            } catch (const data_error& e) {
                summary.fit_exceptions.push_back("reference " + std::to_string(ref) +
                                                 ": " + e.what());
                continue;
            }
        } else {
            // Fit each subject separately, average the converged estimates.
            double x50_sum = 0.0, steep_sum = 0.0;
            long n_pairs = 0;
            int n_ok = 0;
            for (const auto& [subject, table] : tables) {
                if (subject == 0) continue;
                try {
                    const JpdEstimate sub =
                        fit_jpd(table, ref, config.fit.floor_c, config.fit.estimate_floor);
                    if (sub.fit.converged && !sub.fit.non_monotone) {
                        x50_sum += sub.x50_mels;
                        steep_sum += sub.inverse_steepness_mels;
                        n_pairs += sub.n_pairs;
                        ++n_ok;
                    }
                } catch (const data_error&) {
                }
            }
            est.reference_stim = ref;
            est.n_pairs = n_pairs;
            if (n_ok > 0) {
                est.x50_mels = x50_sum / n_ok;
                est.inverse_steepness_mels = steep_sum / n_ok;
                est.fit.converged = true;
                est.fit.floor_c = config.fit.floor_c;
                // Averaged across subjects; no single (alpha, beta) applies.
                est.fit.alpha = std::numeric_limits<double>::quiet_NaN();
                est.fit.beta = std::numeric_limits<double>::quiet_NaN();
            } else {
                est.x50_mels = std::numeric_limits<double>::quiet_NaN();
                est.inverse_steepness_mels = std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (!est.fit.converged || est.fit.non_monotone)
            summary.fit_exceptions.push_back(
                "reference " + std::to_string(ref) +
                (est.fit.non_monotone ? ": non-monotone fit" : ": did not converge"));
        summary.estimates.push_back(est);
    }

    for (const auto& est : summary.estimates) {
        if (est.fit.converged && !est.fit.non_monotone && !std::isfinite(est.x50_mels)) {
            // Converged but the fitted baseline already exceeds 50%: no
            // positive limen for this reference.
            summary.fit_exceptions.push_back(
                "reference " + std::to_string(est.reference_stim) +
                ": fitted X50 not positive, excluded from bounds");
            continue;
        }
        if (!est.fit.converged || est.fit.non_monotone || !std::isfinite(est.x50_mels))
            continue;
        if (!summary.upper_bound_mels || est.x50_mels > *summary.upper_bound_mels) {
            summary.upper_bound_mels = est.x50_mels;
            summary.upper_reference = est.reference_stim;
        }
        if (!summary.lower_bound_mels || est.x50_mels < *summary.lower_bound_mels) {
            summary.lower_bound_mels = est.x50_mels;
            summary.lower_reference = est.reference_stim;
        }
    }
    return summary;
}

void write_jpd_csv(const std::string& path, const JpdSummary& summary) {
    std::ofstream out(path);
    out << "reference,x50_mels,inverse_steepness_mels,alpha,beta,c,converged,n_pairs\n";
    for (const auto& est : summary.estimates)
        out << est.reference_stim << ',' << csv_num(est.x50_mels) << ','
            << csv_num(est.inverse_steepness_mels) << ',' << csv_num(est.fit.alpha)
            << ',' << csv_num(est.fit.beta) << ',' << csv_num(est.fit.floor_c) << ','
            << (est.fit.converged && !est.fit.non_monotone ? 1 : 0) << ','
            << est.n_pairs << '\n';
}

}  // namespace

JpdSummary fit_all_references(const ExperimentConfig& config,
                              const std::vector<MimicryResponse>& responses,
                              const Continuum& continuum) {
    std::map<int, DifferenceTable> tables;
    tables[0] = tabulate(responses, continuum, config.rule);
    std::map<int, std::vector<MimicryResponse>> by_subject;
    for (const auto& r : responses) by_subject[r.subject].push_back(r);
    for (const auto& [subject, rs] : by_subject)
        tables[subject] = tabulate(rs, continuum, config.rule);
    return summarize_fits(config, tables);
}

std::string run_fit(const ExperimentConfig& config, const std::string& out_dir) {
    const std::map<int, DifferenceTable> tables =
        read_tables_csv(stage_path(out_dir, "difference_table.csv"));
    if (!tables.count(0)) throw data_error("run_fit: pooled table missing");
    const JpdSummary summary = summarize_fits(config, tables);

    const std::string jpd_path = stage_path(out_dir, "jpd.csv");
    write_jpd_csv(jpd_path, summary);

    // Categorization boundaries, per subject and pooled.
    const std::string cat_path = stage_path(out_dir, "categorization.csv");
    if (fs::exists(cat_path)) {
        std::ifstream in(cat_path);
        std::string line;
        std::getline(in, line);
        std::map<int, std::map<int, std::pair<double, double>>> counts;  // subj -> stim
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            auto& cell = counts[std::stoi(f[0])][std::stoi(f[1])];
            cell.second += 1.0;
            cell.first += std::stod(f[3]);
        }
        std::ofstream out(stage_path(out_dir, "boundaries.csv"));
        out << "subject,boundary_stim,converged,separated\n";
        for (const auto& [subject, stims] : counts) {
            std::vector<BinomialPoint> points;
            for (const auto& [stim, kn] : stims)
                points.push_back({static_cast<double>(stim), kn.first, kn.second});
            try {
                const CategorizationFit fit = fit_categorization(points);
                out << subject << ',' << csv_num(fit.boundary_stim) << ','
                    << (fit.converged ? 1 : 0) << ',' << (fit.separated ? 1 : 0) << '\n';
            } catch (const data_error&) {
                out << subject << ",nan,0,0\n";
            }
        }
    }
    return jpd_path;
}

std::string run_render_report(const ExperimentConfig& config, const std::string& out_dir) {
    (void)config;  // the report is built entirely from persisted intermediates
    const Continuum continuum = load_stage_continuum(out_dir);
    const std::vector<ResponseRow> rows = load_stage_responses(out_dir);
    const std::string jpd_path = stage_path(out_dir, "jpd.csv");
    if (!fs::exists(jpd_path))
        throw data_error("missing intermediate: " + jpd_path + " (run fit first)");

    const std::string report_dir = stage_path(out_dir, "report");
    fs::create_directories(report_dir);

    // Categorization curves.
    {
        SvgPlot plot;
        plot.title = "Perceptual categorization";
        plot.x_label = "stimulus number";
        plot.y_label = "P(high category)";
        const std::string cat_path = stage_path(out_dir, "categorization.csv");
        if (fs::exists(cat_path)) {
            std::ifstream in(cat_path);
            std::string line;
            std::getline(in, line);
            std::map<int, std::pair<double, double>> pooled;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto f = split_csv_line(line);
                auto& cell = pooled[std::stoi(f[1])];
                cell.first += std::stod(f[3]);
                cell.second += 1.0;
            }
            SvgSeries series;
            series.label = "pooled";
            series.marker = SvgMarker::kCircle;
            for (const auto& [stim, kn] : pooled)
                series.points.push_back({stim, kn.first / kn.second});
            plot.series.push_back(series);
        }
        write_svg((fs::path(report_dir) / "categorization.svg").string(), plot);
    }

    // Response means against stimulus targets in F1 x F2.
    {
        SvgPlot plot;
        plot.title = "Stimuli and mean mimicry responses";
        plot.x_label = "F2 (Hz)";
        plot.y_label = "F1 (Hz)";
        plot.invert_x = true;
        plot.invert_y = true;
        SvgSeries stim_series;
        stim_series.label = "stimuli";
        stim_series.color = "#2ca02c";
        stim_series.line = false;
        stim_series.marker = SvgMarker::kCross;
        for (const auto& s : continuum.stimuli)
            stim_series.points.push_back({s.target.f2_hz, s.target.f1_hz});
        plot.series.push_back(stim_series);

        std::map<int, std::array<double, 3>> means;  // stim -> {f1 sum, f2 sum, n}
        for (const auto& r : rows) {
            auto& m = means[r.stimulus];
            m[0] += r.f1_hz;
            m[1] += r.f2_hz;
            m[2] += 1.0;
        }
        SvgSeries resp_series;
        resp_series.label = "responses";
        resp_series.color = "#d62728";
        resp_series.marker = SvgMarker::kCircle;
        for (const auto& [stim, m] : means)
            resp_series.points.push_back({m[1] / m[2], m[0] / m[2]});
        plot.series.push_back(resp_series);
        write_svg((fs::path(report_dir) / "responses_f1f2.svg").string(), plot);
    }

    // JPD per reference: X50 and inverse steepness.
    std::vector<std::array<double, 3>> jpd_rows;  // ref, x50, steepness
    {
        std::ifstream in(jpd_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (std::stoi(f[6]) != 1) continue;
            jpd_rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2])});
        }
    }
    {
        SvgPlot plot;
        plot.title = "Just producible difference";
        plot.x_label = "reference stimulus";
        plot.y_label = "X50 (mels)";
        SvgSeries series;
        series.marker = SvgMarker::kCircle;
        for (const auto& r : jpd_rows) series.points.push_back({r[0], r[1]});
        plot.series.push_back(series);
        write_svg((fs::path(report_dir) / "jpd_x50.svg").string(), plot);
    }
    {
        SvgPlot plot;
        plot.title = "Psychometric inverse steepness";
        plot.x_label = "reference stimulus";
        plot.y_label = "X75 - X50 (mels)";
        SvgSeries series;
        series.color = "#9467bd";
        series.marker = SvgMarker::kCircle;
        for (const auto& r : jpd_rows) series.points.push_back({r[0], r[2]});
        plot.series.push_back(series);
        write_svg((fs::path(report_dir) / "jpd_inverse_steepness.svg").string(), plot);
    }

    // Table-style summary.
    double upper = std::numeric_limits<double>::quiet_NaN();
    double lower = std::numeric_limits<double>::quiet_NaN();
    int upper_ref = 0, lower_ref = 0;
    for (const auto& r : jpd_rows) {
        if (std::isnan(upper) || r[1] > upper) {
            upper = r[1];
            upper_ref = static_cast<int>(r[0]);
        }
        if (std::isnan(lower) || r[1] < lower) {
            lower = r[1];
            lower_ref = static_cast<int>(r[0]);
        }
    }
    {
        std::ofstream out(stage_path(report_dir, "summary.csv"));
        out << "bound,x50_mels,reference\n";
        out << "upper," << csv_num(upper) << ',' << upper_ref << '\n';
        out << "lower," << csv_num(lower) << ',' << lower_ref << '\n';
    }
    {
        std::ofstream out(stage_path(report_dir, "summary.txt"));
        out << "Just producible difference limens (mels)\n";
        out << "----------------------------------------\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "Upper bound  %8.2f  (reference stimulus %d)\n",
                      upper, upper_ref);
        out << buf;
        std::snprintf(buf, sizeof(buf), "Lower bound  %8.2f  (reference stimulus %d)\n",
                      lower, lower_ref);
        out << buf;
        out << "Converged references: " << jpd_rows.size() << "\n";
    }
    return report_dir;
}

RunReport run_pipeline(const ExperimentConfig& config, const std::string& out_dir) {
    RunReport report;
    report.out_dir = out_dir;

    auto guard = [&](const char* stage, auto&& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw error(std::string("stage ") + stage + ": " + e.what());
        }
    };

    report.stage_outputs.push_back(
        {"synth", guard("synth", [&] { return run_synth(config, out_dir); })});
    if (!config.audio_responses_dir.empty())
        report.stage_outputs.push_back(
            {"analyze", guard("analyze", [&] { return run_analyze(config, out_dir); })});
    else
        report.stage_outputs.push_back(
            {"simulate", guard("simulate", [&] { return run_simulate(config, out_dir); })});
    report.stage_outputs.push_back(
        {"tabulate", guard("tabulate", [&] { return run_tabulate(config, out_dir); })});
    report.stage_outputs.push_back(
        {"fit", guard("fit", [&] { return run_fit(config, out_dir); })});
    report.stage_outputs.push_back(
        {"report", guard("report", [&] { return run_render_report(config, out_dir); })});

    // Reload the fitted summary for the report object.
    const std::map<int, DifferenceTable> tables =
        read_tables_csv(stage_path(out_dir, "difference_table.csv"));
    report.jpd = summarize_fits(config, tables);

    const std::string boundaries = stage_path(out_dir, "boundaries.csv");
    if (fs::exists(boundaries)) {
        std::ifstream in(boundaries);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f[1] != "nan") report.categorization_boundaries.push_back(std::stod(f[1]));
        }
    }

    // Full manifest: inputs, resolved defaults, outputs, summary.
    nlohmann::json manifest;
    manifest["version"] = kToolkitVersion;
    manifest["seed"] = config.seed;
    manifest["reps"] = config.reps;
    manifest["mode"] = config.mode == ExperimentMode::kExp1Parametric
                           ? "exp1-parametric"
                           : "exp2-resynthesis";
    manifest["mel_formula"] = "2595*log10(1+f/700)";
    manifest["distance_metric"] = "euclidean in (mel F1, mel F2)";
    manifest["rule"] = {{"f1_threshold_hz", config.rule.f1_threshold_hz},
                        {"f2_threshold_hz", config.rule.f2_threshold_hz},
                        {"directional", config.rule.directional}};
    manifest["fit"] = {{"floor_c", config.fit.floor_c},
                       {"estimate_floor", config.fit.estimate_floor},
                       {"pooling", config.fit.pooling == FitPooling::kPooled
                                       ? "pooled"
                                       : "per-subject-mean"}};
    manifest["analysis"] = {{"window_s", config.analysis.window_s},
                            {"step_s", config.analysis.step_s},
                            {"lpc_order", config.analysis.lpc_order},
                            {"preemphasis_hz", config.analysis.preemphasis_hz},
                            {"resample_to_hz", config.analysis.resample_to_hz},
                            {"measurement", "10th vocal period after voicing onset"}};
    manifest["synthesizer"] = {
        {"f3_hz", config.continuum.synthesizer.f3_hz},
        {"f4_hz", config.continuum.synthesizer.f4_hz},
        {"bandwidths_hz",
         {config.continuum.synthesizer.bandwidth1_hz,
          config.continuum.synthesizer.bandwidth2_hz,
          config.continuum.synthesizer.bandwidth3_hz,
          config.continuum.synthesizer.bandwidth4_hz}},
        {"tilt_corner_hz", config.continuum.synthesizer.tilt_corner_hz},
        {"peak_dbfs", config.continuum.synthesizer.peak_dbfs}};
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& [name, path] : report.stage_outputs)
        stages.push_back({{"stage", name}, {"output", path}});
    manifest["stages"] = stages;
    nlohmann::json jpd_js;
    if (report.jpd.upper_bound_mels) {
        jpd_js["upper_bound_mels"] = *report.jpd.upper_bound_mels;
        jpd_js["upper_reference"] = *report.jpd.upper_reference;
    }
    if (report.jpd.lower_bound_mels) {
        jpd_js["lower_bound_mels"] = *report.jpd.lower_bound_mels;
        jpd_js["lower_reference"] = *report.jpd.lower_reference;
    }
    jpd_js["fit_exceptions"] = report.jpd.fit_exceptions;
    manifest["jpd"] = jpd_js;

    std::ofstream out(stage_path(out_dir, "manifest.json"));
    out << manifest.dump(2) << "\n";
    return report;
}

}  // namespace jpd
