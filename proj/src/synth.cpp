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

#include "jpd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "jpd/error.hpp"

namespace jpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Two-pole resonator, unity gain at DC.
struct Resonator {
    double b1 = 0.0, b2 = 0.0, gain = 1.0;
    double y1 = 0.0, y2 = 0.0;

    Resonator(double freq_hz, double bandwidth_hz, double sample_rate) {
        const double r = std::exp(-kPi * bandwidth_hz / sample_rate);
        b1 = 2.0 * r * std::cos(2.0 * kPi * freq_hz / sample_rate);
        b2 = -r * r;
        gain = 1.0 - b1 - b2;
    }

    double process(double x) {
        const double y = gain * x + b1 * y1 + b2 * y2;
        y2 = y1;
        y1 = y;
        return y;
    }
};

struct OnePoleLowpass {
    double a = 0.0;
    double y1 = 0.0;

    OnePoleLowpass(double corner_hz, double sample_rate) {
        a = std::exp(-2.0 * kPi * corner_hz / sample_rate);
    }

    double process(double x) {
        y1 = (1.0 - a) * x + a * y1;
        return y1;
    }
};

}  // namespace

double PitchContour::at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const double pp = std::clamp(peak_position, 1e-6, 1.0 - 1e-6);
    const double raw = t < pp
                           ? start_frac + (peak_frac - start_frac) * (t / pp)
                           : peak_frac + (end_frac - peak_frac) * ((t - pp) / (1.0 - pp));
    // Mean of the piecewise-linear shape, for exact rescaling to mean_f0.
    const double shape_mean =
        pp * 0.5 * (start_frac + peak_frac) + (1.0 - pp) * 0.5 * (peak_frac + end_frac);
    return mean_f0_hz * raw / shape_mean;
}

Waveform render_vowel(const StimulusSpec& spec, double sample_rate,
                      const SynthesizerSettings& settings) {
    check_formant_point(spec.target, "render_vowel");
    if (spec.duration_s <= 0.0) throw domain_error("render_vowel: duration must be > 0");
    if (spec.f0.mean_f0_hz <= 0.0) throw domain_error("render_vowel: mean f0 must be > 0");
    if (spec.f0.start_frac <= 0.0 || spec.f0.peak_frac <= 0.0 || spec.f0.end_frac <= 0.0)
        throw domain_error("render_vowel: f0 contour must stay positive");
    const double nyquist = sample_rate / 2.0;
    const double highest = std::max({spec.target.f2_hz, settings.f3_hz, settings.f4_hz});
    if (highest >= nyquist)
        throw domain_error("render_vowel: formant target at or above Nyquist");

    const std::size_t n =
        static_cast<std::size_t>(std::lround(spec.duration_s * sample_rate));
    Waveform wf;
    wf.sample_rate = sample_rate;
    wf.samples.assign(n, 0.0);

    // Glottal pulse train following the f0 contour.
    double phase = 1.0;  // fire on the first sample
    for (std::size_t i = 0; i < n; ++i) {
        const double f0 = spec.f0.at(static_cast<double>(i) / static_cast<double>(n));
        phase += f0 / sample_rate;
        if (phase >= 1.0) {
            phase -= 1.0;
            wf.samples[i] = 1.0;
        }
    }

    // -12 dB/oct source tilt: two cascaded one-pole lowpass sections.
    OnePoleLowpass tilt1(settings.tilt_corner_hz, sample_rate);
    OnePoleLowpass tilt2(settings.tilt_corner_hz, sample_rate);
    Resonator r1(spec.target.f1_hz, settings.bandwidth1_hz, sample_rate);
    Resonator r2(spec.target.f2_hz, settings.bandwidth2_hz, sample_rate);
    Resonator r3(settings.f3_hz, settings.bandwidth3_hz, sample_rate);
    Resonator r4(settings.f4_hz, settings.bandwidth4_hz, sample_rate);

    for (double& s : wf.samples)
        s = r4.process(r3.process(r2.process(r1.process(tilt2.process(tilt1.process(s))))));

    // Short raised-cosine fades to avoid onset/offset clicks.
    const std::size_t fade_n = std::min(
        n / 2, static_cast<std::size_t>(std::lround(settings.fade_s * sample_rate)));
    for (std::size_t i = 0; i < fade_n; ++i) {
        const double g = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) /
                                              static_cast<double>(fade_n));
        wf.samples[i] *= g;
        wf.samples[n - 1 - i] *= g;
    }

    peak_normalize(wf, settings.peak_dbfs);
    return wf;
}

Continuum build_parametric_continuum(const FormantPoint& endpoint_a,
                                     const FormantPoint& endpoint_b, int n,
                                     double duration_s, const PitchContour& f0,
                                     double sample_rate,
                                     const SynthesizerSettings& settings) {
    check_formant_point(endpoint_a, "build_parametric_continuum");
    check_formant_point(endpoint_b, "build_parametric_continuum");
    if (n < 2) throw domain_error("build_parametric_continuum: need n >= 2");
    if (mel_distance(endpoint_a, endpoint_b) <= 0.0)
        throw domain_error("build_parametric_continuum: coincident endpoints");

    const MelPoint ma = to_mel(endpoint_a);
    const MelPoint mb = to_mel(endpoint_b);

    Continuum c;
    c.mode = ContinuumMode::kParametric;
    c.sample_rate = sample_rate;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const MelPoint m{ma.f1_mel + t * (mb.f1_mel - ma.f1_mel),
                         ma.f2_mel + t * (mb.f2_mel - ma.f2_mel)};
        StimulusSpec spec;
        spec.id = i + 1;
        spec.target = to_hz(m);
        spec.duration_s = duration_s;
        spec.f0 = f0;
        c.stimuli.push_back(spec);
        c.audio.push_back(render_vowel(spec, sample_rate, settings));
        c.flags.emplace_back();
    }
    return c;
}

std::string write_continuum(const Continuum& continuum, const std::string& dir,
                            const SynthesizerSettings& settings) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["mode"] =
        continuum.mode == ContinuumMode::kParametric ? "parametric" : "resynthesis";
    manifest["sample_rate"] = continuum.sample_rate;
    manifest["mel_formula"] = "2595*log10(1+f/700)";
    manifest["synthesizer"] = {
        {"f3_hz", settings.f3_hz},           {"f4_hz", settings.f4_hz},
        {"bandwidth1_hz", settings.bandwidth1_hz}, {"bandwidth2_hz", settings.bandwidth2_hz},
        {"bandwidth3_hz", settings.bandwidth3_hz}, {"bandwidth4_hz", settings.bandwidth4_hz},
        {"tilt_corner_hz", settings.tilt_corner_hz}, {"peak_dbfs", settings.peak_dbfs}};

    nlohmann::json stimuli = nlohmann::json::array();
    for (std::size_t i = 0; i < continuum.stimuli.size(); ++i) {
        const StimulusSpec& s = continuum.stimuli[i];
        char name[32];
        std::snprintf(name, sizeof(name), "stim_%03d.wav", s.id);
        const std::string filename = name;
        write_wav((fs::path(dir) / filename).string(), continuum.audio[i]);
        const MelPoint m = to_mel(s.target);
        nlohmann::json js = {{"id", s.id},
                             {"f1_hz", s.target.f1_hz},
                             {"f2_hz", s.target.f2_hz},
                             {"f1_mel", m.f1_mel},
                             {"f2_mel", m.f2_mel},
                             {"duration_s", s.duration_s},
                             {"f0",
                              {{"mean_f0_hz", s.f0.mean_f0_hz},
                               {"start_frac", s.f0.start_frac},
                               {"peak_frac", s.f0.peak_frac},
                               {"end_frac", s.f0.end_frac},
                               {"peak_position", s.f0.peak_position}}},
                             {"audio", filename}};
        if (i < continuum.flags.size() && !continuum.flags[i].empty())
            js["flags"] = continuum.flags[i];
        stimuli.push_back(js);
    }
    manifest["stimuli"] = stimuli;

    const std::string path = (fs::path(dir) / "continuum.json").string();
    std::ofstream out(path);
    out << manifest.dump(2) << "\n";
    if (!out) throw error("write_continuum: cannot write " + path);
    return path;
}

Continuum read_continuum(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw error("read_continuum: cannot open " + manifest_path);
    nlohmann::json manifest = nlohmann::json::parse(in);

    Continuum c;
    c.mode = manifest.at("mode") == "parametric" ? ContinuumMode::kParametric
                                                 : ContinuumMode::kResynthesis;
    c.sample_rate = manifest.at("sample_rate").get<double>();
    const fs::path dir = fs::path(manifest_path).parent_path();
    for (const auto& js : manifest.at("stimuli")) {
        StimulusSpec s;
        s.id = js.at("id").get<int>();
        s.target.f1_hz = js.at("f1_hz").get<double>();
        s.target.f2_hz = js.at("f2_hz").get<double>();
        s.duration_s = js.at("duration_s").get<double>();
        const auto& f0 = js.at("f0");
        s.f0.mean_f0_hz = f0.at("mean_f0_hz").get<double>();
        s.f0.start_frac = f0.at("start_frac").get<double>();
        s.f0.peak_frac = f0.at("peak_frac").get<double>();
        s.f0.end_frac = f0.at("end_frac").get<double>();
        s.f0.peak_position = f0.at("peak_position").get<double>();
        c.stimuli.push_back(s);
        c.audio.push_back(read_wav((dir / js.at("audio").get<std::string>()).string()));
        std::vector<std::string> flags;
        if (js.contains("flags"))
            flags = js.at("flags").get<std::vector<std::string>>();
        c.flags.push_back(std::move(flags));
    }
    return c;
}

}  // namespace jpd
