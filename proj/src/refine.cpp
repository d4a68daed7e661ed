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

#include "jpd/refine.hpp"

#include "jpd/error.hpp"

namespace jpd {

namespace {

// Frame-averaged formants over the voiced middle of the token. The rise-
// fall f0 contour sweeps the harmonic comb across the envelope, so the
// average is far less harmonic-locked than any single frame.
FormantPoint steady_state_point(const Waveform& wf, const AnalysisSettings& analysis) {
    const FormantTrack track = track_formants(wf, analysis);
    const double t0 = 0.2 * wf.duration();
    const double t1 = 0.9 * wf.duration();
    double f1 = 0.0, f2 = 0.0;
    int n = 0;
    for (const auto& frame : track.frames) {
        if (frame.time_s < t0 || frame.time_s > t1 || frame.formants.size() < 2)
            continue;
        f1 += frame.formants[0].frequency_hz;
        f2 += frame.formants[1].frequency_hz;
        ++n;
    }
    if (n == 0) throw audio_error("measure_token_refined: no steady frames");
    return {f1 / n, f2 / n};
}

}  // namespace

MeasurementPoint measure_token_refined(const Waveform& wf,
                                       const AnalysisSettings& analysis,
                                       const SynthesizerSettings& synth,
                                       int iterations) {
    const MeasurementPoint raw = measure_token(wf, analysis);
    const FormantPoint raw_steady = steady_state_point(wf, analysis);
    double mean_f0 = track_f0(wf, analysis).mean_voiced();
    if (mean_f0 <= 0.0) mean_f0 = 117.0;

    // The f0 tracker carries its own small bias, and a reference rendered
    // at the biased value puts its harmonic comb in the wrong place. One
    // probe render calibrates the tracker against itself.
    try {
        StimulusSpec probe;
        probe.target = raw_steady;
        probe.duration_s = wf.duration();
        probe.f0.mean_f0_hz = mean_f0;
        const Waveform rendered = render_vowel(probe, wf.sample_rate, synth);
        const double probe_f0 = track_f0(rendered, analysis).mean_voiced();
        if (probe_f0 > 0.0) {
            const double corrected = 2.0 * mean_f0 - probe_f0;
            if (corrected > 0.5 * mean_f0 && corrected < 2.0 * mean_f0)
                mean_f0 = corrected;
        }
    } catch (const error&) {
    }

    // Estimate the pipeline's bias at the current estimate and subtract it.
    // The bias surface is smooth with slope well below one, so a couple of
    // fixed-point steps land within a couple of Hz.
    FormantPoint estimate = raw_steady;
    for (int i = 0; i < iterations; ++i) {
        StimulusSpec spec;
        spec.target = estimate;
        spec.duration_s = wf.duration();
        spec.f0.mean_f0_hz = mean_f0;
        FormantPoint ref_point;
        try {
            const Waveform reference = render_vowel(spec, wf.sample_rate, synth);
            ref_point = steady_state_point(reference, analysis);
        } catch (const error&) {
            break;  // keep the last good estimate
        }
        const FormantPoint corrected{
            raw_steady.f1_hz - (ref_point.f1_hz - estimate.f1_hz),
            raw_steady.f2_hz - (ref_point.f2_hz - estimate.f2_hz)};
        if (!formant_point_valid(corrected)) break;
        estimate = corrected;
    }

    return {raw.time_s, estimate};
}

}  // namespace jpd
