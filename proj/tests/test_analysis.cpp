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

#include "jpd/analysis.hpp"

#include <cmath>

#include "doctest.h"
#include "jpd/error.hpp"
#include "jpd/refine.hpp"
#include "jpd/stats.hpp"
#include "jpd/synth.hpp"

using namespace jpd;

namespace {

Waveform make_vowel(double f1, double f2, double duration = 0.25, double f0 = 117.0) {
    StimulusSpec spec;
    spec.target = {f1, f2};
    spec.duration_s = duration;
    spec.f0.mean_f0_hz = f0;
    return render_vowel(spec, 16000.0);
}

Waveform silence(double duration, double rate) {
    Waveform wf;
    wf.sample_rate = rate;
    wf.samples.assign(static_cast<std::size_t>(duration * rate), 0.0);
    return wf;
}

}  // namespace

TEST_CASE("analysis-by-synthesis recovers the target formants") {
    const Waveform wf = make_vowel(270.0, 2290.0);
    const MeasurementPoint mp = measure_token(wf);
    CHECK(std::abs(mp.point.f1_hz - 270.0) <= 20.0);
    CHECK(std::abs(mp.point.f2_hz - 2290.0) <= 50.0);
}

TEST_CASE("track_formants rejects empty and silent audio") {
    Waveform empty;
    empty.sample_rate = 16000.0;
    CHECK_THROWS_AS(track_formants(empty), audio_error);
    CHECK_THROWS_AS(track_formants(silence(0.2, 16000.0)), audio_error);
}

TEST_CASE("white noise is flagged unreliable") {
    Waveform noise;
    noise.sample_rate = 16000.0;
    RngStream rng(11);
    noise.samples.resize(3200);
    for (double& s : noise.samples) s = 0.3 * (2.0 * rng.next_uniform() - 1.0);
    const FormantTrack track = track_formants(noise);
    CHECK_FALSE(track.reliable);
}

TEST_CASE("voicing onset with leading silence") {
    const Waveform vowel = make_vowel(270.0, 2290.0, 0.2);
    Waveform padded = silence(0.05, 16000.0);
    padded.samples.insert(padded.samples.end(), vowel.samples.begin(),
                          vowel.samples.end());
    const double onset = find_voicing_onset(padded);
    CHECK(onset >= 0.045);
    CHECK(onset <= 0.060);
}

TEST_CASE("voicing onset of a fully voiced token is near zero") {
    const double onset = find_voicing_onset(make_vowel(270.0, 2290.0));
    CHECK(onset < 0.01);
}

TEST_CASE("voicing onset of silence throws") {
    CHECK_THROWS_AS(find_voicing_onset(silence(0.2, 16000.0)), audio_error);
}

TEST_CASE("tenth-period measurement time at constant f0") {
    // Constant 117 Hz: measurement lands at onset + 10/117 = onset + 85.5 ms.
    StimulusSpec spec;
    spec.target = {270.0, 2290.0};
    spec.duration_s = 0.25;
    spec.f0 = {117.0, 1.0, 1.0, 1.0, 0.3};  // flat contour
    const Waveform wf = render_vowel(spec, 16000.0);
    const FormantTrack track = track_formants(wf);
    const F0Track f0 = track_f0(wf);
    const MeasurementPoint mp = measure_at_tenth_period(track, f0, wf.duration());
    CHECK(mp.time_s >= track.voicing_onset_s);
    CHECK(mp.time_s == doctest::Approx(track.voicing_onset_s + 10.0 / 117.0).epsilon(0.03));

    // And at 100 Hz: onset + 0.1 s.
    spec.f0 = {100.0, 1.0, 1.0, 1.0, 0.3};
    const Waveform wf100 = render_vowel(spec, 16000.0);
    const FormantTrack track100 = track_formants(wf100);
    const F0Track f0100 = track_f0(wf100);
    const MeasurementPoint mp100 = measure_at_tenth_period(track100, f0100, wf100.duration());
    CHECK(mp100.time_s ==
          doctest::Approx(track100.voicing_onset_s + 0.1).epsilon(0.03));
}

TEST_CASE("short token has no tenth period") {
    // 80 ms at 117 Hz is only ~9.4 periods.
    const Waveform wf = make_vowel(270.0, 2290.0, 0.080);
    const FormantTrack track = track_formants(wf);
    const F0Track f0 = track_f0(wf);
    CHECK_THROWS_AS(measure_at_tenth_period(track, f0, wf.duration()), audio_error);
}

TEST_CASE("bias-corrected measurement lands within a few Hz") {
    // Raw estimates carry harmonic-attraction bias; the refined estimator
    // must cancel it on tokens from the toolkit's own synthesizer.
    for (double f1 : {290.0, 330.0, 370.0}) {
        const double f2 = 2260.0 - 2.5 * (f1 - 290.0);
        const Waveform wf = make_vowel(f1, f2);
        const MeasurementPoint mp = measure_token_refined(wf);
        CHECK(std::abs(mp.point.f1_hz - f1) < 4.0);
        CHECK(std::abs(mp.point.f2_hz - f2) < 8.0);
    }
}

TEST_CASE("legacy digitization rate option") {
    // Analysis can emulate a 9600 Hz capture chain; formants still land
    // within tolerance.
    const Waveform wf = make_vowel(330.0, 2100.0);
    AnalysisSettings s;
    s.resample_to_hz = 9600.0;
    const FormantTrack track = track_formants(wf, s);
    REQUIRE_FALSE(track.frames.empty());
    const F0Track f0 = track_f0(wf, s);
    const MeasurementPoint mp = measure_at_tenth_period(track, f0, wf.duration());
    CHECK(std::abs(mp.point.f1_hz - 330.0) <= 25.0);
    CHECK(std::abs(mp.point.f2_hz - 2100.0) <= 60.0);
}

TEST_CASE("re-measurement is stable under small time jitter") {
    // Shifting the analysis grid by 2 ms must not move the measured point
    // by more than a fraction of the production-noise scale.
    const Waveform wf = make_vowel(330.0, 2100.0);
    const MeasurementPoint base = measure_token(wf);

    Waveform shifted = wf;
    shifted.samples.erase(shifted.samples.begin(),
                          shifted.samples.begin() + 32);  // 2 ms at 16 kHz
    const MeasurementPoint moved = measure_token(shifted);
    CHECK(std::abs(moved.point.f1_hz - base.point.f1_hz) < 0.1 * 29.0);
    CHECK(std::abs(moved.point.f2_hz - base.point.f2_hz) < 0.1 * 58.0);
}
