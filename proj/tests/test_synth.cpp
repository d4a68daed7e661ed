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

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "jpd/analysis.hpp"
#include "jpd/error.hpp"

using namespace jpd;

TEST_CASE("pitch contour mean equals mean_f0 and stays positive") {
    PitchContour f0;
    f0.mean_f0_hz = 117.0;
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double v = f0.at(static_cast<double>(i) / (n - 1));
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(sum / n == doctest::Approx(117.0).epsilon(0.01));
}

TEST_CASE("render_vowel sample count and cleanliness") {
    StimulusSpec spec;
    spec.target = {270.0, 2290.0};
    spec.duration_s = 0.25;
    const Waveform wf = render_vowel(spec, 16000.0);
    CHECK(wf.samples.size() == 4000);  // duration x rate
    CHECK_FALSE(has_clipping(wf));
    CHECK_FALSE(has_non_finite(wf));
    double peak = 0.0;
    for (double s : wf.samples) peak = std::max(peak, std::abs(s));
    CHECK(peak == doctest::Approx(std::pow(10.0, -3.0 / 20.0)).epsilon(1e-6));
}

TEST_CASE("render_vowel rejects formants above Nyquist") {
    StimulusSpec spec;
    spec.target = {270.0, 2290.0};
    CHECK_THROWS_AS(render_vowel(spec, 4000.0), domain_error);
    spec.duration_s = 0.0;
    CHECK_THROWS_AS(render_vowel(spec, 16000.0), domain_error);
}

TEST_CASE("rendered token mean f0 matches the contour") {
    StimulusSpec spec;
    spec.target = {270.0, 2290.0};
    spec.duration_s = 0.25;
    spec.f0.mean_f0_hz = 117.0;
    const Waveform wf = render_vowel(spec, 16000.0);
    const F0Track track = track_f0(wf);
    const double mean = track.mean_voiced();
    CHECK(std::abs(mean - 117.0) < 2.0);
}

TEST_CASE("parametric continuum endpoints and equal mel spacing") {
    PitchContour f0;
    const Continuum c = build_parametric_continuum({270.0, 2290.0}, {390.0, 1990.0}, 9,
                                                   0.25, f0, 16000.0);
    REQUIRE(c.stimuli.size() == 9);
    CHECK(c.stimuli.front().target.f1_hz == doctest::Approx(270.0).epsilon(1e-9));
    CHECK(c.stimuli.front().target.f2_hz == doctest::Approx(2290.0).epsilon(1e-9));
    CHECK(c.stimuli.back().target.f1_hz == doctest::Approx(390.0).epsilon(1e-9));
    CHECK(c.stimuli.back().target.f2_hz == doctest::Approx(1990.0).epsilon(1e-9));

    // Ids strictly increasing, all gaps equal within 1e-6 relative.
    std::vector<double> gaps;
    for (std::size_t i = 1; i < c.stimuli.size(); ++i) {
        CHECK(c.stimuli[i].id > c.stimuli[i - 1].id);
        gaps.push_back(mel_distance(c.stimuli[i - 1].target, c.stimuli[i].target));
    }
    const double mean_gap = [&] {
        double s = 0.0;
        for (double g : gaps) s += g;
        return s / gaps.size();
    }();
    for (double g : gaps) CHECK(std::abs(g - mean_gap) / mean_gap < 1e-6);
}

TEST_CASE("parametric continuum with n=2 is just the endpoints") {
    PitchContour f0;
    const Continuum c =
        build_parametric_continuum({270.0, 2290.0}, {390.0, 1990.0}, 2, 0.1, f0, 16000.0);
    CHECK(c.stimuli.size() == 2);
    CHECK_THROWS_AS(build_parametric_continuum({270.0, 2290.0}, {390.0, 1990.0}, 1, 0.1,
                                               f0, 16000.0),
                    domain_error);
    CHECK_THROWS_AS(build_parametric_continuum({270.0, 2290.0}, {270.0, 2290.0}, 5, 0.1,
                                               f0, 16000.0),
                    domain_error);
}

TEST_CASE("continuum manifest round trip") {
    PitchContour f0;
    const Continuum c =
        build_parametric_continuum({270.0, 2290.0}, {390.0, 1990.0}, 3, 0.1, f0, 16000.0);
    const auto dir = std::filesystem::temp_directory_path() / "jpd_test_continuum";
    const std::string manifest = write_continuum(c, dir.string());
    const Continuum loaded = read_continuum(manifest);
    REQUIRE(loaded.stimuli.size() == 3);
    CHECK(loaded.mode == ContinuumMode::kParametric);
    CHECK(loaded.sample_rate == 16000.0);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded.stimuli[i].target.f1_hz ==
              doctest::Approx(c.stimuli[i].target.f1_hz).epsilon(1e-9));
        CHECK(loaded.audio[i].samples.size() == c.audio[i].samples.size());
    }
    std::filesystem::remove_all(dir);
}
