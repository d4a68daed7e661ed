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

#include <string>
#include <vector>

#include "jpd/audio.hpp"
#include "jpd/units.hpp"

namespace jpd {

// Rise-fall f0 contour: piecewise linear through start -> peak -> end
// fractions of the mean, rescaled so the contour mean equals mean_f0_hz
// exactly.
struct PitchContour {
    double mean_f0_hz = 117.0;
    double start_frac = 0.90;
    double peak_frac = 1.10;
    double end_frac = 0.85;
    double peak_position = 0.30;  // fraction of duration

    // f0 at normalized time t in [0, 1].
    double at(double t) const;
};

struct StimulusSpec {
    int id = 0;  // may be <= 0 (resynthesis series uses stimuli 0 and -1)
    FormantPoint target;
    double duration_s = 0.25;
    PitchContour f0;
};

enum class ContinuumMode { kParametric, kResynthesis };

// An ordered stimulus series with rendered audio. `audio` and `flags`
// parallel `stimuli`; flags carry per-token verification notes from the
// resynthesis round-trip checks.
struct Continuum {
    ContinuumMode mode = ContinuumMode::kParametric;
    double sample_rate = 16000.0;
    std::vector<StimulusSpec> stimuli;
    std::vector<Waveform> audio;
    std::vector<std::vector<std::string>> flags;
};

// Cascade vowel synthesizer settings. F1/F2 come from the stimulus; the
// higher formants and bandwidths are fixed, textbook defaults, all exposed
// in configs and echoed into manifests.
struct SynthesizerSettings {
    double f3_hz = 2800.0;
    double f4_hz = 3500.0;
    double bandwidth1_hz = 60.0;
    double bandwidth2_hz = 90.0;
    double bandwidth3_hz = 150.0;
    double bandwidth4_hz = 200.0;
    double tilt_corner_hz = 100.0;  // -12 dB/oct above this
    double peak_dbfs = -3.0;
    double fade_s = 0.005;
};

// Impulse-train glottal source with -12 dB/oct tilt through a cascade of
// second-order resonators. Throws if a target formant reaches Nyquist.
Waveform render_vowel(const StimulusSpec& spec, double sample_rate,
                      const SynthesizerSettings& settings = {});

// n stimuli whose targets interpolate linearly in (mel F1, mel F2) between
// the endpoints, inclusive; audio rendered for each.
Continuum build_parametric_continuum(const FormantPoint& endpoint_a,
                                     const FormantPoint& endpoint_b, int n,
                                     double duration_s, const PitchContour& f0,
                                     double sample_rate = 16000.0,
                                     const SynthesizerSettings& settings = {});

// Write per-stimulus WAV files plus a JSON manifest (targets in Hz and mel,
// f0 parameters, filenames, mode, and the resolved synthesizer defaults).
// Returns the manifest path.
std::string write_continuum(const Continuum& continuum, const std::string& dir,
                            const SynthesizerSettings& settings = {});

// Reload a continuum (specs + audio) from a manifest written by
// write_continuum.
Continuum read_continuum(const std::string& manifest_path);

}  // namespace jpd
