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

#include <vector>

#include "jpd/audio.hpp"
#include "jpd/lpc.hpp"
#include "jpd/units.hpp"

namespace jpd {

struct AnalysisSettings {
    double window_s = 0.025;
    double step_s = 0.010;
    int lpc_order = 0;  // 0 = auto: round(sample_rate/1000) + 2, capped at 12
    double preemphasis_hz = 100.0;  // corner of the two-zero pre-emphasis
    // Resample tokens to this rate before analysis (0 = analyze at the
    // native rate). Emulates legacy digitization rates such as 9600 Hz.
    double resample_to_hz = 0.0;
    double max_bandwidth_hz = 700.0;
    double min_formant_hz = 90.0;
    double nyquist_guard_hz = 50.0;

    // f0 tracking
    double f0_window_s = 0.040;
    double f0_min_hz = 70.0;
    double f0_max_hz = 400.0;
    double voicing_threshold = 0.35;  // normalized autocorrelation peak
};

struct FormantFrame {
    double time_s = 0.0;
    std::vector<FormantBW> formants;  // strictly increasing frequency
};

struct FormantTrack {
    std::vector<FormantFrame> frames;
    double voicing_onset_s = 0.0;
    bool reliable = true;  // false when voicing/formant structure is unstable
};

struct F0Frame {
    double time_s = 0.0;
    double f0_hz = 0.0;     // 0 when unvoiced
    double strength = 0.0;  // normalized autocorrelation peak
};

struct F0Track {
    std::vector<F0Frame> frames;

    // Mean over voiced frames; 0 if none.
    double mean_voiced() const;
};

struct MeasurementPoint {
    double time_s = 0.0;
    FormantPoint point;
};

// Per-frame Burg LPC, pole filtering to plausible formants. Throws
// audio_error on empty or silent input; sets `reliable` false when most
// frames lack voicing or stable formant structure.
FormantTrack track_formants(const Waveform& wf, const AnalysisSettings& settings = {});

// Earliest time where 80-1000 Hz band energy exceeds 10% of the token
// maximum for at least 3 consecutive frames. Throws audio_error when the
// threshold is never reached.
double find_voicing_onset(const Waveform& wf);

// Normalized-autocorrelation pitch track.
F0Track track_f0(const Waveform& wf, const AnalysisSettings& settings = {});

// Formants at the end of the 10th vocal period after voicing onset, the
// measurement-point convention used throughout. Throws audio_error when the
// token holds fewer than 10 periods.
MeasurementPoint measure_at_tenth_period(const FormantTrack& track, const F0Track& f0,
                                         double token_duration_s);

// Convenience: full analysis of one token.
MeasurementPoint measure_token(const Waveform& wf, const AnalysisSettings& settings = {});

}  // namespace jpd
