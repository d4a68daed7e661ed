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

#include "jpd/analysis.hpp"
#include "jpd/audio.hpp"
#include "jpd/synth.hpp"
#include "jpd/units.hpp"

namespace jpd {

struct ResynthesisPlan {
    Waveform base_token;
    int lpc_order = 12;
    double window_s = 0.025;     // Gaussian analysis window
    double time_step_s = 0.010;
    double f1_step_hz = 0.0;
    double f2_step_hz = 0.0;     // sign carries direction
    int index_min = -1;
    int index_max = 12;          // inclusive; index 1 is the unmodified token
    double target_rate = 11025.0;

    // Filled in by plan_resynthesis for manifest/verification use.
    FormantPoint base_measured;
    double base_mean_f0_hz = 0.0;
};

void check_plan(const ResynthesisPlan& plan);

// Derive step sizes from the measured mean productions of the two words and
// choose the most robust 'hid' token as the series base (unclipped, then
// maximal duration x F1-F3 peak prominence).
ResynthesisPlan plan_resynthesis(const std::vector<Waveform>& hid_tokens,
                                 const std::vector<Waveform>& head_tokens,
                                 int steps_between = 10, int index_min = -1,
                                 int index_max = 12,
                                 const AnalysisSettings& analysis = {});

// Source-filter resynthesis: resample to the target rate, Burg LPC per
// frame, inverse filter for the residual, then refilter through per-frame
// polynomials whose F1/F2 pole pairs are rotated by (k-1) steps. Index 1
// reproduces the base token exactly. Each output token carries round-trip
// verification flags; failures are flagged, never silently dropped.
Continuum resynthesize_series(const ResynthesisPlan& plan);

// Round-trip audit used by resynthesize_series and by audio ingestion:
// re-extract every token, flag tokens whose measured F1/F2 miss the spec
// target (f1_shift_unverified / f2_shift_unverified) and series-order
// violations (f1_non_monotone / f2_non_monotone). Returns true when no new
// flag was raised.
bool verify_series_roundtrip(Continuum& series, const AnalysisSettings& settings);

}  // namespace jpd
