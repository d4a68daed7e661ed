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
#include <vector>

#include "jpd/synth.hpp"
#include "jpd/units.hpp"

namespace jpd {

// Maps formant points to a scalar stimulus coordinate: position along the
// continuum line in mel space, on the stimulus-id scale (the first stimulus
// sits at its own id, one id unit per step). Category boundaries live on
// this axis.
struct ContinuumAxis {
    MelPoint origin;          // mel position of the first stimulus
    double dir_f1_mel = 1.0;  // unit direction
    double dir_f2_mel = 0.0;
    double step_mels = 1.0;    // mels per unit coordinate
    double origin_coord = 1.0;  // id of the first stimulus

    double coordinate(const MelPoint& p) const {
        const double proj =
            (p.f1_mel - origin.f1_mel) * dir_f1_mel + (p.f2_mel - origin.f2_mel) * dir_f2_mel;
        return origin_coord + proj / step_mels;
    }

    MelPoint point_at(double coord) const {
        const double s = (coord - origin_coord) * step_mels;
        return {origin.f1_mel + s * dir_f1_mel, origin.f2_mel + s * dir_f2_mel};
    }

    static ContinuumAxis from_continuum(const Continuum& continuum);
    static ContinuumAxis from_endpoints(const FormantPoint& first,
                                        const FormantPoint& last, int n_stimuli,
                                        double first_id = 1.0);
};

// Parameters of one simulated mimicry transfer function.
struct SubjectProfile {
    int id = 1;
    double boundary_stim = 6.5;   // stimulus coordinate of the category boundary
    double warp_strength = 0.0;   // [0,1] compression toward the category prototype
    double category_weight = 0.0; // [0,1] extra pull toward pure-category production
    std::vector<FormantPoint> prototypes;  // one per category, low then high
    double noise_sd_f1_hz = 29.0;
    double noise_sd_f2_hz = 58.0;
    double categorization_slope = 1.2;  // probit slope per stimulus number
    std::uint64_t seed = 0;
    ContinuumAxis axis;
    bool axis_set = false;  // run_block binds the axis from the continuum if unset
};

void check_profile(const SubjectProfile& profile);

struct MimicryResponse {
    int subject = 0;
    int stimulus_id = 0;
    int repetition = 0;   // 1-based within stimulus
    int trial_index = 0;  // presentation position within the block, 1-based
    FormantPoint produced;
};

// One mimicry response: deterministic warp toward the category prototype in
// mel space, then additive Gaussian production noise in Hz. Draws come from
// the stream keyed by (seed, subject, stimulus, repetition).
MimicryResponse respond(const SubjectProfile& profile, const FormantPoint& stimulus,
                        int stimulus_id, int repetition);

// reps responses per stimulus in seed-randomized presentation order.
std::vector<MimicryResponse> run_block(const SubjectProfile& profile,
                                       const Continuum& continuum, int reps);

struct CategorizationResult {
    int label = 0;         // 0 = low category, 1 = high category
    double p_high = 0.0;   // probit probability of the high category
};

// Forced-choice label sampled from a probit in stimulus number centered on
// the profile boundary.
CategorizationResult categorize(const SubjectProfile& profile, double stimulus_coord,
                                int repetition = 0);

}  // namespace jpd
