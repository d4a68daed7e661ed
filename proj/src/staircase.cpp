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

#include "jpd/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jpd/error.hpp"
#include "jpd/stats.hpp"

namespace jpd {

namespace {
// Synthetic stimulus ids inside the staircase response streams.
constexpr int kReferenceId = 900001;
constexpr int kComparisonId = 900002;
}  // namespace

StaircaseResult adaptive_step_search(const SubjectProfile& profile,
                                     const FormantPoint& reference, double dir_f1_mel,
                                     double dir_f2_mel, const DifferenceRule& rule,
                                     const StaircaseOptions& options) {
    check_profile(profile);
    check_formant_point(reference, "adaptive_step_search");
    if (!profile.axis_set)
        throw domain_error("adaptive_step_search: profile has no continuum axis bound");

    const double floor_p = same_stimulus_difference_probability(
        profile.noise_sd_f1_hz, profile.noise_sd_f2_hz, rule);
    if (!(options.target_p > floor_p && options.target_p < 1.0))
        throw domain_error(
            "adaptive_step_search: target_p must lie between the response floor and 1");

    const double norm = std::hypot(dir_f1_mel, dir_f2_mel);
    if (norm <= 0.0) throw domain_error("adaptive_step_search: zero direction");
    const double u1 = dir_f1_mel / norm;
    const double u2 = dir_f2_mel / norm;
    const MelPoint ref_mel = to_mel(reference);

    SubjectProfile subject = profile;
    subject.seed = derive_key({profile.seed, options.seed, 0x5354ULL});

    // Weighted up/down: equilibrium at P(diff) = up / (up + down), so the
    // down step carries the (1-t)/t weight. For target 0.5 this is the
    // plain 1-up/1-down rule.
    const double t = options.target_p;
    const double down_weight = (1.0 - t) / t;

    double distance = options.initial_distance_mels;
    double step = options.initial_step_mels;
    int last_move = 0;  // +1 up, -1 down
    std::vector<double> reversal_distances;

    StaircaseResult result;
    for (int trial = 1; trial <= options.max_trials; ++trial) {
        const MelPoint cmp_mel{ref_mel.f1_mel + distance * u1,
                               ref_mel.f2_mel + distance * u2};
        const FormantPoint comparison = to_hz(cmp_mel);
        if (!formant_point_valid(comparison))
            throw domain_error("adaptive_step_search: direction leaves formant space");

        const MimicryResponse r_ref = respond(subject, reference, kReferenceId, trial);
        const MimicryResponse r_cmp = respond(subject, comparison, kComparisonId, trial);
        const bool different = classify_pair(r_ref, r_cmp, rule, reference, comparison);
        ++result.n_trials;

        const int move = different ? -1 : +1;
        if (last_move != 0 && move != last_move) {
            reversal_distances.push_back(distance);
            step = std::max(options.min_step_mels, step * 0.5);
            if (static_cast<int>(reversal_distances.size()) >= options.reversals) {
                result.converged = true;
                break;
            }
        }
        last_move = move;
        distance += move == -1 ? -step * down_weight : step;
        distance = std::max(distance, options.min_step_mels);
    }

    result.n_reversals = static_cast<int>(reversal_distances.size());
    const int avg_n = std::min<int>(options.reversals_to_average,
                                    static_cast<int>(reversal_distances.size()));
    if (avg_n == 0)
        throw data_error("adaptive_step_search: no reversals observed");
    double sum = 0.0;
    for (int i = 0; i < avg_n; ++i)
        sum += reversal_distances[reversal_distances.size() - 1 - i];
    result.distance_mels = sum / avg_n;
    return result;
}

}  // namespace jpd
