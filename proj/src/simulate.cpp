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

#include "jpd/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "jpd/error.hpp"
#include "jpd/stats.hpp"

namespace jpd {

namespace {

// Stream tags keep the per-purpose random streams disjoint.
enum StreamTag : std::uint64_t {
    kTagRespond = 0x52,
    kTagOrder = 0x4F,
    kTagCategorize = 0x43,
};

std::uint64_t id_bits(int v) {
    // Stimulus ids may be negative (resynthesis stimuli 0 and -1).
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(v)) + 0x8000000000ULL;
}

}  // namespace

ContinuumAxis ContinuumAxis::from_continuum(const Continuum& continuum) {
    if (continuum.stimuli.size() < 2)
        throw data_error("ContinuumAxis: need at least two stimuli");
    return from_endpoints(continuum.stimuli.front().target,
                          continuum.stimuli.back().target,
                          static_cast<int>(continuum.stimuli.size()),
                          continuum.stimuli.front().id);
}

ContinuumAxis ContinuumAxis::from_endpoints(const FormantPoint& first,
                                            const FormantPoint& last, int n_stimuli,
                                            double first_id) {
    if (n_stimuli < 2) throw data_error("ContinuumAxis: need at least two stimuli");
    const MelPoint a = to_mel(first);
    const MelPoint b = to_mel(last);
    const double df1 = b.f1_mel - a.f1_mel;
    const double df2 = b.f2_mel - a.f2_mel;
    const double len = std::hypot(df1, df2);
    if (len <= 0.0) throw data_error("ContinuumAxis: coincident endpoints");
    ContinuumAxis axis;
    axis.origin = a;
    axis.dir_f1_mel = df1 / len;
    axis.dir_f2_mel = df2 / len;
    axis.step_mels = len / (n_stimuli - 1);
    axis.origin_coord = first_id;
    return axis;
}

void check_profile(const SubjectProfile& profile) {
    if (profile.warp_strength < 0.0 || profile.warp_strength > 1.0)
        throw domain_error("SubjectProfile: warp_strength must lie in [0, 1]");
    if (profile.category_weight < 0.0 || profile.category_weight > 1.0)
        throw domain_error("SubjectProfile: category_weight must lie in [0, 1]");
    if (profile.noise_sd_f1_hz <= 0.0 || profile.noise_sd_f2_hz <= 0.0)
        throw domain_error("SubjectProfile: production noise sds must be > 0");
    if (profile.prototypes.size() < 2)
        throw domain_error("SubjectProfile: need one prototype per category");
    for (const auto& p : profile.prototypes) check_formant_point(p, "SubjectProfile");
}

MimicryResponse respond(const SubjectProfile& profile, const FormantPoint& stimulus,
                        int stimulus_id, int repetition) {
    check_profile(profile);
    check_formant_point(stimulus, "respond");
    if (!profile.axis_set)
        throw domain_error("respond: profile has no continuum axis bound");

    const MelPoint stim_mel = to_mel(stimulus);
    const double coord = profile.axis.coordinate(stim_mel);
    const std::size_t category = coord < profile.boundary_stim ? 0 : 1;
    const MelPoint proto = to_mel(profile.prototypes[category]);

    const double w = profile.warp_strength;
    const double cw = profile.category_weight;
    MelPoint target{(1.0 - w) * stim_mel.f1_mel + w * proto.f1_mel,
                    (1.0 - w) * stim_mel.f2_mel + w * proto.f2_mel};
    target.f1_mel = (1.0 - cw) * target.f1_mel + cw * proto.f1_mel;
    target.f2_mel = (1.0 - cw) * target.f2_mel + cw * proto.f2_mel;
    const FormantPoint target_hz = to_hz(target);

    RngStream stream(derive_key({kTagRespond, profile.seed,
                                 static_cast<std::uint64_t>(profile.id),
                                 id_bits(stimulus_id),
                                 static_cast<std::uint64_t>(repetition)}));

    MimicryResponse r;
    r.subject = profile.id;
    r.stimulus_id = stimulus_id;
    r.repetition = repetition;
    FormantPoint produced;
    for (int attempt = 0; attempt < 10; ++attempt) {
        produced.f1_hz = target_hz.f1_hz + profile.noise_sd_f1_hz * stream.next_gaussian();
        produced.f2_hz = target_hz.f2_hz + profile.noise_sd_f2_hz * stream.next_gaussian();
        if (formant_point_valid(produced)) break;
    }
    if (!formant_point_valid(produced)) {
        produced.f1_hz = std::max(1.0, std::min(produced.f1_hz, target_hz.f1_hz));
        produced.f2_hz = std::max(produced.f1_hz + 1.0, produced.f2_hz);
    }
    r.produced = produced;
    return r;
}

std::vector<MimicryResponse> run_block(const SubjectProfile& profile,
                                       const Continuum& continuum, int reps) {
    if (reps < 1) throw domain_error("run_block: reps must be >= 1");
    SubjectProfile bound = profile;
    if (!bound.axis_set) {
        bound.axis = ContinuumAxis::from_continuum(continuum);
        bound.axis_set = true;
    }
    check_profile(bound);

    // Trial list: each stimulus `reps` times, shuffled by the order stream.
    struct Trial {
        int stimulus_index;
        int repetition;
    };
    std::vector<Trial> trials;
    for (std::size_t s = 0; s < continuum.stimuli.size(); ++s)
        for (int rep = 1; rep <= reps; ++rep)
            trials.push_back({static_cast<int>(s), rep});

    RngStream order(derive_key(
        {kTagOrder, bound.seed, static_cast<std::uint64_t>(bound.id)}));
    for (std::size_t i = trials.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(order.next_uniform() * static_cast<double>(i));
        std::swap(trials[i - 1], trials[std::min(j, i - 1)]);
    }

    std::vector<MimicryResponse> responses;
    responses.reserve(trials.size());
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const StimulusSpec& spec = continuum.stimuli[trials[t].stimulus_index];
        MimicryResponse r = respond(bound, spec.target, spec.id, trials[t].repetition);
        r.trial_index = static_cast<int>(t) + 1;
        responses.push_back(r);
    }
    return responses;
}

CategorizationResult categorize(const SubjectProfile& profile, double stimulus_coord,
                                int repetition) {
    CategorizationResult result;
    result.p_high = normal_cdf(profile.categorization_slope *
                               (stimulus_coord - profile.boundary_stim));
    RngStream stream(derive_key(
        {kTagCategorize, profile.seed, static_cast<std::uint64_t>(profile.id),
         static_cast<std::uint64_t>(
             static_cast<std::int64_t>(std::llround(stimulus_coord * 1024.0))),
         static_cast<std::uint64_t>(repetition)}));
    result.label = stream.next_uniform() < result.p_high ? 1 : 0;
    return result;
}

}  // namespace jpd
