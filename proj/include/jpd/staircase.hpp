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

#include "jpd/psychometrics.hpp"
#include "jpd/simulate.hpp"
#include "jpd/units.hpp"

namespace jpd {

struct StaircaseResult {
    double distance_mels = 0.0;  // mean of the last 6 reversal distances
    int n_trials = 0;
    int n_reversals = 0;
    bool converged = false;  // false when the 400-trial cap was hit
};

struct StaircaseOptions {
    double target_p = 0.5;
    double initial_distance_mels = 80.0;
    double initial_step_mels = 24.0;
    // Halving stops here; the walk must stay mobile enough to drift out of
    // a displaced approach within the reversal budget.
    double min_step_mels = 6.0;
    int reversals = 12;
    int reversals_to_average = 6;
    int max_trials = 400;
    std::uint64_t seed = 1;
};

// Adaptive interstimulus step search: a transformed up/down staircase on
// classify_pair outcomes with step halving at reversals, converging to the
// distance whose probability of a "different" response is target_p. The
// comparison stimulus moves along `direction` (unit vector in mel space)
// from the reference.
StaircaseResult adaptive_step_search(const SubjectProfile& profile,
                                     const FormantPoint& reference, double dir_f1_mel,
                                     double dir_f2_mel, const DifferenceRule& rule,
                                     const StaircaseOptions& options = {});

}  // namespace jpd
