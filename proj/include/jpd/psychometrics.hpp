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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jpd/simulate.hpp"
#include "jpd/synth.hpp"
#include "jpd/units.hpp"

namespace jpd {

// "Different" decision rule for a response pair: exceed either threshold
// (strictly) in absolute Hz difference. With `directional` set, the signed
// response difference must additionally point the same way as the stimulus
// difference in that dimension.
struct DifferenceRule {
    double f1_threshold_hz = 81.3;
    double f2_threshold_hz = 161.4;
    bool directional = false;
};

bool classify_pair(const MimicryResponse& reference, const MimicryResponse& comparison,
                   const DifferenceRule& rule);

// Directional variant; stimulus targets supply the expected direction.
bool classify_pair(const MimicryResponse& reference, const MimicryResponse& comparison,
                   const DifferenceRule& rule, const FormantPoint& reference_target,
                   const FormantPoint& comparison_target);

struct DifferenceCell {
    long n_pairs = 0;
    long n_different = 0;
    double distance_mels = 0.0;  // between the stimulus targets
};

// Rows keyed by (reference stimulus id, comparison stimulus id).
struct DifferenceTable {
    std::map<std::pair<int, int>, DifferenceCell> cells;

    std::vector<int> reference_ids() const;
};

// Every ordered within-subject response pair counted once; self-pairs
// excluded; the distance column comes from the continuum targets.
DifferenceTable tabulate(const std::vector<MimicryResponse>& responses,
                         const Continuum& continuum, const DifferenceRule& rule);

struct ProbitFit {
    double alpha = 0.0;
    double beta = 0.0;  // per mel
    double floor_c = 0.1;
    bool converged = false;
    bool non_monotone = false;  // beta <= 0 at the optimum
    double log_likelihood = 0.0;
    int n_iterations = 0;
};

struct JpdEstimate {
    int reference_stim = 0;
    double x50_mels = 0.0;
    double inverse_steepness_mels = 0.0;  // X75 - X50
    ProbitFit fit;
    long n_pairs = 0;
};

// One (distance, successes, trials) observation for probit fitting.
struct BinomialPoint {
    double x = 0.0;
    double k = 0.0;
    double n = 0.0;
};

// Floor-corrected probit MLE: P(diff | d) = c + (1-c) * Phi(alpha + beta*d),
// maximized by damped Newton with analytic gradient and Hessian.
// Non-convergence is reported through the flags, never thrown.
ProbitFit fit_probit_floor(const std::vector<BinomialPoint>& points, double floor_c);

// Joint floor estimation: profile likelihood over c in [0, 0.45], damped
// Newton for (alpha, beta) at each grid value.
ProbitFit fit_probit_floor_free(const std::vector<BinomialPoint>& points);

// Fit the cells of one reference stimulus and derive X50 / X75 - X50.
// Throws data_error when fewer than 3 distinct comparison distances exist.
// With estimate_floor set, floor_c is the starting point only and the
// fitted floor is reported in the result.
JpdEstimate fit_jpd(const DifferenceTable& table, int reference_stim,
                    double floor_c = 0.1, bool estimate_floor = false);

// Exhaustive-search oracle over alpha in [-10, 10] step 0.01 and beta in
// (0, 1] step 0.001. Slow by design; used to cross-check fit_jpd.
ProbitFit grid_oracle_fit(const DifferenceTable& table, int reference_stim,
                          double floor_c = 0.1);

struct CategorizationFit {
    double boundary_stim = 0.0;
    double alpha = 0.0;
    double beta = 0.0;  // per stimulus number
    bool converged = false;
    bool separated = false;  // perfect separation; boundary bracketed
};

// Per-stimulus category counts: stimulus number -> (n_category1, n_total).
CategorizationFit fit_categorization(const std::vector<BinomialPoint>& label_counts);

// P(same-stimulus pair classified different) for production noise
// (sd_f1, sd_f2) under `rule`; the closed-form behind the 10% floor.
double same_stimulus_difference_probability(double sd_f1_hz, double sd_f2_hz,
                                            const DifferenceRule& rule);

}  // namespace jpd
