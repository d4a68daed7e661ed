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

#include "jpd/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "jpd/error.hpp"
#include "jpd/stats.hpp"

namespace jpd {

namespace {

double clamp_p(double p) {
    return std::clamp(p, 1e-300, 1.0 - 1e-12);
}

double binomial_loglik(const std::vector<BinomialPoint>& points, double alpha,
                       double beta, double floor_c) {
    double ll = 0.0;
    for (const auto& pt : points) {
        const double p =
            clamp_p(floor_c + (1.0 - floor_c) * normal_cdf(alpha + beta * pt.x));
        ll += pt.k * std::log(p) + (pt.n - pt.k) * std::log(1.0 - p);
    }
    return ll;
}

// Weighted least squares on probit-transformed proportions; a starting
// point, nothing more.
void initial_values(const std::vector<BinomialPoint>& points, double floor_c,
                    double* alpha, double* beta) {
    double sw = 0.0, sx = 0.0, sz = 0.0, sxx = 0.0, sxz = 0.0;
    for (const auto& pt : points) {
        if (pt.n <= 0.0) continue;
        const double phat = pt.k / pt.n;
        const double q = std::clamp((phat - floor_c) / (1.0 - floor_c), 1e-3, 1.0 - 1e-3);
        const double z = normal_quantile(q);
        const double w = pt.n;
        sw += w;
        sx += w * pt.x;
        sz += w * z;
        sxx += w * pt.x * pt.x;
        sxz += w * pt.x * z;
    }
    const double denom = sw * sxx - sx * sx;
    if (sw <= 0.0 || std::abs(denom) < 1e-12) {
        *alpha = 0.0;
        *beta = 0.01;
        return;
    }
    *beta = (sw * sxz - sx * sz) / denom;
    *alpha = (sz - *beta * sx) / sw;
    if (!std::isfinite(*beta) || *beta <= 0.0) *beta = 0.01;
    if (!std::isfinite(*alpha)) *alpha = 0.0;
}

}  // namespace

bool classify_pair(const MimicryResponse& reference, const MimicryResponse& comparison,
                   const DifferenceRule& rule) {
    if (reference.subject != comparison.subject)
        throw data_error("classify_pair: responses from different subjects");
    if (rule.f1_threshold_hz <= 0.0 || rule.f2_threshold_hz <= 0.0)
        throw domain_error("classify_pair: thresholds must be > 0");
    const double d1 = comparison.produced.f1_hz - reference.produced.f1_hz;
    const double d2 = comparison.produced.f2_hz - reference.produced.f2_hz;
    // Strictly "more than a threshold"; a tie counts as same.
    return std::abs(d1) > rule.f1_threshold_hz || std::abs(d2) > rule.f2_threshold_hz;
}

bool classify_pair(const MimicryResponse& reference, const MimicryResponse& comparison,
                   const DifferenceRule& rule, const FormantPoint& reference_target,
                   const FormantPoint& comparison_target) {
    if (!rule.directional)
        return classify_pair(reference, comparison, rule);
    if (reference.subject != comparison.subject)
        throw data_error("classify_pair: responses from different subjects");
    const double d1 = comparison.produced.f1_hz - reference.produced.f1_hz;
    const double d2 = comparison.produced.f2_hz - reference.produced.f2_hz;
    const double s1 = comparison_target.f1_hz - reference_target.f1_hz;
    const double s2 = comparison_target.f2_hz - reference_target.f2_hz;
    // A difference counts only when it lies on the correct side of the
    // reference; a zero stimulus difference has no correct side.
    const bool f1_diff = std::abs(d1) > rule.f1_threshold_hz && d1 * s1 > 0.0;
    const bool f2_diff = std::abs(d2) > rule.f2_threshold_hz && d2 * s2 > 0.0;
    return f1_diff || f2_diff;
}

std::vector<int> DifferenceTable::reference_ids() const {
    std::set<int> ids;
    for (const auto& [key, cell] : cells) ids.insert(key.first);
    return {ids.begin(), ids.end()};
}

DifferenceTable tabulate(const std::vector<MimicryResponse>& responses,
                         const Continuum& continuum, const DifferenceRule& rule) {
    if (responses.empty()) throw data_error("tabulate: empty response set");

    std::map<int, FormantPoint> targets;
    for (const auto& s : continuum.stimuli) targets[s.id] = s.target;

    // Group by subject; order within subject does not matter because every
    // ordered pair is visited exactly once.
    std::map<int, std::vector<const MimicryResponse*>> by_subject;
    for (const auto& r : responses) {
        if (!targets.count(r.stimulus_id))
            throw data_error("tabulate: response references unknown stimulus id");
        by_subject[r.subject].push_back(&r);
    }

    DifferenceTable table;
    for (const auto& [subject, rs] : by_subject) {
        (void)subject;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            for (std::size_t j = 0; j < rs.size(); ++j) {
                if (i == j) continue;
                const MimicryResponse& ref = *rs[i];
                const MimicryResponse& cmp = *rs[j];
                const bool different =
                    classify_pair(ref, cmp, rule, targets.at(ref.stimulus_id),
                                  targets.at(cmp.stimulus_id));
                DifferenceCell& cell = table.cells[{ref.stimulus_id, cmp.stimulus_id}];
                ++cell.n_pairs;
                if (different) ++cell.n_different;
            }
        }
    }
    for (auto& [key, cell] : table.cells)
        cell.distance_mels = mel_distance(targets.at(key.first), targets.at(key.second));
    return table;
}

ProbitFit fit_probit_floor(const std::vector<BinomialPoint>& points, double floor_c) {
    if (floor_c < 0.0 || floor_c >= 1.0)
        throw domain_error("fit_probit_floor: floor must lie in [0, 1)");
    if (points.empty()) throw data_error("fit_probit_floor: no data");

    double total_n = 0.0;
    for (const auto& pt : points) total_n += pt.n;

    ProbitFit fit;
    fit.floor_c = floor_c;
    double alpha, beta;
    initial_values(points, floor_c, &alpha, &beta);
    double ll = binomial_loglik(points, alpha, beta, floor_c);
    const double tol = 1e-10 * std::max(1.0, total_n);

    const int max_iter = 200;
    int iter = 0;
    bool converged = false;
    bool curvature_ok = false;
    double se_beta = std::numeric_limits<double>::infinity();
    for (; iter < max_iter; ++iter) {
        // Analytic gradient and Hessian of the binomial log-likelihood.
        double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
        for (const auto& pt : points) {
            const double eta = alpha + beta * pt.x;
            const double phi = normal_pdf(eta);
            const double p = clamp_p(floor_c + (1.0 - floor_c) * normal_cdf(eta));
            const double q = 1.0 - p;
            const double dp = (1.0 - floor_c) * phi;
            const double u = pt.k / p - (pt.n - pt.k) / q;
            const double du = -pt.k / (p * p) - (pt.n - pt.k) / (q * q);
            const double ddp = -(1.0 - floor_c) * eta * phi;
            const double w = du * dp * dp + u * ddp;
            ga += u * dp;
            gb += u * dp * pt.x;
            haa += w;
            hab += w * pt.x;
            hbb += w * pt.x * pt.x;
        }
        if (std::max(std::abs(ga), std::abs(gb)) < tol) {
            converged = true;
            // A proper interior maximum has strictly negative definite
            // curvature. Separated (step-function) data saturates the
            // likelihood instead: the gradient underflows to zero while the
            // curvature degenerates, and such fits must not report success.
            const double det = haa * hbb - hab * hab;
            curvature_ok = haa < 0.0 && det > 0.0;
            if (curvature_ok) se_beta = std::sqrt(-haa / det);
            break;
        }
        if (!std::isfinite(ga) || !std::isfinite(gb) || !std::isfinite(haa) ||
            !std::isfinite(hab) || !std::isfinite(hbb))
            break;

        const double det = haa * hbb - hab * hab;
        double da, db;
        if (std::abs(det) > 1e-300 && haa < 0.0 && det > 0.0) {
            // Newton direction from the (negative definite) Hessian.
            da = -(hbb * ga - hab * gb) / det;
            db = -(haa * gb - hab * ga) / det;
        } else {
            // Fall back to a scaled ascent step.
            const double gnorm = std::hypot(ga, gb);
            da = ga / gnorm * 0.1;
            db = gb / gnorm * 0.001;
        }

        double step = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving) {
            const double ll_new =
                binomial_loglik(points, alpha + step * da, beta + step * db, floor_c);
            if (std::isfinite(ll_new) && ll_new >= ll - 1e-13 * std::abs(ll)) {
                alpha += step * da;
                beta += step * db;
                ll = ll_new;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }

    fit.alpha = alpha;
    fit.beta = beta;
    fit.converged =
        converged && curvature_ok && std::isfinite(alpha) && std::isfinite(beta);
    // Degenerate slope: negative, numerically zero, or indistinguishable
    // from zero (flat tables carry no distance information).
    fit.non_monotone =
        !(beta > 1e-8) || (std::isfinite(se_beta) && beta < se_beta);
    fit.log_likelihood = ll;
    fit.n_iterations = iter;
    return fit;
}

namespace {

std::vector<BinomialPoint> reference_points(const DifferenceTable& table,
                                            int reference_stim) {
    std::vector<BinomialPoint> points;
    for (const auto& [key, cell] : table.cells) {
        if (key.first != reference_stim || cell.n_pairs <= 0) continue;
        points.push_back({cell.distance_mels, static_cast<double>(cell.n_different),
                          static_cast<double>(cell.n_pairs)});
    }
    std::set<long> distinct;
    for (const auto& pt : points)
        distinct.insert(std::lround(pt.x * 1e6));
    // The same-stimulus cell (d = 0) anchors the floor but does not count
    // toward the comparison distances.
    long comparison_distances = 0;
    for (long d : distinct)
        if (d != 0) ++comparison_distances;
    if (comparison_distances < 3)
        throw data_error("fit_jpd: need at least 3 distinct comparison distances");
    return points;
}

}  // namespace

ProbitFit fit_probit_floor_free(const std::vector<BinomialPoint>& points) {
    ProbitFit best;
    best.log_likelihood = -std::numeric_limits<double>::infinity();
    for (int ci = 0; ci <= 45; ++ci) {
        const ProbitFit fit = fit_probit_floor(points, ci * 0.01);
        if (fit.converged && fit.log_likelihood > best.log_likelihood) best = fit;
    }
    if (!std::isfinite(best.log_likelihood)) best = fit_probit_floor(points, 0.1);
    return best;
}

JpdEstimate fit_jpd(const DifferenceTable& table, int reference_stim, double floor_c,
                    bool estimate_floor) {
    if (floor_c >= 0.5)
        throw domain_error("fit_jpd: floor must be < 0.5 for X50 to exist");
    const std::vector<BinomialPoint> points = reference_points(table, reference_stim);

    JpdEstimate est;
    est.reference_stim = reference_stim;
    est.fit = estimate_floor ? fit_probit_floor_free(points)
                             : fit_probit_floor(points, floor_c);
    for (const auto& pt : points) est.n_pairs += static_cast<long>(pt.n);

    if (est.fit.converged && !est.fit.non_monotone) {
        const double c = est.fit.floor_c;
        const double z50 = normal_quantile((0.5 - c) / (1.0 - c));
        const double z75 = normal_quantile((0.75 - c) / (1.0 - c));
        est.x50_mels = (z50 - est.fit.alpha) / est.fit.beta;
        est.inverse_steepness_mels = (z75 - z50) / est.fit.beta;
        if (est.x50_mels <= 0.0) {
            // The fitted baseline already exceeds 50%; there is no positive
            // limen to report.
            est.x50_mels = std::numeric_limits<double>::quiet_NaN();
            est.inverse_steepness_mels = std::numeric_limits<double>::quiet_NaN();
        }
    } else {
        est.x50_mels = std::numeric_limits<double>::quiet_NaN();
        est.inverse_steepness_mels = std::numeric_limits<double>::quiet_NaN();
    }
    return est;
}

ProbitFit grid_oracle_fit(const DifferenceTable& table, int reference_stim,
                          double floor_c) {
    const std::vector<BinomialPoint> points = reference_points(table, reference_stim);

    // Dense Phi lookup keeps the exhaustive scan affordable; the winner is
    // re-scored with the exact likelihood below.
    constexpr double kEtaMax = 8.5;
    constexpr double kEtaStep = 1e-4;
    constexpr int kTableSize = static_cast<int>(2.0 * kEtaMax / kEtaStep) + 2;
    static const std::vector<double>& phi_table = [] {
        static std::vector<double> t(kTableSize);
        for (int i = 0; i < kTableSize; ++i)
            t[i] = normal_cdf(-kEtaMax + i * kEtaStep);
        return t;
    }();
    auto cdf_fast = [&](double eta) {
        if (eta <= -kEtaMax) return 0.0;
        if (eta >= kEtaMax) return 1.0;
        const double pos = (eta + kEtaMax) / kEtaStep;
        const int i = static_cast<int>(pos);
        const double frac = pos - i;
        return phi_table[i] * (1.0 - frac) + phi_table[i + 1] * frac;
    };

    double best_ll = -std::numeric_limits<double>::infinity();
    double best_alpha = 0.0, best_beta = 0.001;
    for (int bi = 1; bi <= 1000; ++bi) {
        const double beta = bi * 0.001;
        for (int ai = -1000; ai <= 1000; ++ai) {
            const double alpha = ai * 0.01;
            double ll = 0.0;
            for (const auto& pt : points) {
                const double p =
                    clamp_p(floor_c + (1.0 - floor_c) * cdf_fast(alpha + beta * pt.x));
                ll += pt.k * std::log(p) + (pt.n - pt.k) * std::log(1.0 - p);
            }
            if (ll > best_ll) {
                best_ll = ll;
                best_alpha = alpha;
                best_beta = beta;
            }
        }
    }

    ProbitFit fit;
    fit.alpha = best_alpha;
    fit.beta = best_beta;
    fit.floor_c = floor_c;
    fit.converged = true;
    fit.non_monotone = false;
    fit.log_likelihood = binomial_loglik(points, best_alpha, best_beta, floor_c);
    fit.n_iterations = 0;
    return fit;
}

CategorizationFit fit_categorization(const std::vector<BinomialPoint>& label_counts) {
    std::vector<BinomialPoint> points;
    for (const auto& pt : label_counts)
        if (pt.n > 0.0) points.push_back(pt);
    if (points.size() < 2)
        throw data_error("fit_categorization: need at least 2 stimulus points");
    std::sort(points.begin(), points.end(),
              [](const BinomialPoint& a, const BinomialPoint& b) { return a.x < b.x; });

    CategorizationFit fit;

    // Perfect separation: no mixed cell, and the all-low cells sit left of
    // the all-high cells. The boundary is then only bracketed.
    bool mixed = false;
    double last_low = -std::numeric_limits<double>::infinity();
    double first_high = std::numeric_limits<double>::infinity();
    for (const auto& pt : points) {
        if (pt.k > 0.0 && pt.k < pt.n) mixed = true;
        if (pt.k == 0.0) last_low = std::max(last_low, pt.x);
        if (pt.k == pt.n) first_high = std::min(first_high, pt.x);
    }
    if (!mixed && last_low < first_high) {
        fit.separated = true;
        if (std::isinf(last_low))  // all high
            fit.boundary_stim = points.front().x - 0.5;
        else if (std::isinf(first_high))  // all low
            fit.boundary_stim = points.back().x + 0.5;
        else
            fit.boundary_stim = 0.5 * (last_low + first_high);
        return fit;
    }

    const ProbitFit probit = fit_probit_floor(points, 0.0);
    fit.alpha = probit.alpha;
    fit.beta = probit.beta;
    fit.converged = probit.converged;
    if (probit.converged && probit.beta > 0.0)
        fit.boundary_stim = -probit.alpha / probit.beta;
    else
        fit.boundary_stim = std::numeric_limits<double>::quiet_NaN();
    return fit;
}

double same_stimulus_difference_probability(double sd_f1_hz, double sd_f2_hz,
                                            const DifferenceRule& rule) {
    if (sd_f1_hz <= 0.0 || sd_f2_hz <= 0.0)
        throw domain_error("same_stimulus_difference_probability: sds must be > 0");
    const double s1 = sd_f1_hz * std::sqrt(2.0);
    const double s2 = sd_f2_hz * std::sqrt(2.0);
    const double p1 = 2.0 * normal_cdf(rule.f1_threshold_hz / s1) - 1.0;
    const double p2 = 2.0 * normal_cdf(rule.f2_threshold_hz / s2) - 1.0;
    return 1.0 - p1 * p2;
}

}  // namespace jpd
