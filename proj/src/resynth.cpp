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

#include "jpd/resynth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "jpd/error.hpp"
#include "jpd/lpc.hpp"

namespace jpd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kF1Tolerance = 20.0;
constexpr double kF2Tolerance = 50.0;

std::vector<double> gaussian_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * i / (n - 1.0) - 1.0;
        w[i] = std::exp(-12.0 * x * x);
    }
    return w;
}

// Clarity of the first three formant peaks in the LPC spectrum: mean peak
// height above the valleys on either side, in dB.
double formant_prominence(const Waveform& wf, const AnalysisSettings& analysis) {
    const MeasurementPoint mp = measure_token(wf, analysis);
    const double sr = wf.sample_rate;
    const int win = static_cast<int>(std::lround(2.0 * analysis.window_s * sr));
    const int order = analysis.lpc_order > 0
                          ? analysis.lpc_order
                          : static_cast<int>(std::lround(sr / 1000.0)) + 2;
    int start = static_cast<int>(std::lround(mp.time_s * sr)) - win / 2;
    start = std::clamp(start, 0, std::max(0, static_cast<int>(wf.samples.size()) - win));
    if (static_cast<int>(wf.samples.size()) < win)
        throw audio_error("formant_prominence: token shorter than one window");

    const std::vector<double> window = gaussian_window(win);
    std::vector<double> frame(win);
    for (int i = 0; i < win; ++i) frame[i] = wf.samples[start + i] * window[i];
    const std::vector<double> a = burg_lpc(frame, order);

    std::vector<FormantBW> formants;
    for (const FormantBW& f : poles_to_formants(lpc_poles(a), sr)) {
        if (f.bandwidth_hz >= analysis.max_bandwidth_hz) continue;
        if (f.frequency_hz <= analysis.min_formant_hz) continue;
        if (f.frequency_hz >= sr / 2.0 - analysis.nyquist_guard_hz) continue;
        formants.push_back(f);
    }
    if (formants.size() < 3)
        throw audio_error("formant_prominence: fewer than three formants");

    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double peak = lpc_spectrum_db(a, formants[k].frequency_hz, sr);
        const double left_freq =
            k == 0 ? formants[0].frequency_hz / 2.0
                   : 0.5 * (formants[k - 1].frequency_hz + formants[k].frequency_hz);
        const double right_freq =
            k + 1 < static_cast<int>(formants.size())
                ? 0.5 * (formants[k].frequency_hz + formants[k + 1].frequency_hz)
                : std::min(formants[k].frequency_hz + 500.0, sr / 2.0 - 50.0);
        const double valley = 0.5 * (lpc_spectrum_db(a, left_freq, sr) +
                                     lpc_spectrum_db(a, right_freq, sr));
        total += peak - valley;
    }
    return total / 3.0;
}

struct FramePoles {
    std::vector<std::complex<double>> poles;
    std::vector<double> a;  // original coefficients
};

}  // namespace

void check_plan(const ResynthesisPlan& plan) {
    if (plan.lpc_order < 8 || plan.lpc_order % 2 != 0)
        throw domain_error("ResynthesisPlan: lpc_order must be even and >= 8");
    if (!(plan.window_s > plan.time_step_s && plan.time_step_s > 0.0))
        throw domain_error("ResynthesisPlan: need window > time_step > 0");
    if (plan.index_min > 1 || plan.index_max < 1)
        throw domain_error("ResynthesisPlan: index range must contain 1");
    if (plan.base_token.samples.empty())
        throw domain_error("ResynthesisPlan: empty base token");
    if (plan.target_rate <= 0.0)
        throw domain_error("ResynthesisPlan: invalid target rate");
}

ResynthesisPlan plan_resynthesis(const std::vector<Waveform>& hid_tokens,
                                 const std::vector<Waveform>& head_tokens,
                                 int steps_between, int index_min, int index_max,
                                 const AnalysisSettings& analysis) {
    if (hid_tokens.empty() || head_tokens.empty())
        throw data_error("plan_resynthesis: need at least one token per word");
    if (steps_between < 1)
        throw domain_error("plan_resynthesis: steps_between must be >= 1");

    auto mean_point = [&](const std::vector<Waveform>& tokens) {
        double f1 = 0.0, f2 = 0.0;
        for (const Waveform& wf : tokens) {
            const MeasurementPoint mp = measure_token(wf, analysis);
            f1 += mp.point.f1_hz;
            f2 += mp.point.f2_hz;
        }
        return FormantPoint{f1 / tokens.size(), f2 / tokens.size()};
    };
    const FormantPoint hid_mean = mean_point(hid_tokens);
    const FormantPoint head_mean = mean_point(head_tokens);

    ResynthesisPlan plan;
    plan.index_min = index_min;
    plan.index_max = index_max;
    plan.f1_step_hz = (head_mean.f1_hz - hid_mean.f1_hz) / steps_between;
    plan.f2_step_hz = (head_mean.f2_hz - hid_mean.f2_hz) / steps_between;
    if (plan.f1_step_hz == 0.0 && plan.f2_step_hz == 0.0)
        throw data_error("plan_resynthesis: zero inter-word distance");

    // Robustness rule in the stated order: reject clipped tokens, then take
    // the largest duration x F1-F3 prominence.
    const Waveform* best = nullptr;
    double best_score = -1e300;
    for (const Waveform& wf : hid_tokens) {
        if (has_clipping(wf) || has_non_finite(wf)) continue;
        const double score = wf.duration() * formant_prominence(wf, analysis);
        if (score > best_score) {
            best_score = score;
            best = &wf;
        }
    }
    if (!best)
        throw audio_error("plan_resynthesis: no unclipped, analyzable base token");
    plan.base_token = *best;

    plan.base_measured = measure_token(*best, analysis).point;
    plan.base_mean_f0_hz = track_f0(*best, analysis).mean_voiced();
    check_plan(plan);
    return plan;
}

Continuum resynthesize_series(const ResynthesisPlan& plan) {
    check_plan(plan);
    const Waveform base = resample(plan.base_token, plan.target_rate);
    const double sr = base.sample_rate;
    const double nyquist = sr / 2.0;
    const int n = static_cast<int>(base.samples.size());
    // Gaussian windows span twice their nominal length, matching the
    // formant tracker.
    const int win = static_cast<int>(std::lround(2.0 * plan.window_s * sr));
    const int hop = static_cast<int>(std::lround(plan.time_step_s * sr));
    const int order = plan.lpc_order;
    if (n < win) throw audio_error("resynthesize_series: base shorter than one window");

    // Per-frame Burg analysis on the resampled base.
    const std::vector<double> window = gaussian_window(win);
    std::vector<FramePoles> frames;
    std::vector<double> frame_center;
    std::vector<double> buf(win);
    for (int start = 0; start + win <= n; start += hop) {
        for (int i = 0; i < win; ++i) buf[i] = base.samples[start + i] * window[i];
        FramePoles fp;
        fp.a = burg_lpc(buf, order);
        fp.poles = lpc_poles(fp.a);
        frames.push_back(std::move(fp));
        frame_center.push_back(start + win / 2.0);
    }
    if (frames.empty()) throw audio_error("resynthesize_series: no analysis frames");

    // Frame index per sample (nearest analysis frame).
    std::vector<int> frame_of(n);
    {
        int f = 0;
        for (int i = 0; i < n; ++i) {
            while (f + 1 < static_cast<int>(frames.size()) &&
                   std::abs(frame_center[f + 1] - i) < std::abs(frame_center[f] - i))
                ++f;
            frame_of[i] = f;
        }
    }

    // Inverse filter: the residual source under the per-frame models.
    std::vector<double> residual(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& a = frames[frame_of[i]].a;
        double e = base.samples[i];
        for (int j = 1; j <= order && j <= i; ++j) e += a[j] * base.samples[i - j];
        residual[i] = e;
    }

    AnalysisSettings verify_settings;
    verify_settings.lpc_order = order;
    verify_settings.window_s = plan.window_s;
    verify_settings.step_s = plan.time_step_s;
    const MeasurementPoint base_mp = measure_token(base, verify_settings);

    // The formant contour (pre-emphasized tracker) anchors which pole pair
    // of the raw per-frame model is F1 and which is F2; the raw model also
    // carries source-tilt poles that must not be mistaken for formants.
    const FormantTrack anchor_track = track_formants(base, verify_settings);
    auto anchors_for = [&](std::size_t frame_index) -> const FormantFrame* {
        const double t = frame_center[frame_index] / sr;
        const FormantFrame* best = nullptr;
        double best_dt = 1e30;
        for (const auto& ff : anchor_track.frames) {
            if (ff.formants.size() < 2) continue;
            const double dt = std::abs(ff.time_s - t);
            if (dt < best_dt) {
                best_dt = dt;
                best = &ff;
            }
        }
        return best_dt <= plan.time_step_s ? best : nullptr;
    };

    Continuum series;
    series.mode = ContinuumMode::kResynthesis;
    series.sample_rate = sr;

    for (int k = plan.index_min; k <= plan.index_max; ++k) {
        const double shift1 = (k - 1) * plan.f1_step_hz;
        const double shift2 = (k - 1) * plan.f2_step_hz;
        std::vector<std::string> flags;

        // Rotate the F1/F2 pole pairs of every frame.
        std::vector<std::vector<double>> modified(frames.size());
        int unmodified_frames = 0;
        for (std::size_t f = 0; f < frames.size(); ++f) {
            if (k == 1) {
                modified[f] = frames[f].a;
                continue;
            }
            // Match raw pole pairs to the tracked F1/F2 for this frame.
            struct Candidate {
                double freq;
                std::complex<double> pole;
            };
            std::vector<Candidate> pool;
            for (const auto& z : frames[f].poles) {
                if (z.imag() <= 0.0) continue;
                const double r = std::abs(z);
                if (r <= 0.0 || r >= 1.0) continue;
                const double freq = std::atan2(z.imag(), z.real()) * sr / (2.0 * kPi);
                if (freq <= 90.0 || freq >= nyquist - 50.0) continue;
                pool.push_back({freq, z});
            }
            const FormantFrame* anchors = anchors_for(f);
            std::vector<Candidate> candidates;
            if (anchors) {
                for (int which = 0; which < 2; ++which) {
                    const double want = anchors->formants[which].frequency_hz;
                    const Candidate* best = nullptr;
                    double best_df = 300.0;  // no plausible match beyond this
                    for (const auto& c : pool) {
                        if (which == 1 && !candidates.empty() &&
                            std::abs(c.freq - candidates[0].freq) < 1e-9)
                            continue;
                        const double df = std::abs(c.freq - want);
                        if (df < best_df) {
                            best_df = df;
                            best = &c;
                        }
                    }
                    if (best) candidates.push_back(*best);
                }
            }
            if (candidates.size() < 2 || candidates[0].freq >= candidates[1].freq) {
                modified[f] = frames[f].a;
                ++unmodified_frames;
                continue;
            }
            const double new_f1 = candidates[0].freq + shift1;
            const double new_f2 = candidates[1].freq + shift2;
            if (new_f1 >= new_f2)
                throw domain_error(
                    "resynthesize_series: shifted F1 reaches shifted F2");
            if (new_f1 <= 50.0 || new_f2 >= nyquist - 50.0)
                throw domain_error(
                    "resynthesize_series: shifted formant out of analyzable range");

            std::vector<std::complex<double>> poles;
            for (const auto& z : frames[f].poles) {
                bool shifted = false;
                for (int c = 0; c < 2; ++c) {
                    const auto& target = candidates[c].pole;
                    if (std::abs(z - target) < 1e-12 || std::abs(z - std::conj(target)) < 1e-12) {
                        const double r = std::abs(z);
                        const double freq = candidates[c].freq + (c == 0 ? shift1 : shift2);
                        const double theta = 2.0 * kPi * freq / sr;
                        poles.push_back(z.imag() > 0.0
                                            ? std::polar(r, theta)
                                            : std::polar(r, -theta));
                        shifted = true;
                        break;
                    }
                }
                if (!shifted) poles.push_back(z);
            }
            modified[f] = poles_to_lpc(poles);
        }
        if (unmodified_frames > 0)
            flags.push_back("unmodified_frames:" + std::to_string(unmodified_frames));

        // Refilter the residual through the modified models.
        Waveform out;
        out.sample_rate = sr;
        out.samples.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const std::vector<double>& a = modified[frame_of[i]];
            double y = residual[i];
            for (int j = 1; j <= order && j <= i; ++j) y -= a[j] * out.samples[i - j];
            out.samples[i] = y;
        }
        if (has_non_finite(out))
            throw audio_error("resynthesize_series: unstable modified filter");
        if (has_clipping(out)) {
            peak_normalize(out, -0.5);
            flags.push_back("renormalized");
        }

        StimulusSpec spec;
        spec.id = k;
        spec.target = {base_mp.point.f1_hz + shift1, base_mp.point.f2_hz + shift2};
        spec.duration_s = out.duration();
        spec.f0.mean_f0_hz = plan.base_mean_f0_hz > 0.0 ? plan.base_mean_f0_hz : 117.0;

        series.stimuli.push_back(spec);
        series.audio.push_back(std::move(out));
        series.flags.push_back(std::move(flags));
    }

    verify_series_roundtrip(series, verify_settings);
    return series;
}

bool verify_series_roundtrip(Continuum& series, const AnalysisSettings& settings) {
    if (series.flags.size() != series.stimuli.size())
        series.flags.assign(series.stimuli.size(), {});

    bool clean = true;
    std::vector<double> f1s, f2s;
    for (std::size_t i = 0; i < series.stimuli.size(); ++i) {
        try {
            const MeasurementPoint mp = measure_token(series.audio[i], settings);
            f1s.push_back(mp.point.f1_hz);
            f2s.push_back(mp.point.f2_hz);
        } catch (const audio_error&) {
            f1s.push_back(std::numeric_limits<double>::quiet_NaN());
            f2s.push_back(std::numeric_limits<double>::quiet_NaN());
            series.flags[i].push_back("unmeasurable");
            clean = false;
        }
    }

    // Achieved-versus-intended shifts, measured relative to the unmodified
    // token (id 1) so per-token extraction bias largely cancels. The slack
    // grows with the intended shift: harmonic attraction moves single-token
    // measurements by up to ~25 Hz at an 11 kHz rate, while the failure
    // this audit exists to catch (a formant that never moved) misses by the
    // whole intended shift.
    std::ptrdiff_t base_index = -1;
    for (std::size_t i = 0; i < series.stimuli.size(); ++i)
        if (series.stimuli[i].id == 1) base_index = static_cast<std::ptrdiff_t>(i);
    for (std::size_t i = 0; i < series.stimuli.size(); ++i) {
        if (std::isnan(f1s[i])) continue;
        double achieved1, achieved2, intended1, intended2;
        if (base_index >= 0 && !std::isnan(f1s[base_index])) {
            achieved1 = f1s[i] - f1s[base_index];
            achieved2 = f2s[i] - f2s[base_index];
            intended1 =
                series.stimuli[i].target.f1_hz - series.stimuli[base_index].target.f1_hz;
            intended2 =
                series.stimuli[i].target.f2_hz - series.stimuli[base_index].target.f2_hz;
        } else {
            achieved1 = f1s[i];
            achieved2 = f2s[i];
            intended1 = series.stimuli[i].target.f1_hz;
            intended2 = series.stimuli[i].target.f2_hz;
        }
        if (std::abs(achieved1 - intended1) >
            kF1Tolerance + 0.25 * std::abs(intended1)) {
            series.flags[i].push_back("f1_shift_unverified");
            clean = false;
        }
        if (std::abs(achieved2 - intended2) >
            kF2Tolerance + 0.25 * std::abs(intended2)) {
            series.flags[i].push_back("f2_shift_unverified");
            clean = false;
        }
    }

    // Series-order audit: the re-extracted tracks must follow the intended
    // direction, within measurement tolerance.
    if (series.stimuli.size() >= 2) {
        const double span1 =
            series.stimuli.back().target.f1_hz - series.stimuli.front().target.f1_hz;
        const double span2 =
            series.stimuli.back().target.f2_hz - series.stimuli.front().target.f2_hz;
        const double dir1 = span1 >= 0.0 ? 1.0 : -1.0;
        const double dir2 = span2 >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 1; i < f1s.size(); ++i) {
            if (std::isnan(f1s[i]) || std::isnan(f1s[i - 1])) continue;
            if (span1 != 0.0 && dir1 * (f1s[i] - f1s[i - 1]) < -kF1Tolerance) {
                series.flags[i].push_back("f1_non_monotone");
                clean = false;
            }
            if (span2 != 0.0 && dir2 * (f2s[i] - f2s[i - 1]) < -kF2Tolerance) {
                series.flags[i].push_back("f2_non_monotone");
                clean = false;
            }
        }
    }
    return clean;
}

}  // namespace jpd
