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

#include "jpd/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "jpd/error.hpp"

namespace jpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

int auto_lpc_order(double sample_rate) {
    int order = static_cast<int>(std::lround(sample_rate / 1000.0)) + 2;
    if (order % 2 != 0) ++order;
    // Two pole pairs per kilohertz quickly over-models clean vowel tokens;
    // twelve poles cover four formants plus residual source structure.
    return std::min(order, 12);
}

// Gaussian analysis window, ~exp(-12) at the edges.
std::vector<double> gaussian_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * i / (n - 1.0) - 1.0;
        w[i] = std::exp(-12.0 * x * x);
    }
    return w;
}

bool is_silent(const Waveform& wf) {
    double peak = 0.0;
    for (double s : wf.samples) peak = std::max(peak, std::abs(s));
    return peak < 1e-6;
}

}  // namespace

double F0Track::mean_voiced() const {
    double sum = 0.0;
    int n = 0;
    for (const auto& f : frames)
        if (f.f0_hz > 0.0) {
            sum += f.f0_hz;
            ++n;
        }
    return n > 0 ? sum / n : 0.0;
}

FormantTrack track_formants(const Waveform& wf, const AnalysisSettings& settings) {
    if (wf.samples.empty()) throw audio_error("track_formants: empty audio");
    if (is_silent(wf)) throw audio_error("track_formants: silent audio, empty track");
    if (settings.window_s <= settings.step_s)
        throw domain_error("track_formants: window must exceed step");
    if (settings.resample_to_hz > 0.0 &&
        std::abs(settings.resample_to_hz - wf.sample_rate) > 1e-6) {
        AnalysisSettings native = settings;
        native.resample_to_hz = 0.0;
        return track_formants(resample(wf, settings.resample_to_hz), native);
    }

    const double sr = wf.sample_rate;
    // Gaussian analysis windows span twice their nominal length (the Praat
    // convention): the tails taper to ~0 so the effective width matches.
    const int win = static_cast<int>(std::lround(2.0 * settings.window_s * sr));
    const int hop = static_cast<int>(std::lround(settings.step_s * sr));
    const int order = settings.lpc_order > 0 ? settings.lpc_order : auto_lpc_order(sr);
    const int n = static_cast<int>(wf.samples.size());
    if (n < win) throw audio_error("track_formants: token shorter than one window");

    // Two cascaded pre-emphasis zeros flatten the -12 dB/oct glottal tilt;
    // one alone leaves a residual slope that Burg models as a spurious
    // sub-F1 pole pair.
    std::vector<double> pre(wf.samples.begin(), wf.samples.end());
    const double mu = std::exp(-2.0 * kPi * settings.preemphasis_hz / sr);
    for (int pass = 0; pass < 2; ++pass)
        for (int i = n - 1; i >= 1; --i) pre[i] -= mu * pre[i - 1];

    const std::vector<double> window = gaussian_window(win);
    const double nyquist = sr / 2.0;

    FormantTrack track;
    std::vector<double> frame(win);
    int usable_frames = 0;
    for (int start = 0; start + win <= n; start += hop) {
        for (int i = 0; i < win; ++i) frame[i] = pre[start + i] * window[i];
        FormantFrame ff;
        ff.time_s = (start + win / 2.0) / sr;
        const std::vector<double> a = burg_lpc(frame, order);
        for (const FormantBW& f : poles_to_formants(lpc_poles(a), sr)) {
            if (f.bandwidth_hz >= settings.max_bandwidth_hz) continue;
            if (f.frequency_hz <= settings.min_formant_hz) continue;
            if (f.frequency_hz >= nyquist - settings.nyquist_guard_hz) continue;
            ff.formants.push_back(f);
        }
        if (ff.formants.size() >= 2) ++usable_frames;
        track.frames.push_back(std::move(ff));
    }
    if (track.frames.empty()) throw audio_error("track_formants: no analysis frames");

    track.voicing_onset_s = find_voicing_onset(wf);

    // Reliability: most frames need two stable formants and voiced pitch.
    const F0Track f0 = track_f0(wf, settings);
    int voiced = 0;
    for (const auto& f : f0.frames)
        if (f.f0_hz > 0.0) ++voiced;
    const double voiced_frac =
        f0.frames.empty() ? 0.0 : static_cast<double>(voiced) / f0.frames.size();
    const double usable_frac = static_cast<double>(usable_frames) / track.frames.size();
    track.reliable = voiced_frac >= 0.5 && usable_frac >= 0.5;
    return track;
}

double find_voicing_onset(const Waveform& wf) {
    if (wf.samples.empty()) throw audio_error("find_voicing_onset: empty audio");
    const double sr = wf.sample_rate;

    // 80-1000 Hz band: one-pole highpass at 80 Hz into a two-pole lowpass
    // at 1000 Hz.
    const double a_hp = std::exp(-2.0 * kPi * 80.0 / sr);
    const double a_lp = std::exp(-2.0 * kPi * 1000.0 / sr);
    std::vector<double> band(wf.samples.size());
    double hp_y = 0.0, hp_x = 0.0, lp1 = 0.0, lp2 = 0.0;
    for (std::size_t i = 0; i < wf.samples.size(); ++i) {
        const double x = wf.samples[i];
        hp_y = a_hp * (hp_y + x - hp_x);
        hp_x = x;
        lp1 = (1.0 - a_lp) * hp_y + a_lp * lp1;
        lp2 = (1.0 - a_lp) * lp1 + a_lp * lp2;
        band[i] = lp2;
    }

    const int win = std::max(1, static_cast<int>(std::lround(0.010 * sr)));
    const int hop = std::max(1, static_cast<int>(std::lround(0.005 * sr)));
    std::vector<double> energy;
    std::vector<double> frame_start;
    for (int start = 0; start + win <= static_cast<int>(band.size()); start += hop) {
        double e = 0.0;
        for (int i = start; i < start + win; ++i) e += band[i] * band[i];
        energy.push_back(e);
        frame_start.push_back(start / sr);
    }
    if (energy.empty()) throw audio_error("find_voicing_onset: token too short");

    const double peak = *std::max_element(energy.begin(), energy.end());
    if (peak <= 0.0) throw audio_error("find_voicing_onset: unvoiced token");
    const double threshold = 0.10 * peak;

    int run = 0;
    for (std::size_t i = 0; i < energy.size(); ++i) {
        run = energy[i] > threshold ? run + 1 : 0;
        if (run >= 3) return frame_start[i - 2];
    }
    throw audio_error("find_voicing_onset: unvoiced token");
}

F0Track track_f0(const Waveform& wf, const AnalysisSettings& settings) {
    if (wf.samples.empty()) throw audio_error("track_f0: empty audio");
    if (settings.resample_to_hz > 0.0 &&
        std::abs(settings.resample_to_hz - wf.sample_rate) > 1e-6) {
        AnalysisSettings native = settings;
        native.resample_to_hz = 0.0;
        return track_f0(resample(wf, settings.resample_to_hz), native);
    }
    const double sr = wf.sample_rate;
    const int win = static_cast<int>(std::lround(settings.f0_window_s * sr));
    const int hop = static_cast<int>(std::lround(settings.step_s * sr));
    const int lag_min = std::max(2, static_cast<int>(std::floor(sr / settings.f0_max_hz)));
    const int lag_max = static_cast<int>(std::ceil(sr / settings.f0_min_hz));
    const int n = static_cast<int>(wf.samples.size());

    F0Track track;
    if (n < win || lag_max >= win) return track;

    const auto& x = wf.samples;
    for (int start = 0; start + win <= n; start += hop) {
        F0Frame frame;
        frame.time_s = (start + win / 2.0) / sr;

        double best_r = 0.0;
        int best_lag = 0;
        const int m = win - lag_max;
        double e0 = 0.0;
        for (int i = start; i < start + m; ++i) e0 += x[i] * x[i];
        for (int lag = lag_min; lag <= lag_max; ++lag) {
            double num = 0.0, e1 = 0.0;
            for (int i = start; i < start + m; ++i) {
                num += x[i] * x[i + lag];
                e1 += x[i + lag] * x[i + lag];
            }
            const double den = std::sqrt(e0 * e1);
            const double r = den > 0.0 ? num / den : 0.0;
            if (r > best_r) {
                best_r = r;
                best_lag = lag;
            }
        }
        frame.strength = best_r;
        if (best_lag > 0 && best_r >= settings.voicing_threshold) {
            double lag = best_lag;
            // Parabolic refinement around the peak when neighbors exist.
            if (best_lag > lag_min && best_lag < lag_max) {
                auto corr = [&](int l) {
                    double num = 0.0, e1 = 0.0;
                    for (int i = start; i < start + m; ++i) {
                        num += x[i] * x[i + l];
                        e1 += x[i + l] * x[i + l];
                    }
                    const double den = std::sqrt(e0 * e1);
                    return den > 0.0 ? num / den : 0.0;
                };
                const double rm = corr(best_lag - 1), rp = corr(best_lag + 1);
                const double denom = rm - 2.0 * best_r + rp;
                if (std::abs(denom) > 1e-12) lag += 0.5 * (rm - rp) / denom;
            }
            frame.f0_hz = sr / lag;
        }
        track.frames.push_back(frame);
    }
    return track;
}

MeasurementPoint measure_at_tenth_period(const FormantTrack& track, const F0Track& f0,
                                         double token_duration_s) {
    if (track.frames.empty()) throw audio_error("measure_at_tenth_period: empty track");
    if (f0.frames.empty())
        throw audio_error("measure_at_tenth_period: no f0 frames, unvoiced token");

    auto f0_at = [&](double t) -> double {
        // Nearest voiced frame within one window; otherwise nearest voiced
        // frame overall.
        double best_dt = 1e30, best_f0 = 0.0;
        for (const auto& fr : f0.frames) {
            if (fr.f0_hz <= 0.0) continue;
            const double dt = std::abs(fr.time_s - t);
            if (dt < best_dt) {
                best_dt = dt;
                best_f0 = fr.f0_hz;
            }
        }
        return best_f0;
    };

    double t = track.voicing_onset_s;
    for (int period = 0; period < 10; ++period) {
        const double f = f0_at(t);
        if (f <= 0.0)
            throw audio_error("measure_at_tenth_period: unvoiced token");
        t += 1.0 / f;
        if (t > token_duration_s)
            throw audio_error(
                "measure_at_tenth_period: short token, fewer than 10 voiced periods");
    }

    // Formants at the nearest frame with at least two formants.
    const FormantFrame* best = nullptr;
    double best_dt = 1e30;
    for (const auto& fr : track.frames) {
        if (fr.formants.size() < 2) continue;
        const double dt = std::abs(fr.time_s - t);
        if (dt < best_dt) {
            best_dt = dt;
            best = &fr;
        }
    }
    if (!best)
        throw audio_error("measure_at_tenth_period: no frame with two formants");

    MeasurementPoint mp;
    mp.time_s = t;
    mp.point.f1_hz = best->formants[0].frequency_hz;
    mp.point.f2_hz = best->formants[1].frequency_hz;
    check_formant_point(mp.point, "measure_at_tenth_period");
    return mp;
}

MeasurementPoint measure_token(const Waveform& wf, const AnalysisSettings& settings) {
    const FormantTrack track = track_formants(wf, settings);
    const F0Track f0 = track_f0(wf, settings);
    return measure_at_tenth_period(track, f0, wf.duration());
}

}  // namespace jpd
