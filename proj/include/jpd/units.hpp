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

#include <cmath>

#include "jpd/error.hpp"

namespace jpd {

// Mel scale: m = 2595 * log10(1 + f/700). This is the common engineering
// convention; the choice is echoed into every run manifest so results are
// reproducible against a stated formula.
inline constexpr double kMelScaleFactor = 2595.0;
inline constexpr double kMelBreakHz = 700.0;

inline double hz_to_mel(double f_hz) {
    if (!std::isfinite(f_hz) || f_hz < 0.0)
        throw domain_error("hz_to_mel: frequency must be finite and >= 0");
    return kMelScaleFactor * std::log10(1.0 + f_hz / kMelBreakHz);
}

inline double mel_to_hz(double mels) {
    if (!std::isfinite(mels) || mels < 0.0)
        throw domain_error("mel_to_hz: mel value must be finite and >= 0");
    return kMelBreakHz * (std::pow(10.0, mels / kMelScaleFactor) - 1.0);
}

// An (F1, F2) pair in Hz. Invariant: 0 < f1 < f2.
struct FormantPoint {
    double f1_hz = 0.0;
    double f2_hz = 0.0;
};

inline bool formant_point_valid(const FormantPoint& p) {
    return std::isfinite(p.f1_hz) && std::isfinite(p.f2_hz) && p.f1_hz > 0.0 &&
           p.f1_hz < p.f2_hz;
}

inline void check_formant_point(const FormantPoint& p, const char* where) {
    if (!formant_point_valid(p))
        throw domain_error(std::string(where) +
                           ": formant point requires 0 < F1 < F2 and finite values");
}

// The same point in (mel F1, mel F2) coordinates.
struct MelPoint {
    double f1_mel = 0.0;
    double f2_mel = 0.0;
};

inline MelPoint to_mel(const FormantPoint& p) {
    return {hz_to_mel(p.f1_hz), hz_to_mel(p.f2_hz)};
}

inline FormantPoint to_hz(const MelPoint& m) {
    return {mel_to_hz(m.f1_mel), mel_to_hz(m.f2_mel)};
}

// Euclidean distance in (mel F1, mel F2) space. The stimulus series of
// interest lie on a line in that plane, where arc length and the Euclidean
// metric coincide; Euclidean generalizes off the line.
inline double mel_distance(const FormantPoint& a, const FormantPoint& b) {
    check_formant_point(a, "mel_distance");
    check_formant_point(b, "mel_distance");
    const MelPoint ma = to_mel(a), mb = to_mel(b);
    return std::hypot(ma.f1_mel - mb.f1_mel, ma.f2_mel - mb.f2_mel);
}

inline double mel_distance(const MelPoint& a, const MelPoint& b) {
    return std::hypot(a.f1_mel - b.f1_mel, a.f2_mel - b.f2_mel);
}

// Peterson & Barney (1952) male mean formants, the default continuum
// endpoints for the /i/-/I/ series and the /I/-/E/ word pair.
inline constexpr FormantPoint kPetersonBarneyMaleI{270.0, 2290.0};   // "heed"
inline constexpr FormantPoint kPetersonBarneyMaleIh{390.0, 1990.0};  // "hid"
inline constexpr FormantPoint kPetersonBarneyMaleEh{530.0, 1840.0};  // "head"

}  // namespace jpd
