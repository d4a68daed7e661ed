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

#include <complex>
#include <span>
#include <vector>

namespace jpd {

// Burg's method. Returns prediction coefficients a[0..order] with a[0] = 1,
// for the analysis polynomial A(z) = 1 + a1 z^-1 + ... + ap z^-p.
std::vector<double> burg_lpc(std::span<const double> frame, int order);

// Roots of A(z) in the z^-1 sense, i.e. the filter poles.
std::vector<std::complex<double>> lpc_poles(const std::vector<double>& a);

struct FormantBW {
    double frequency_hz = 0.0;
    double bandwidth_hz = 0.0;
};

// Poles above the real axis converted to (frequency, bandwidth) pairs,
// sorted by frequency. No plausibility filtering here; callers apply their
// own bandwidth/frequency gates.
std::vector<FormantBW> poles_to_formants(const std::vector<std::complex<double>>& poles,
                                         double sample_rate);

// Rebuild a real-coefficient polynomial (a[0] = 1) from a full pole set.
std::vector<double> poles_to_lpc(const std::vector<std::complex<double>>& poles);

// |1/A(e^{j 2 pi f / sr})| in dB, up to a constant gain.
double lpc_spectrum_db(const std::vector<double>& a, double freq_hz,
                       double sample_rate);

}  // namespace jpd
