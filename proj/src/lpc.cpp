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

#include "jpd/lpc.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "jpd/error.hpp"

namespace jpd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> burg_lpc(std::span<const double> frame, int order) {
    const int n = static_cast<int>(frame.size());
    if (order < 1) throw domain_error("burg_lpc: order must be >= 1");
    if (n <= order + 1)
        throw domain_error("burg_lpc: frame shorter than prediction order");

    std::vector<double> a(order + 1, 0.0);
    a[0] = 1.0;
    std::vector<double> f(frame.begin(), frame.end());  // forward errors
    std::vector<double> b(frame.begin(), frame.end());  // backward errors
    std::vector<double> tmp(order + 1, 0.0);

    double energy = 0.0;
    for (double v : f) energy += v * v;
    if (energy <= 0.0) {
        // Silent frame: no predictable structure; keep the trivial model.
        return a;
    }
    double den = 2.0 * energy;
    double k_prev = 0.0;

    for (int m = 1; m <= order; ++m) {
        den = den * (1.0 - k_prev * k_prev) - f[m - 1] * f[m - 1] - b[n - 1] * b[n - 1];
        if (den <= 0.0) break;
        double num = 0.0;
        for (int t = m; t < n; ++t) num += b[t - 1] * f[t];
        const double k = -2.0 * num / den;
        k_prev = k;
        for (int t = n - 1; t >= m; --t) {
            const double bt = b[t - 1] + k * f[t];
            f[t] = f[t] + k * b[t - 1];
            b[t] = bt;
        }
        for (int j = 1; j < m; ++j) tmp[j] = a[j] + k * a[m - j];
        for (int j = 1; j < m; ++j) a[j] = tmp[j];
        a[m] = k;
    }
    return a;
}

std::vector<std::complex<double>> lpc_poles(const std::vector<double>& a) {
    const int p = static_cast<int>(a.size()) - 1;
    if (p < 1) return {};

    // Poles are the roots of z^p + a1 z^{p-1} + ... + ap = 0; use the
    // companion matrix and let Eigen do the work.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) companion(0, i) = -a[i + 1];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> poles;
    poles.reserve(p);
    for (int i = 0; i < p; ++i) poles.push_back(solver.eigenvalues()[i]);
    return poles;
}

std::vector<FormantBW> poles_to_formants(const std::vector<std::complex<double>>& poles,
                                         double sample_rate) {
    std::vector<FormantBW> out;
    for (const auto& z : poles) {
        if (z.imag() <= 0.0) continue;
        const double r = std::abs(z);
        if (r <= 0.0 || r >= 1.0 + 1e-9) continue;
        FormantBW f;
        f.frequency_hz = std::atan2(z.imag(), z.real()) * sample_rate / (2.0 * kPi);
        f.bandwidth_hz = -std::log(std::min(r, 1.0 - 1e-12)) * sample_rate / kPi;
        out.push_back(f);
    }
    std::sort(out.begin(), out.end(), [](const FormantBW& x, const FormantBW& y) {
        return x.frequency_hz < y.frequency_hz;
    });
    return out;
}

std::vector<double> poles_to_lpc(const std::vector<std::complex<double>>& poles) {
    std::vector<std::complex<double>> coeff{1.0};
    for (const auto& z : poles) {
        // Multiply by (1 - z * x); coefficients ordered by power of z^-1.
        std::vector<std::complex<double>> next(coeff.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeff.size(); ++i) {
            next[i] += coeff[i];
            next[i + 1] -= coeff[i] * z;
        }
        coeff = std::move(next);
    }
    std::vector<double> a(coeff.size());
    for (std::size_t i = 0; i < coeff.size(); ++i) a[i] = coeff[i].real();
    return a;
}

double lpc_spectrum_db(const std::vector<double>& a, double freq_hz,
                       double sample_rate) {
    const double w = 2.0 * kPi * freq_hz / sample_rate;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(i)));
    const double mag = std::abs(acc);
    return -20.0 * std::log10(std::max(mag, 1e-300));
}

}  // namespace jpd
