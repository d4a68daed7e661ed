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

#include <cstdint>
#include <initializer_list>

namespace jpd {

// Standard normal CDF, PDF, and quantile.
double normal_cdf(double x);
double normal_pdf(double x);

// Inverse of normal_cdf; p must lie in (0, 1). Rational approximation
// refined by one Newton step, accurate to ~1e-15 over the open interval.
double normal_quantile(double p);

// --- Deterministic, counter-based random streams -------------------------
//
// Every random draw in the toolkit comes from a stream keyed by the run
// seed plus the identifiers of the work item (subject, stimulus,
// repetition, ...). Streams never share state, so any execution order,
// including concurrent execution, reproduces the same numbers.

// splitmix64 finalizer; a fast, well-mixed 64-bit hash.
std::uint64_t mix64(std::uint64_t x);

// Fold a sequence of key words into a single stream key.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> words);

class RngStream {
public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double next_uniform();

    // Standard normal via Box-Muller; consumes exactly two 64-bit words.
    double next_gaussian();

private:
    std::uint64_t state_;
};

}  // namespace jpd
