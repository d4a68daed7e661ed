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

#include "jpd/stats.hpp"

#include <cmath>

#include "doctest.h"
#include "jpd/error.hpp"

using namespace jpd;

TEST_CASE("normal_cdf reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-10));
    CHECK(normal_cdf(1.8) == doctest::Approx(0.9640696808870742).epsilon(1e-12));
}

TEST_CASE("normal_quantile inverts normal_cdf") {
    for (double p : {1e-9, 1e-4, 0.025, 0.1, 0.4444444444444444, 0.5,
                     0.7222222222222222, 0.975, 0.9999, 1.0 - 1e-9}) {
        const double x = normal_quantile(p);
        CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), domain_error);
}

TEST_CASE("quantile values used by the probit closed forms") {
    // Phi^-1(0.4/0.9) and Phi^-1(0.65/0.9), the X50/X75 transforms at
    // floor 0.1.
    CHECK(normal_quantile(0.4 / 0.9) == doctest::Approx(-0.13971).epsilon(1e-3));
    CHECK(normal_quantile(0.65 / 0.9) == doctest::Approx(0.58946).epsilon(1e-3));
}

TEST_CASE("rng streams are deterministic and order-free") {
    const std::uint64_t key = derive_key({42, 7, 3});
    RngStream a(key);
    RngStream b(key);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // Different key words give different streams.
    RngStream c(derive_key({42, 7, 4}));
    bool any_diff = false;
    RngStream a2(key);
    for (int i = 0; i < 10; ++i) any_diff |= (a2.next_u64() != c.next_u64());
    CHECK(any_diff);
}

TEST_CASE("gaussian draws have sane moments") {
    RngStream rng(derive_key({123}));
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform draws stay in [0, 1)") {
    RngStream rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
