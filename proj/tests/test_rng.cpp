// Copyright 2026 The qduff Authors
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

#include "qduff/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qduff;

TEST_CASE("Wiener increment moments at dtau = 1e-3 over 1e6 draws") {
    const double dtau = 1e-3;
    const int n = 1'000'000;
    TrajectoryRng rng({99, 0});

    double sum_re = 0.0, sum_im = 0.0;
    double sum_re2 = 0.0;             // (Re dz)^2
    double sum_zz_re = 0.0, sum_zz_im = 0.0;  // dz * dz
    double sum_abs2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Complex dz = rng.sample_increment(dtau).dz;
        sum_re += dz.real();
        sum_im += dz.imag();
        sum_re2 += dz.real() * dz.real();
        const Complex zz = dz * dz;
        sum_zz_re += zz.real();
        sum_zz_im += zz.imag();
        sum_abs2 += std::norm(dz);
    }
    const double inv_n = 1.0 / n;
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    // M{dz} = 0: each component has std sqrt(dtau/2).
    const double sem_comp = std::sqrt(0.5 * dtau) / sqrt_n;
    CHECK(std::abs(sum_re * inv_n) < 5.0 * sem_comp);
    CHECK(std::abs(sum_im * inv_n) < 5.0 * sem_comp);

    // M{(Re dz)^2} = dtau/2 = 5e-4; estimator std is sqrt(2) * dtau/2.
    CHECK(std::abs(sum_re2 * inv_n - 0.5 * dtau) < 5.0 * std::sqrt(2.0) * 0.5 * dtau / sqrt_n);

    // M{dz dz} = 0: both components of dz^2 have std dtau (phase symmetry).
    CHECK(std::abs(sum_zz_re * inv_n) < 5.0 * dtau / sqrt_n);
    CHECK(std::abs(sum_zz_im * inv_n) < 5.0 * dtau / sqrt_n);

    // M{|dz|^2} = dtau, estimator std dtau.
    CHECK(std::abs(sum_abs2 * inv_n - dtau) < 5.0 * dtau / sqrt_n);
}

TEST_CASE("seeded streams are reproducible and distinct") {
    SECTION("seed (12345, stream 0): first draw reproduced bit-exactly") {
        TrajectoryRng a({12345, 0});
        TrajectoryRng b({12345, 0});
        for (int i = 0; i < 16; ++i) {
            const Complex da = a.sample_increment(1e-3).dz;
            const Complex db = b.sample_increment(1e-3).dz;
            CHECK(da.real() == db.real());
            CHECK(da.imag() == db.imag());
        }
    }
    SECTION("different stream indices decorrelate") {
        TrajectoryRng a({12345, 0});
        TrajectoryRng b({12345, 1});
        int equal = 0;
        double corr = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i) {
            const double ga = a.gaussian();
            const double gb = b.gaussian();
            if (ga == gb) ++equal;
            corr += ga * gb;
        }
        CHECK(equal == 0);
        CHECK(std::abs(corr / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    }
    SECTION("dtau must be positive") {
        TrajectoryRng rng({1, 2});
        CHECK_THROWS_AS(sample_increment(rng, 0.0), std::invalid_argument);
    }
}
