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

#ifndef QDUFF_RNG_HPP
#define QDUFF_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qduff {

/// Identifies one reproducible noise stream: trajectory i of a run seeded
/// with master_seed uses stream_index = i (plus any fixed offset).
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

namespace detail {

// SplitMix64 finalizer; decorrelates consecutive stream indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Wiener increment d_zeta over one step: M{dz} = M{dz dz} = 0,
/// M{conj(dz) dz} = dtau.
struct WienerIncrement {
    std::complex<double> dz{0.0, 0.0};
};

/// Per-trajectory random stream. Distinct stream indices give independent
/// streams; identical (master_seed, stream_index) reproduce bit-identical
/// draws.
class TrajectoryRng {
  public:
    explicit TrajectoryRng(SeedSpec seed)
        : engine_(detail::splitmix64(seed.master_seed ^
                                     detail::splitmix64(seed.stream_index + 0x51a2b3c4d5e6f708ULL))) {}

    double gaussian() { return normal_(engine_); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// dz = (g1 + i g2) sqrt(dtau/2), g1 and g2 independent standard normals:
    /// the zero-mean complex Gaussian with M{dz dz} = 0 and M{|dz|^2} = dtau.
    WienerIncrement sample_increment(double dtau) {
        const double s = std::sqrt(0.5 * dtau);
        const double g1 = gaussian();
        const double g2 = gaussian();
        return {std::complex<double>(g1 * s, g2 * s)};
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline WienerIncrement sample_increment(TrajectoryRng& rng, double dtau) {
    if (!(dtau > 0.0)) throw std::invalid_argument("sample_increment: dtau must be > 0");
    return rng.sample_increment(dtau);
}

}  // namespace qduff

#endif  // QDUFF_RNG_HPP
