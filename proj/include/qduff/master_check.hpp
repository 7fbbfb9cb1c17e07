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

#ifndef QDUFF_MASTER_CHECK_HPP
#define QDUFF_MASTER_CHECK_HPP

#include <optional>

#include "qduff/ensemble.hpp"
#include "qduff/lindblad.hpp"

namespace qduff {

/// QSD-ensemble vs master-equation comparison for <Q>, <P>, <a^dag a>.
struct MasterCheckResult {
    std::vector<double> taus;
    std::vector<double> qsd_q, me_q, sem_q;
    std::vector<double> qsd_p, me_p, sem_p;
    std::vector<double> qsd_n, me_n, sem_n;
    double frac_q = 0.0, frac_p = 0.0, frac_n = 0.0;  // fraction within 3 sigma_mc
    bool pass = false;                                // all fractions >= 0.99
};

/// Runs n_traj QSD trajectories from the vacuum and the deterministic master
/// equation from |0><0|, on the same grid, and compares first moments and
/// occupation at 3 sigma_mc. gamma_me_override deliberately de-tunes the
/// master-equation side (negative-control hook for tests).
inline MasterCheckResult run_master_check(const ModelParams& params, int n_traj, SeedSpec seed,
                                          int workers = 1, int record_stride = 10,
                                          std::optional<double> gamma_me_override = std::nullopt) {
    params.validate();
    if (params.dim > 128)
        throw std::invalid_argument("run_master_check: dim > 128 (dense-oracle guard)");

    const ModelOperators ops = ModelOperators::build(params);
    const StateVector vacuum = coherent_state({0.0, 0.0}, params.dim);
    const MeanSeries qsd = ensemble_mean(params, ops, vacuum, n_traj, seed.master_seed,
                                         seed.stream_index, true, record_stride, workers);

    ModelParams me_params = params;
    if (gamma_me_override) me_params.gamma = *gamma_me_override;
    const DensityEvolution me = evolve_density(me_params, DensityMatrix::pure(vacuum),
                                               params.tau_max, record_stride);

    MasterCheckResult out;
    out.taus = qsd.taus;
    out.qsd_q = qsd.mean_q;
    out.sem_q = qsd.sem_q;
    out.qsd_p = qsd.mean_p;
    out.sem_p = qsd.sem_p;
    out.qsd_n = qsd.mean_n;
    out.sem_n = qsd.sem_n;
    out.me_q = me.moments.q;
    out.me_p = me.moments.p;
    out.me_n = me.moments.n;

    const std::size_t nt = out.taus.size();
    if (me.moments.taus.size() != nt)
        throw std::runtime_error("run_master_check: grid mismatch between integrators");
    auto fraction_within = [nt](const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& sem) {
        std::size_t ok = 0;
        for (std::size_t t = 0; t < nt; ++t)
            if (std::abs(a[t] - b[t]) <= 3.0 * sem[t]) ++ok;
        return static_cast<double>(ok) / static_cast<double>(nt);
    };
    out.frac_q = fraction_within(out.qsd_q, out.me_q, out.sem_q);
    out.frac_p = fraction_within(out.qsd_p, out.me_p, out.sem_p);
    out.frac_n = fraction_within(out.qsd_n, out.me_n, out.sem_n);
    out.pass = out.frac_q >= 0.99 && out.frac_p >= 0.99 && out.frac_n >= 0.99;
    return out;
}

}  // namespace qduff

#endif  // QDUFF_MASTER_CHECK_HPP
