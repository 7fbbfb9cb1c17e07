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

#ifndef QDUFF_ENSEMBLE_HPP
#define QDUFF_ENSEMBLE_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "qduff/qsd.hpp"

namespace qduff {

/// Runs body(i) for i in [0, n) on `workers` threads. Results must be written
/// to per-index slots so that the caller can reduce them in index order,
/// keeping every aggregate independent of scheduling. If several tasks throw,
/// the lowest-index exception is rethrown.
inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    if (n <= 0) return;
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    int err_index = -1;
    std::exception_ptr err;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (err_index < 0 || i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

/// Ensemble mean and Monte Carlo standard error of the recorded observables.
/// The n series is <a^dag a> reconstructed per trajectory as
/// sigma_a + (<Q>^2 + <P>^2)/2.
struct MeanSeries {
    std::vector<double> taus;
    std::vector<double> mean_q, sem_q;
    std::vector<double> mean_p, sem_p;
    std::vector<double> mean_n, sem_n;
    std::vector<double> mean_sigma, sem_sigma;
    int n_traj = 0;
};

/// Runs n_traj independent trajectories (stream_index = stream_offset + i)
/// from a common initial state and aggregates them. Per-stream results are
/// reduced in stream order after the pool joins, so the output is identical
/// for any worker count.
inline MeanSeries ensemble_mean(const ModelParams& params, const ModelOperators& ops,
                                const StateVector& initial, int n_traj, std::uint64_t master_seed,
                                std::uint64_t stream_offset = 0, bool hamiltonian_enabled = true,
                                int record_stride = 10, int workers = 1) {
    if (n_traj < 1) throw std::invalid_argument("ensemble_mean: n_traj must be >= 1");
    struct Slot {
        std::vector<double> q, p, n, sigma;
    };
    std::vector<Slot> slots(n_traj);
    std::vector<double> taus;
    std::mutex tau_mutex;

    parallel_for(n_traj, workers, [&](int i) {
        const SeedSpec seed{master_seed, stream_offset + static_cast<std::uint64_t>(i)};
        TrajectoryRecord rec =
            evolve_trajectory(params, ops, initial, seed, hamiltonian_enabled, record_stride);
        Slot& s = slots[i];
        s.q = std::move(rec.q);
        s.p = std::move(rec.p);
        s.sigma = std::move(rec.sigma_a);
        s.n.resize(s.q.size());
        for (std::size_t t = 0; t < s.q.size(); ++t)
            s.n[t] = s.sigma[t] + 0.5 * (s.q[t] * s.q[t] + s.p[t] * s.p[t]);
        if (i == 0) {
            std::lock_guard<std::mutex> lock(tau_mutex);
            taus = std::move(rec.taus);
        }
    });

    const std::size_t nt = slots[0].q.size();
    MeanSeries out;
    out.taus = std::move(taus);
    out.n_traj = n_traj;
    auto reduce = [&](auto member, std::vector<double>& mean, std::vector<double>& sem) {
        mean.assign(nt, 0.0);
        sem.assign(nt, 0.0);
        for (std::size_t t = 0; t < nt; ++t) {
            double sum = 0.0, sumsq = 0.0;
            for (int i = 0; i < n_traj; ++i) {
                const double v = (slots[i].*member)[t];
                sum += v;
                sumsq += v * v;
            }
            const double m = sum / n_traj;
            mean[t] = m;
            if (n_traj > 1) {
                const double var = std::max(0.0, (sumsq - n_traj * m * m) / (n_traj - 1));
                sem[t] = std::sqrt(var / n_traj);
            }
        }
    };
    reduce(&Slot::q, out.mean_q, out.sem_q);
    reduce(&Slot::p, out.mean_p, out.sem_p);
    reduce(&Slot::n, out.mean_n, out.sem_n);
    reduce(&Slot::sigma, out.mean_sigma, out.sem_sigma);
    return out;
}

}  // namespace qduff

#endif  // QDUFF_ENSEMBLE_HPP
