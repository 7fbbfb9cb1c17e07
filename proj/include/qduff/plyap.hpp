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

#ifndef QDUFF_PLYAP_HPP
#define QDUFF_PLYAP_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qduff/ensemble.hpp"
#include "qduff/model.hpp"
#include "qduff/rng.hpp"

namespace qduff {

/// The phase-space resolution limit at a given beta: area 1/2 in scaled
/// variables, linear size beta in attractor units.
struct PlanckCell {
    double beta = 1.0;
    double linear_size() const { return beta; }
    static constexpr double area = 0.5;
};

/// How the initial separation epsilon is chosen.
enum class EpsilonPolicy {
    kFixed,   // epsilon = 0.01, resolvable only in the classical region
    kPlanck,  // epsilon = beta, one Planck cell for every beta
};

inline double epsilon_for(EpsilonPolicy policy, double beta) {
    return policy == EpsilonPolicy::kFixed ? 0.01 : beta;
}

inline EpsilonPolicy parse_epsilon_policy(const std::string& s) {
    if (s == "fixed") return EpsilonPolicy::kFixed;
    if (s == "planck") return EpsilonPolicy::kPlanck;
    throw std::invalid_argument("epsilon policy must be 'fixed' or 'planck', got '" + s + "'");
}

/// A pair of nearby initial conditions: base and base + epsilon * direction.
struct PairSpec {
    PhasePoint base;
    double dir_q = 1.0;  // unit offset direction
    double dir_p = 0.0;
    double epsilon = 0.01;

    PhasePoint second() const {
        return {base.q + epsilon * dir_q, base.p + epsilon * dir_p};
    }
};

// Classical attractor bounding box (x, p), already padded; base points are
// drawn uniformly here and scaled by 1/beta.
inline constexpr double kAttractorBoxX = 1.6;
inline constexpr double kAttractorBoxP = 1.0;

/// Samples pair base points uniformly over the scaled attractor box with
/// uniformly random offset directions. Deterministic given the rng state.
inline std::vector<PairSpec> make_pairs(int n_pairs, EpsilonPolicy policy,
                                        const ModelParams& params, TrajectoryRng& rng) {
    if (n_pairs < 1) throw std::invalid_argument("make_pairs: n_pairs must be >= 1");
    const double eps = epsilon_for(policy, params.beta);
    std::vector<PairSpec> pairs;
    pairs.reserve(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        const double x = rng.uniform(-kAttractorBoxX, kAttractorBoxX);
        const double p = rng.uniform(-kAttractorBoxP, kAttractorBoxP);
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        PairSpec spec;
        spec.base = {x / params.beta, p / params.beta};
        spec.dir_q = std::cos(theta);
        spec.dir_p = std::sin(theta);
        spec.epsilon = eps;
        pairs.push_back(spec);
    }
    return pairs;
}

/// Coherent-state label for a wavepacket centered at (qbar, pbar):
/// alpha = (qbar + i pbar)/sqrt(2), so <Q> = qbar and <P> = pbar.
inline Complex coherent_alpha(PhasePoint pt) {
    return Complex{pt.q, pt.p} / std::sqrt(2.0);
}

/// Smallest truncation that holds every endpoint of every pair, rounded up
/// to a multiple of 8 (minimum 32).
inline int required_dim(const std::vector<PairSpec>& pairs) {
    int need = 32;
    for (const PairSpec& pair : pairs) {
        need = std::max(need, coherent_required_dim(coherent_alpha(pair.base)));
        need = std::max(need, coherent_required_dim(coherent_alpha(pair.second())));
    }
    return (need + 7) / 8 * 8;
}

/// Largest stable step for the RK4 drift at this dimension, measured from the
/// Gershgorin radius of the Hamiltonian (imaginary-axis stability limit 2.83,
/// kept with margin). Never raises the requested step.
inline double stable_dtau(const ModelParams& params, double requested) {
    const ModelOperators ops = ModelOperators::build(params);
    const double radius = ops.hamiltonian_radius(params);
    const double cap = (radius > 0.0) ? 2.0 / radius : requested;
    return std::min(requested, cap);
}

/// Pointwise Euclidean distance between two mean trajectories in the
/// (M{<Q>}, M{<P>}) plane.
inline std::vector<double> separation(const std::vector<double>& qbar1,
                                      const std::vector<double>& pbar1,
                                      const std::vector<double>& qbar2,
                                      const std::vector<double>& pbar2) {
    if (qbar1.size() != pbar1.size() || qbar1.size() != qbar2.size() ||
        qbar1.size() != pbar2.size())
        throw std::invalid_argument("separation: series length mismatch");
    std::vector<double> d(qbar1.size());
    for (std::size_t t = 0; t < d.size(); ++t)
        d[t] = std::hypot(qbar1[t] - qbar2[t], pbar1[t] - pbar2[t]);
    return d;
}

/// Ensemble-averaged separation Delta(tau) with its analysis products.
struct SeparationSeries {
    std::vector<double> taus;
    std::vector<double> delta;
    std::vector<double> bound;  // D(tau - tau0) for tau >= tau0, NaN before
    std::optional<double> tau0;
    std::optional<double> delta_asymp;
    double delta_asymp_stddev = 0.0;
    std::optional<double> tau_asymp;
    int n_pairs = 0;
    int n_realizations = 0;
    double epsilon = 0.0;
};

/// Appendix-A upper bound D(s) = ((1 + 1/beta^2) e^{2 Gamma s} - 1)^{-1/2};
/// D(0) = beta, strictly decreasing for Gamma > 0.
inline double bound_D(double beta, double gamma, double s) {
    if (s < 0.0) throw std::invalid_argument("bound_D: elapsed time s must be >= 0");
    if (!(beta > 0.0)) throw std::invalid_argument("bound_D: beta must be > 0");
    return 1.0 / std::sqrt((1.0 + 1.0 / (beta * beta)) * std::exp(2.0 * gamma * s) - 1.0);
}

/// First tau after the initial transient where Delta stays below the cell
/// for at least one drive period; absent if that never happens.
inline std::optional<double> estimate_tau0(const std::vector<double>& taus,
                                           const std::vector<double>& delta,
                                           const PlanckCell& cell, double drive_period) {
    const double size = cell.linear_size();
    const std::size_t n = taus.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(delta[i] < size)) continue;
        bool sustained = true;
        for (std::size_t j = i + 1; j < n && taus[j] <= taus[i] + drive_period; ++j) {
            if (!(delta[j] < size)) {
                sustained = false;
                break;
            }
        }
        if (sustained) return taus[i];
    }
    return std::nullopt;
}

struct TailEstimate {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Mean (and spread) of Delta over the final tail_fraction of the series.
inline TailEstimate estimate_delta_asymp(const std::vector<double>& delta, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5))
        throw std::invalid_argument("estimate_delta_asymp: tail_fraction must be in (0, 0.5]");
    if (delta.empty()) throw std::invalid_argument("estimate_delta_asymp: empty series");
    const std::size_t n = delta.size();
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                           std::ceil(tail_fraction * n)));
    double sum = 0.0;
    for (std::size_t i = n - count; i < n; ++i) sum += delta[i];
    const double mean = sum / count;
    double ss = 0.0;
    for (std::size_t i = n - count; i < n; ++i) ss += (delta[i] - mean) * (delta[i] - mean);
    return {mean, count > 1 ? std::sqrt(ss / (count - 1)) : 0.0};
}

/// Inverts D(tau_asymp - tau0) = delta_asymp:
/// tau_asymp = tau0 + ln[(1 + 1/Delta^2)/(1 + 1/beta^2)] / (2 Gamma).
inline double solve_tau_asymp(double delta_asymp, double tau0, double beta, double gamma) {
    if (!(delta_asymp > 0.0 && delta_asymp < beta))
        throw std::invalid_argument(
            "solve_tau_asymp: no solution, requires 0 < delta_asymp < beta (D starts at beta "
            "and decreases)");
    if (!(gamma > 0.0)) throw std::invalid_argument("solve_tau_asymp: gamma must be > 0");
    const double num = 1.0 + 1.0 / (delta_asymp * delta_asymp);
    const double den = 1.0 + 1.0 / (beta * beta);
    return tau0 + std::log(num / den) / (2.0 * gamma);
}

struct GrowthFit {
    double rate = 0.0;
    double stderr = 0.0;
    int n_points = 0;
};

/// Least-squares slope of ln Delta vs tau over [window_lo, window_hi].
inline GrowthFit fit_growth_rate(const std::vector<double>& taus,
                                 const std::vector<double>& delta, double window_lo,
                                 double window_hi) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] < window_lo || taus[i] > window_hi) continue;
        if (!(delta[i] > 0.0))
            throw std::invalid_argument("fit_growth_rate: non-positive Delta in window at tau = " +
                                        std::to_string(taus[i]));
        xs.push_back(taus[i]);
        ys.push_back(std::log(delta[i]));
    }
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("fit_growth_rate: fewer than 3 points in window");
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    const double slope = sxy / sxx;
    const double intercept = ym - slope * xm;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        ssr += r * r;
    }
    GrowthFit fit;
    fit.rate = slope;
    fit.stderr = (n > 2) ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    fit.n_points = static_cast<int>(n);
    return fit;
}

/// Runs 2 * n_pairs * n_realizations QSD trajectories from coherent states at
/// the pair endpoints and assembles Delta(tau). Stream indices are assigned
/// by flattened task id, so results are reproducible for any worker count.
inline SeparationSeries delta_series(const ModelParams& params,
                                     const std::vector<PairSpec>& pairs, int n_realizations,
                                     SeedSpec seed, int workers = 1, int record_stride = 10) {
    params.validate();
    if (pairs.empty()) throw std::invalid_argument("delta_series: empty pair list");
    if (n_realizations < 1)
        throw std::invalid_argument("delta_series: n_realizations must be >= 1");
    const int dim_needed = required_dim(pairs);
    if (params.dim < dim_needed)
        throw std::invalid_argument("delta_series: dim " + std::to_string(params.dim) +
                                    " below required " + std::to_string(dim_needed));

    const ModelOperators ops = ModelOperators::build(params);
    const int n_pairs = static_cast<int>(pairs.size());
    const int n_endpoints = 2 * n_pairs;
    const int n_tasks = n_endpoints * n_realizations;

    struct Slot {
        std::vector<double> q, p;
    };
    std::vector<Slot> slots(n_tasks);
    std::vector<double> taus;
    std::mutex tau_mutex;

    parallel_for(n_tasks, workers, [&](int task) {
        const int endpoint = task / n_realizations;
        const int realization = task % n_realizations;
        const int pair_index = endpoint / 2;
        const PhasePoint pt =
            (endpoint % 2 == 0) ? pairs[pair_index].base : pairs[pair_index].second();
        try {
            const StateVector initial = coherent_state(coherent_alpha(pt), params.dim);
            const SeedSpec traj_seed{seed.master_seed,
                                     seed.stream_index + static_cast<std::uint64_t>(task)};
            TrajectoryRecord rec =
                evolve_trajectory(params, ops, initial, traj_seed, true, record_stride);
            slots[task].q = std::move(rec.q);
            slots[task].p = std::move(rec.p);
            if (task == 0) {
                std::lock_guard<std::mutex> lock(tau_mutex);
                taus = std::move(rec.taus);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("delta_series: pair " + std::to_string(pair_index) +
                                     ", endpoint " + std::to_string(endpoint % 2) +
                                     ", realization " + std::to_string(realization) + ": " +
                                     e.what());
        }
    });

    const std::size_t nt = slots[0].q.size();
    // Mean trajectory per endpoint, realizations reduced in stream order.
    std::vector<std::vector<double>> mean_q(n_endpoints), mean_p(n_endpoints);
    for (int e = 0; e < n_endpoints; ++e) {
        mean_q[e].assign(nt, 0.0);
        mean_p[e].assign(nt, 0.0);
        for (int r = 0; r < n_realizations; ++r) {
            const Slot& s = slots[e * n_realizations + r];
            for (std::size_t t = 0; t < nt; ++t) {
                mean_q[e][t] += s.q[t];
                mean_p[e][t] += s.p[t];
            }
        }
        for (std::size_t t = 0; t < nt; ++t) {
            mean_q[e][t] /= n_realizations;
            mean_p[e][t] /= n_realizations;
        }
    }

    SeparationSeries out;
    out.taus = std::move(taus);
    out.n_pairs = n_pairs;
    out.n_realizations = n_realizations;
    out.epsilon = pairs.front().epsilon;
    out.delta.assign(nt, 0.0);
    for (int i = 0; i < n_pairs; ++i) {
        const std::vector<double> d =
            separation(mean_q[2 * i], mean_p[2 * i], mean_q[2 * i + 1], mean_p[2 * i + 1]);
        for (std::size_t t = 0; t < nt; ++t) out.delta[t] += d[t];
    }
    for (std::size_t t = 0; t < nt; ++t) out.delta[t] /= n_pairs;
    return out;
}

/// Fills tau0, delta_asymp, tau_asymp and the bound column of a raw series.
inline void analyze_separation(SeparationSeries& series, const ModelParams& params,
                               double tail_fraction = 0.2) {
    const PlanckCell cell{params.beta};
    series.tau0 = estimate_tau0(series.taus, series.delta, cell, params.drive_period());
    const TailEstimate tail = estimate_delta_asymp(series.delta, tail_fraction);
    series.delta_asymp = tail.mean;
    series.delta_asymp_stddev = tail.stddev;
    series.bound.assign(series.taus.size(), std::numeric_limits<double>::quiet_NaN());
    if (series.tau0) {
        for (std::size_t t = 0; t < series.taus.size(); ++t) {
            if (series.taus[t] >= *series.tau0)
                series.bound[t] = bound_D(params.beta, params.gamma, series.taus[t] - *series.tau0);
        }
        if (tail.mean > 0.0 && tail.mean < params.beta && params.gamma > 0.0)
            series.tau_asymp = solve_tau_asymp(tail.mean, *series.tau0, params.beta, params.gamma);
    }
}

}  // namespace qduff

#endif  // QDUFF_PLYAP_HPP
