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

#ifndef QDUFF_QSD_HPP
#define QDUFF_QSD_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qduff/fock.hpp"
#include "qduff/model.hpp"
#include "qduff/rng.hpp"

namespace qduff {

/// Numerical failure inside a trajectory; carries the offending tau.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string& msg, double tau)
        : std::runtime_error(msg + " at tau = " + std::to_string(tau)), tau_(tau) {}
    double tau() const { return tau_; }

  private:
    double tau_;
};

/// Population leaked to the top of the truncated Fock basis.
class TruncationLeakError : public NumericalError {
  public:
    TruncationLeakError(double population, double tau)
        : NumericalError("truncation leak: top-level population " + std::to_string(population) +
                             " exceeds 1e-6",
                         tau) {}
};

/// The state picked up NaN/Inf entries.
class NumericalBlowupError : public NumericalError {
  public:
    explicit NumericalBlowupError(double tau)
        : NumericalError("numerical blowup: non-finite state norm", tau) {}
};

/// Combined population of the top `levels` basis states; the leak monitor.
inline double top_population(const StateVector& state, int levels = 5) {
    double s = 0.0;
    const int lo = std::max(0, state.dim() - levels);
    for (int n = lo; n < state.dim(); ++n) s += std::norm(state[n]);
    return s;
}

/// Per-trajectory observables at one instant.
struct Observables {
    double q = 0.0;        // <Q>
    double p = 0.0;        // <P>
    double vq = 0.0;       // V_Q
    double vp = 0.0;       // V_P
    double vqp = 0.0;      // symmetrized QP covariance
    double sigma_a = 0.0;  // <a^dag a> - |<a>|^2 (localization spread)
};

/// Time series recorded along one stochastic trajectory, plus stroboscopic
/// samples taken each drive period.
struct TrajectoryRecord {
    std::vector<double> taus;
    std::vector<double> q, p, vq, vp, vqp, sigma_a;
    std::vector<int> strobe_period;
    std::vector<PhasePoint> strobe;
    std::vector<double> strobe_vq, strobe_vp;
    // Mean of (pre-renormalization norm - 1) over all steps; O(dtau).
    double prenorm_mean_drift = 0.0;
    StateVector final_state;
};

namespace detail {

struct QsdWorkspace {
    std::vector<Complex> k1, k2, k3, k4, stage, hx, kx, noise;

    explicit QsdWorkspace(int dim)
        : k1(dim), k2(dim), k3(dim), k4(dim), stage(dim), hx(dim), kx(dim), noise(dim) {}
};

// Drift of the dimensionless QSD equation:
//   f = -i H(tau) x + (<K^dag> K - 1/2 K^dag K - 1/2 <K^dag><K>) x,
// with expectations normalized so unnormalized RK4 stage states are handled
// consistently.
inline void qsd_drift(const ModelOperators& ops, const ModelParams& params, bool with_hamiltonian,
                      std::span<const Complex> x, double tau, std::span<Complex> out,
                      QsdWorkspace& ws) {
    const int dim = static_cast<int>(x.size());
    ops.k_op.apply(x, ws.kx);
    double nn = 0.0;
    Complex ek_num{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
        nn += std::norm(x[i]);
        ek_num += std::conj(x[i]) * ws.kx[i];
    }
    const Complex ek = (nn > 0.0) ? ek_num / nn : Complex{0.0, 0.0};

    if (with_hamiltonian) {
        ops.h_static.apply(x, ws.hx);
        ops.q_op.apply_add(drive_amplitude(params, tau), x, ws.hx);
        const Complex minus_i{0.0, -1.0};
        for (int i = 0; i < dim; ++i) out[i] = minus_i * ws.hx[i];
    } else {
        std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
    }

    const Complex ek_conj = std::conj(ek);
    const double half_ek2 = 0.5 * std::norm(ek);
    for (int i = 0; i < dim; ++i) out[i] += ek_conj * ws.kx[i] - half_ek2 * x[i];
    ops.k_dag_k.apply_add(-0.5, x, out);
}

// One step: classical RK4 on the drift, Euler-Maruyama noise kick with
// coefficients frozen at the pre-step state, then renormalization.
// Returns the pre-renormalization norm.
inline double qsd_step_inplace(StateVector& state, const ModelOperators& ops,
                               const ModelParams& params, bool with_hamiltonian, double tau,
                               Complex dz, QsdWorkspace& ws) {
    const int dim = state.dim();
    const double h = params.dtau;
    auto x = state.amps();

    qsd_drift(ops, params, with_hamiltonian, x, tau, ws.k1, ws);

    // Noise term from the pre-step state; ws.kx still holds K x from stage 1.
    double nn = 0.0;
    Complex ek_num{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
        nn += std::norm(x[i]);
        ek_num += std::conj(x[i]) * ws.kx[i];
    }
    const Complex ek0 = (nn > 0.0) ? ek_num / nn : Complex{0.0, 0.0};
    for (int i = 0; i < dim; ++i) ws.noise[i] = dz * (ws.kx[i] - ek0 * x[i]);

    for (int i = 0; i < dim; ++i) ws.stage[i] = x[i] + 0.5 * h * ws.k1[i];
    qsd_drift(ops, params, with_hamiltonian, ws.stage, tau + 0.5 * h, ws.k2, ws);
    for (int i = 0; i < dim; ++i) ws.stage[i] = x[i] + 0.5 * h * ws.k2[i];
    qsd_drift(ops, params, with_hamiltonian, ws.stage, tau + 0.5 * h, ws.k3, ws);
    for (int i = 0; i < dim; ++i) ws.stage[i] = x[i] + h * ws.k3[i];
    qsd_drift(ops, params, with_hamiltonian, ws.stage, tau + h, ws.k4, ws);

    const double h6 = h / 6.0;
    double norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        x[i] += h6 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]) + ws.noise[i];
        norm2 += std::norm(x[i]);
    }
    const double norm_before = std::sqrt(norm2);
    if (!std::isfinite(norm_before) || norm_before == 0.0)
        throw NumericalBlowupError(tau + h);
    const double inv = 1.0 / norm_before;
    for (int i = 0; i < dim; ++i) x[i] *= inv;
    return norm_before;
}

inline Observables compute_observables(const ModelOperators& ops, const StateVector& state,
                                       QsdWorkspace& ws) {
    const int dim = state.dim();
    auto x = state.amps();
    ops.q_op.apply(x, ws.hx);   // Q x
    ops.p_op.apply(x, ws.kx);   // P x
    ops.a_op.apply(x, ws.stage);  // a x

    double qe = 0.0, pe = 0.0, q2 = 0.0, p2 = 0.0, n = 0.0, qp_re = 0.0;
    Complex ae{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
        const Complex xi = x[i];
        qe += (std::conj(xi) * ws.hx[i]).real();
        pe += (std::conj(xi) * ws.kx[i]).real();
        q2 += std::norm(ws.hx[i]);
        p2 += std::norm(ws.kx[i]);
        n += std::norm(ws.stage[i]);
        qp_re += (std::conj(ws.hx[i]) * ws.kx[i]).real();
        ae += std::conj(xi) * ws.stage[i];
    }
    Observables ob;
    ob.q = qe;
    ob.p = pe;
    ob.vq = q2 - qe * qe;
    ob.vp = p2 - pe * pe;
    ob.vqp = qp_re - qe * pe;
    ob.sigma_a = n - std::norm(ae);
    return ob;
}

}  // namespace detail

/// One Ito step of the QSD equation for a given Wiener increment.
/// Deterministic in (state, tau, increment).
inline StateVector qsd_step(const StateVector& state, const ModelOperators& ops,
                            const ModelParams& params, double tau, WienerIncrement increment,
                            bool hamiltonian_enabled = true) {
    params.validate();
    if (state.dim() != params.dim) throw std::invalid_argument("qsd_step: dimension mismatch");
    detail::QsdWorkspace ws(state.dim());
    StateVector next = state;
    detail::qsd_step_inplace(next, ops, params, hamiltonian_enabled, tau, increment.dz, ws);
    const double leak = top_population(next);
    if (leak > 1e-6) throw TruncationLeakError(leak, tau + params.dtau);
    return next;
}

/// Integrates one stochastic trajectory. Observables are recorded every
/// record_stride steps; stroboscopic samples at the step nearest each
/// k * 2 pi / Omega. With hamiltonian_enabled = false only the dissipative
/// generator acts (the H = 0 configuration).
inline TrajectoryRecord evolve_trajectory(const ModelParams& params, const ModelOperators& ops,
                                          const StateVector& initial, SeedSpec seed,
                                          bool hamiltonian_enabled = true, int record_stride = 10) {
    params.validate();
    if (initial.dim() != params.dim)
        throw std::invalid_argument("evolve_trajectory: state/params dimension mismatch");
    if (record_stride < 1) throw std::invalid_argument("evolve_trajectory: record_stride < 1");

    const long n_steps = static_cast<long>(std::ceil(params.tau_max / params.dtau));
    const double steps_per_period = params.drive_period() / params.dtau;

    TrajectoryRecord rec;
    const long n_rec = n_steps / record_stride + 1;
    rec.taus.reserve(n_rec);
    rec.q.reserve(n_rec);
    rec.p.reserve(n_rec);
    rec.vq.reserve(n_rec);
    rec.vp.reserve(n_rec);
    rec.vqp.reserve(n_rec);
    rec.sigma_a.reserve(n_rec);

    detail::QsdWorkspace ws(params.dim);
    TrajectoryRng rng(seed);
    StateVector state = initial;

    const double leak0 = top_population(state);
    if (leak0 > 1e-6) throw TruncationLeakError(leak0, 0.0);

    long next_strobe_step = 0;
    int strobe_k = 0;
    double prenorm_sum = 0.0;

    for (long step = 0;; ++step) {
        const double tau = step * params.dtau;
        const bool record = (step % record_stride == 0) || step == n_steps;
        const bool strobe = (step == next_strobe_step);
        if (record || strobe) {
            const detail::Observables ob = detail::compute_observables(ops, state, ws);
            if (record) {
                rec.taus.push_back(tau);
                rec.q.push_back(ob.q);
                rec.p.push_back(ob.p);
                rec.vq.push_back(ob.vq);
                rec.vp.push_back(ob.vp);
                rec.vqp.push_back(ob.vqp);
                rec.sigma_a.push_back(ob.sigma_a);
            }
            if (strobe) {
                rec.strobe_period.push_back(strobe_k);
                rec.strobe.push_back({ob.q, ob.p});
                rec.strobe_vq.push_back(ob.vq);
                rec.strobe_vp.push_back(ob.vp);
                ++strobe_k;
                next_strobe_step = std::llround(strobe_k * steps_per_period);
            }
        }
        if (step == n_steps) break;

        const WienerIncrement dz = rng.sample_increment(params.dtau);
        const double norm_before =
            detail::qsd_step_inplace(state, ops, params, hamiltonian_enabled, tau, dz.dz, ws);
        prenorm_sum += norm_before - 1.0;

        const double leak = top_population(state);
        if (leak > 1e-6) throw TruncationLeakError(leak, tau + params.dtau);
    }
    rec.prenorm_mean_drift = (n_steps > 0) ? prenorm_sum / static_cast<double>(n_steps) : 0.0;
    rec.final_state = std::move(state);
    return rec;
}

inline TrajectoryRecord evolve_trajectory(const ModelParams& params, const StateVector& initial,
                                          SeedSpec seed, bool hamiltonian_enabled = true,
                                          int record_stride = 10) {
    const ModelOperators ops = ModelOperators::build(params);
    return evolve_trajectory(params, ops, initial, seed, hamiltonian_enabled, record_stride);
}

}  // namespace qduff

#endif  // QDUFF_QSD_HPP
