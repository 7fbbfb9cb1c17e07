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

#ifndef QDUFF_CLASSICAL_HPP
#define QDUFF_CLASSICAL_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qduff/model.hpp"

namespace qduff {

/// Classical Duffing oscillator state (x, xdot) at time t.
struct ClassicalState {
    double x = 0.0;
    double p = 0.0;
    double t = 0.0;
};

struct ClassicalDeriv {
    double dx = 0.0;
    double dp = 0.0;
};

/// xddot + 2 Gamma xdot + x^3 - x = g cos(Omega t).
inline ClassicalDeriv duffing_rhs(const ClassicalState& s, const ModelParams& params) {
    return {s.p, -2.0 * params.gamma * s.p - s.x * s.x * s.x + s.x +
                     params.g * std::cos(params.omega * s.t)};
}

inline double classical_energy(double x, double p) {
    return 0.5 * p * p + 0.25 * x * x * x * x - 0.5 * x * x;
}

struct ClassicalTrajectory {
    std::vector<double> ts, xs, ps;
    std::vector<PhasePoint> poincare;  // (x, p) once per drive period
};

namespace detail {

// RK4 step of the (x, p) system, optionally carrying the tangent-space
// perturbation (dx, dp) of the variational equations along.
template <bool WithTangent>
inline void classical_rk4_step(double& x, double& p, double& dx, double& dp, double t, double h,
                               const ModelParams& params) {
    auto f = [&params](double xx, double pp, double tt, double& ox, double& op) {
        ox = pp;
        op = -2.0 * params.gamma * pp - xx * xx * xx + xx + params.g * std::cos(params.omega * tt);
    };
    auto ftan = [&params](double xx, double dxx, double dpp, double& ox, double& op) {
        ox = dpp;
        op = -2.0 * params.gamma * dpp - (3.0 * xx * xx - 1.0) * dxx;
    };
    double k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
    double j1x = 0, j1p = 0, j2x = 0, j2p = 0, j3x = 0, j3p = 0, j4x = 0, j4p = 0;
    f(x, p, t, k1x, k1p);
    if (WithTangent) ftan(x, dx, dp, j1x, j1p);
    f(x + 0.5 * h * k1x, p + 0.5 * h * k1p, t + 0.5 * h, k2x, k2p);
    if (WithTangent) ftan(x + 0.5 * h * k1x, dx + 0.5 * h * j1x, dp + 0.5 * h * j1p, j2x, j2p);
    f(x + 0.5 * h * k2x, p + 0.5 * h * k2p, t + 0.5 * h, k3x, k3p);
    if (WithTangent) ftan(x + 0.5 * h * k2x, dx + 0.5 * h * j2x, dp + 0.5 * h * j2p, j3x, j3p);
    f(x + h * k3x, p + h * k3p, t + h, k4x, k4p);
    if (WithTangent) ftan(x + h * k3x, dx + h * j3x, dp + h * j3p, j4x, j4p);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    if (WithTangent) {
        dx += h / 6.0 * (j1x + 2.0 * j2x + 2.0 * j3x + j4x);
        dp += h / 6.0 * (j1p + 2.0 * j2p + 2.0 * j3p + j4p);
    }
}

// Step count per drive period for a period-commensurate grid near the
// requested dtau; Poincare samples then fall on exact grid points.
inline long steps_per_period(const ModelParams& params) {
    const long n = std::lround(params.drive_period() / params.dtau);
    return std::max<long>(1, n);
}

}  // namespace detail

/// Fixed-step RK4 integration with Poincare samples every drive period.
/// The step is snapped to an integer divisor of the period so section points
/// land on grid times. record_stride thins the dense trajectory output.
inline ClassicalTrajectory integrate_classical(const ModelParams& params, ClassicalState initial,
                                               double t_max, int record_stride = 10) {
    if (!(params.dtau > 0.0)) throw std::invalid_argument("integrate_classical: dtau must be > 0");
    const long per = detail::steps_per_period(params);
    const double h = params.drive_period() / static_cast<double>(per);
    const long n_steps = static_cast<long>(std::ceil(t_max / h));

    ClassicalTrajectory out;
    double x = initial.x, p = initial.p;
    double unused_dx = 0.0, unused_dp = 0.0;
    for (long step = 0;; ++step) {
        const double t = initial.t + step * h;
        if (step % record_stride == 0 || step == n_steps) {
            out.ts.push_back(t);
            out.xs.push_back(x);
            out.ps.push_back(p);
        }
        if (step % per == 0) out.poincare.push_back({x, p});
        if (step == n_steps) break;
        detail::classical_rk4_step<false>(x, p, unused_dx, unused_dp, t, h, params);
        if (!std::isfinite(x) || !std::isfinite(p)) throw NumericalBlowupError(t + h);
    }
    return out;
}

/// Maximal Lyapunov exponent by tangent-space renormalization: a unit
/// perturbation is carried along the variational equations and rescaled
/// every renorm_interval; the exponent is the mean log stretch rate.
inline double classical_lyapunov(const ModelParams& params, ClassicalState initial, double t_max,
                                 double renorm_interval = 0.0, double transient = 0.0) {
    const long per = detail::steps_per_period(params);
    const double h = params.drive_period() / static_cast<double>(per);
    if (renorm_interval <= 0.0) renorm_interval = params.drive_period();
    const long renorm_steps = std::max<long>(1, std::lround(renorm_interval / h));
    const long n_steps = static_cast<long>(std::ceil(t_max / h));
    const long transient_steps = static_cast<long>(std::ceil(transient / h));

    double x = initial.x, p = initial.p;
    double dx = 1.0 / std::sqrt(2.0), dp = 1.0 / std::sqrt(2.0);
    double log_sum = 0.0;
    long measured_steps = 0;
    for (long step = 0; step < n_steps; ++step) {
        const double t = initial.t + step * h;
        detail::classical_rk4_step<true>(x, p, dx, dp, t, h, params);
        if (!std::isfinite(x) || !std::isfinite(p)) throw NumericalBlowupError(t + h);
        const bool at_renorm = ((step + 1) % renorm_steps == 0) || step + 1 == n_steps;
        if (at_renorm) {
            const double r = std::hypot(dx, dp);
            if (step + 1 > transient_steps) {
                log_sum += std::log(r);
                measured_steps += renorm_steps;
            }
            dx /= r;
            dp /= r;
        }
    }
    if (measured_steps == 0) throw std::invalid_argument("classical_lyapunov: t_max too short");
    return log_sum / (static_cast<double>(measured_steps) * h);
}

}  // namespace qduff

#endif  // QDUFF_CLASSICAL_HPP
