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

#ifndef QDUFF_MODEL_HPP
#define QDUFF_MODEL_HPP

#include <cmath>
#include <stdexcept>

#include "qduff/fock.hpp"

namespace qduff {

/// Dimensionless parameters of the quantized Duffing oscillator plus the
/// numerical controls. Time is measured in units of 1/omega_0.
struct ModelParams {
    double beta = 1.0;     // scaling parameter; beta^2 = hbar / characteristic action
    double gamma = 0.125;  // damping
    double g = 0.3;        // drive amplitude
    double omega = 1.0;    // drive frequency
    int dim = 64;          // Fock truncation
    double dtau = 1e-3;    // time step
    double tau_max = 10.0;

    double drive_period() const { return 2.0 * M_PI / omega; }

    void validate() const {
        if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
        if (!(gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be >= 0");
        if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be > 0");
        if (!(dtau > 0.0 && dtau <= 1e-2))
            throw std::invalid_argument("ModelParams: dtau must be in (0, 1e-2]");
        if (dim < 2) throw std::invalid_argument("ModelParams: dim must be >= 2");
        if (!(tau_max > 0.0)) throw std::invalid_argument("ModelParams: tau_max must be > 0");
    }
};

/// Drive prefactor -(g/beta) cos(Omega tau); the full drive term is this
/// scalar times Q.
inline double drive_amplitude(const ModelParams& params, double tau) {
    if (params.beta == 0.0) throw std::invalid_argument("drive_amplitude: beta is zero");
    return -(params.g / params.beta) * std::cos(params.omega * tau);
}

/// H_D + H_R = P^2/2 + (beta^2/4) Q^4 - Q^2/2 + (Gamma/2)(QP + PQ).
/// Bandwidth 4 (from Q^4), Hermitian.
inline BandedOperator build_hamiltonian_static(const ModelParams& params) {
    params.validate();
    auto [q, p] = quadratures(params.dim);
    const BandedOperator q2 = banded_multiply(q, q);
    const BandedOperator q4 = banded_multiply(q2, q2);
    const BandedOperator p2 = banded_multiply(p, p);
    const BandedOperator qp = banded_multiply(q, p);
    const BandedOperator pq = banded_multiply(p, q);

    BandedOperator h(params.dim, 4, 4);
    h += 0.5 * p2;
    h += Complex{0.25 * params.beta * params.beta, 0.0} * q4;
    h += Complex{-0.5, 0.0} * q2;
    BandedOperator hr(params.dim, 2, 2);
    hr += qp;
    hr += pq;
    h += Complex{0.5 * params.gamma, 0.0} * hr;
    return h;
}

/// K = sqrt(2 Gamma) a. Built directly from the ladder operator so the
/// identity K = sqrt(Gamma)(Q + iP) holds exactly on the truncated basis.
inline BandedOperator build_lindblad(const ModelParams& params) {
    if (!(params.gamma >= 0.0)) throw std::invalid_argument("build_lindblad: gamma must be >= 0");
    BandedOperator k = annihilation(params.dim);
    k *= std::sqrt(2.0 * params.gamma);
    return k;
}

/// Operators needed to step the model. h_static excludes the drive; the
/// time-dependent part is drive_amplitude(tau) * q_op.
struct ModelOperators {
    BandedOperator h_static;
    BandedOperator q_op;
    BandedOperator p_op;
    BandedOperator a_op;
    BandedOperator k_op;
    BandedOperator k_dag_k;

    static ModelOperators build(const ModelParams& params) {
        params.validate();
        ModelOperators ops;
        ops.h_static = build_hamiltonian_static(params);
        auto [q, p] = quadratures(params.dim);
        ops.q_op = std::move(q);
        ops.p_op = std::move(p);
        ops.a_op = annihilation(params.dim);
        ops.k_op = build_lindblad(params);
        ops.k_dag_k = banded_multiply(ops.k_op.adjoint(), ops.k_op);
        return ops;
    }

    /// Gershgorin bound on the Hamiltonian spectral radius including the
    /// worst-case drive; the integrator uses it to guard the step size.
    double hamiltonian_radius(const ModelParams& params) const {
        return h_static.gershgorin_radius() +
               std::abs(params.g / params.beta) * q_op.gershgorin_radius();
    }
};

}  // namespace qduff

#endif  // QDUFF_MODEL_HPP
