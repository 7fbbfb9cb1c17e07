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

#ifndef QDUFF_LINDBLAD_HPP
#define QDUFF_LINDBLAD_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qduff/model.hpp"
#include "qduff/qsd.hpp"

namespace qduff {

/// Integration step too large for the density-matrix evolution.
class StepSizeError : public NumericalError {
  public:
    StepSizeError(const std::string& what, double tau) : NumericalError(what, tau) {}
};

/// Dense density matrix; the deterministic ensemble-average oracle only needs
/// small dimensions, so no sparsity is attempted.
class DensityMatrix {
  public:
    DensityMatrix() = default;
    explicit DensityMatrix(int dim) : dim_(dim), m_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 2) throw std::invalid_argument("DensityMatrix: dim must be >= 2");
    }

    static DensityMatrix pure(const StateVector& psi) {
        DensityMatrix rho(psi.dim());
        for (int i = 0; i < psi.dim(); ++i)
            for (int j = 0; j < psi.dim(); ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
        return rho;
    }

    int dim() const { return dim_; }
    Complex& operator()(int i, int j) { return m_[static_cast<std::size_t>(i) * dim_ + j]; }
    const Complex& operator()(int i, int j) const {
        return m_[static_cast<std::size_t>(i) * dim_ + j];
    }
    std::vector<Complex>& data() { return m_; }
    const std::vector<Complex>& data() const { return m_; }

    Complex trace() const {
        Complex t{0.0, 0.0};
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double purity() const {
        // Tr{rho^2} for Hermitian rho.
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += ((*this)(i, j) * (*this)(j, i)).real();
        return s;
    }

    double hermiticity_defect() const {
        double worst = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return worst;
    }

    double min_eigenvalue() const {
        Eigen::MatrixXcd m(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    /// Tr{A rho} for banded A; O(dim * bandwidth).
    Complex moment(const BandedOperator& a) const {
        if (a.dim() != dim_) throw std::invalid_argument("DensityMatrix::moment: dim mismatch");
        Complex t{0.0, 0.0};
        for (int k = -a.lower_bw(); k <= a.upper_bw(); ++k) {
            const int i0 = std::max(0, -k);
            const int i1 = dim_ - std::max(0, k);
            for (int i = i0; i < i1; ++i) t += a.get(i, i + k) * (*this)(i + k, i);
        }
        return t;
    }

  private:
    int dim_ = 0;
    std::vector<Complex> m_;
};

namespace detail {

// out += c * (A m) with banded A: row i of out accumulates A(i, i+k) * row(i+k).
inline void banded_left_add(Complex c, const BandedOperator& a, const DensityMatrix& m,
                            DensityMatrix& out) {
    const int dim = m.dim();
    for (int k = -a.lower_bw(); k <= a.upper_bw(); ++k) {
        const int i0 = std::max(0, -k);
        const int i1 = dim - std::max(0, k);
        for (int i = i0; i < i1; ++i) {
            const Complex f = c * a.get(i, i + k);
            if (f == Complex{0.0, 0.0}) continue;
            const Complex* src = &m(i + k, 0);
            Complex* dst = &out(i, 0);
            for (int j = 0; j < dim; ++j) dst[j] += f * src[j];
        }
    }
}

// out += c * (m A) with banded A: column j of out accumulates m col(j-k) * A(j-k, j).
inline void banded_right_add(Complex c, const DensityMatrix& m, const BandedOperator& a,
                             DensityMatrix& out) {
    const int dim = m.dim();
    for (int k = -a.lower_bw(); k <= a.upper_bw(); ++k) {
        const int j0 = std::max(0, k);
        const int j1 = (k > 0) ? dim : dim + k;
        for (int i = 0; i < dim; ++i) {
            const Complex* src = &m(i, 0);
            Complex* dst = &out(i, 0);
            for (int j = j0; j < j1; ++j) dst[j] += c * src[j - k] * a.get(j - k, j);
        }
    }
}

}  // namespace detail

/// Right-hand side of the Lindblad master equation in dimensionless form:
///   drho/dtau = -i[H(tau), rho] + K rho K^dag - 1/2 {K^dag K, rho}.
/// Trace-free and Hermiticity-preserving by construction.
inline DensityMatrix lindblad_rhs(const DensityMatrix& rho, const ModelOperators& ops,
                                  const ModelParams& params, double tau,
                                  bool hamiltonian_enabled = true) {
    if (rho.dim() != params.dim) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    const int dim = rho.dim();
    DensityMatrix out(dim);

    if (hamiltonian_enabled) {
        const Complex minus_i{0.0, -1.0};
        const Complex plus_i{0.0, 1.0};
        detail::banded_left_add(minus_i, ops.h_static, rho, out);
        detail::banded_right_add(plus_i, rho, ops.h_static, out);
        const double c = drive_amplitude(params, tau);
        detail::banded_left_add(minus_i * c, ops.q_op, rho, out);
        detail::banded_right_add(plus_i * c, rho, ops.q_op, out);
    }

    // K rho K^dag via tmp = K rho, then tmp K^dag.
    DensityMatrix tmp(dim);
    detail::banded_left_add({1.0, 0.0}, ops.k_op, rho, tmp);
    const BandedOperator k_dag = ops.k_op.adjoint();
    detail::banded_right_add({1.0, 0.0}, tmp, k_dag, out);

    detail::banded_left_add({-0.5, 0.0}, ops.k_dag_k, rho, out);
    detail::banded_right_add({-0.5, 0.0}, rho, ops.k_dag_k, out);
    return out;
}

/// Moment series recorded along a density-matrix evolution.
struct MomentSeries {
    std::vector<double> taus;
    std::vector<double> q;       // Tr{Q rho}
    std::vector<double> p;       // Tr{P rho}
    std::vector<double> q3;      // Tr{Q^3 rho}
    std::vector<double> n;       // Tr{a^dag a rho}
    std::vector<double> hd;      // Tr{H_D rho}
    std::vector<double> purity;  // Tr{rho^2}
};

struct DensityEvolution {
    MomentSeries moments;
    std::vector<std::pair<double, DensityMatrix>> snapshots;
};

/// Integrates the master equation with classical RK4. Snapshots are validated
/// (Hermiticity, unit trace, positivity); a positivity defect beyond -1e-6
/// raises StepSizeError. Guarded to dim <= 128: the oracle role only needs
/// small bases.
inline DensityEvolution evolve_density(const ModelParams& params, const DensityMatrix& rho0,
                                       double tau_max, int record_stride = 10,
                                       int snapshot_stride = 1000,
                                       bool hamiltonian_enabled = true) {
    params.validate();
    if (params.dim > 128)
        throw std::invalid_argument("evolve_density: dim > 128 (dense-oracle guard)");
    if (rho0.dim() != params.dim)
        throw std::invalid_argument("evolve_density: rho/params dimension mismatch");

    const ModelOperators ops = ModelOperators::build(params);
    const BandedOperator q3 =
        banded_multiply(banded_multiply(ops.q_op, ops.q_op), ops.q_op);
    const BandedOperator num = number_operator(params.dim);
    ModelParams hd_params = params;
    hd_params.gamma = 0.0;
    const BandedOperator h_d = build_hamiltonian_static(hd_params);

    const long n_steps = static_cast<long>(std::ceil(tau_max / params.dtau));
    const double h = params.dtau;
    const int dim = params.dim;

    DensityEvolution out;
    DensityMatrix rho = rho0;

    auto validate_snapshot = [&](double tau) {
        const double herm = rho.hermiticity_defect();
        if (herm > 1e-12)
            throw StepSizeError("density matrix lost Hermiticity (defect " +
                                    std::to_string(herm) + ")",
                                tau);
        const double tr_err = std::abs(rho.trace() - Complex{1.0, 0.0});
        if (tr_err > 1e-10)
            throw StepSizeError("density matrix trace drifted by " + std::to_string(tr_err), tau);
        const double min_eig = rho.min_eigenvalue();
        if (min_eig < -1e-6)
            throw StepSizeError("density matrix positivity violated (min eigenvalue " +
                                    std::to_string(min_eig) + "); reduce dtau",
                                tau);
    };

    for (long step = 0;; ++step) {
        const double tau = step * h;
        if (step % record_stride == 0 || step == n_steps) {
            out.moments.taus.push_back(tau);
            out.moments.q.push_back(rho.moment(ops.q_op).real());
            out.moments.p.push_back(rho.moment(ops.p_op).real());
            out.moments.q3.push_back(rho.moment(q3).real());
            out.moments.n.push_back(rho.moment(num).real());
            out.moments.hd.push_back(rho.moment(h_d).real());
            out.moments.purity.push_back(rho.purity());
        }
        if (step % snapshot_stride == 0 || step == n_steps) {
            validate_snapshot(tau);
            out.snapshots.emplace_back(tau, rho);
        }
        if (step == n_steps) break;

        const DensityMatrix k1 = lindblad_rhs(rho, ops, params, tau, hamiltonian_enabled);
        DensityMatrix stage(dim);
        for (std::size_t idx = 0; idx < rho.data().size(); ++idx)
            stage.data()[idx] = rho.data()[idx] + 0.5 * h * k1.data()[idx];
        const DensityMatrix k2 = lindblad_rhs(stage, ops, params, tau + 0.5 * h, hamiltonian_enabled);
        for (std::size_t idx = 0; idx < rho.data().size(); ++idx)
            stage.data()[idx] = rho.data()[idx] + 0.5 * h * k2.data()[idx];
        const DensityMatrix k3 = lindblad_rhs(stage, ops, params, tau + 0.5 * h, hamiltonian_enabled);
        for (std::size_t idx = 0; idx < rho.data().size(); ++idx)
            stage.data()[idx] = rho.data()[idx] + h * k3.data()[idx];
        const DensityMatrix k4 = lindblad_rhs(stage, ops, params, tau + h, hamiltonian_enabled);

        const double h6 = h / 6.0;
        double diag_sum = 0.0;
        for (std::size_t idx = 0; idx < rho.data().size(); ++idx) {
            rho.data()[idx] += h6 * (k1.data()[idx] + 2.0 * k2.data()[idx] + 2.0 * k3.data()[idx] +
                                     k4.data()[idx]);
        }
        for (int i = 0; i < dim; ++i) diag_sum += std::abs(rho(i, i));
        if (!std::isfinite(diag_sum)) throw NumericalBlowupError(tau + h);
    }
    return out;
}

}  // namespace qduff

#endif  // QDUFF_LINDBLAD_HPP
