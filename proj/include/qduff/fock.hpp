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

#ifndef QDUFF_FOCK_HPP
#define QDUFF_FOCK_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qduff {

using Complex = std::complex<double>;

/// A point in the scaled phase space (<Q>, <P>).
struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
};

/// Normalized pure state over a truncated Fock basis |0>..|dim-1>.
class StateVector {
  public:
    StateVector() = default;

    explicit StateVector(int dim) : amps_(check_dim(dim)) {}

    StateVector(int dim, std::vector<Complex> amps) : amps_(std::move(amps)) {
        check_dim(dim);
        if (static_cast<int>(amps_.size()) != dim)
            throw std::invalid_argument("StateVector: amplitude count != dim");
    }

    int dim() const { return static_cast<int>(amps_.size()); }

    Complex& operator[](int n) { return amps_[static_cast<std::size_t>(n)]; }
    const Complex& operator[](int n) const { return amps_[static_cast<std::size_t>(n)]; }

    std::span<Complex> amps() { return amps_; }
    std::span<const Complex> amps() const { return amps_; }

    double norm() const {
        double s = 0.0;
        for (const Complex& c : amps_) s += std::norm(c);
        return std::sqrt(s);
    }

    void normalize() {
        const double n = norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::runtime_error("StateVector::normalize: zero or non-finite norm");
        const double inv = 1.0 / n;
        for (Complex& c : amps_) c *= inv;
    }

    /// <this|other>, conjugating this.
    Complex inner(const StateVector& other) const {
        if (other.dim() != dim())
            throw std::invalid_argument("StateVector::inner: dimension mismatch");
        Complex s{0.0, 0.0};
        for (int n = 0; n < dim(); ++n) s += std::conj(amps_[n]) * other.amps_[n];
        return s;
    }

  private:
    static int check_dim(int dim) {
        if (dim < 2) throw std::invalid_argument("StateVector: dim must be >= 2");
        return dim;
    }

    std::vector<Complex> amps_;
};

/// Complex banded matrix stored by diagonal. Entry (i, i+k) for diagonal
/// offset k in [-lower_bw, upper_bw] lives at data[(k+lower_bw)*dim + i].
/// All model operators here have bandwidth <= 4, so matrix-vector products
/// are O(dim).
class BandedOperator {
  public:
    BandedOperator() = default;

    BandedOperator(int dim, int lower_bw, int upper_bw)
        : dim_(dim), kl_(lower_bw), ku_(upper_bw),
          data_(static_cast<std::size_t>(lower_bw + upper_bw + 1) * static_cast<std::size_t>(dim)) {
        if (dim < 1) throw std::invalid_argument("BandedOperator: dim must be >= 1");
        if (lower_bw < 0 || upper_bw < 0)
            throw std::invalid_argument("BandedOperator: negative bandwidth");
    }

    int dim() const { return dim_; }
    int lower_bw() const { return kl_; }
    int upper_bw() const { return ku_; }

    bool in_band(int i, int j) const {
        const int k = j - i;
        return k >= -kl_ && k <= ku_;
    }

    /// Mutable access to entry (i, i+k); (i, j) must be inside the band.
    Complex& at(int i, int j) {
        if (i < 0 || j < 0 || i >= dim_ || j >= dim_ || !in_band(i, j))
            throw std::out_of_range("BandedOperator::at: index outside band");
        return data_[static_cast<std::size_t>(j - i + kl_) * dim_ + i];
    }

    /// Entry (i, j); zero outside the band.
    Complex get(int i, int j) const {
        if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
            throw std::out_of_range("BandedOperator::get: index out of range");
        if (!in_band(i, j)) return {0.0, 0.0};
        return data_[static_cast<std::size_t>(j - i + kl_) * dim_ + i];
    }

    const Complex* diagonal(int k) const {
        return data_.data() + static_cast<std::size_t>(k + kl_) * dim_;
    }

    /// y = A x.
    void apply(std::span<const Complex> x, std::span<Complex> y) const {
        if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
            throw std::invalid_argument("BandedOperator::apply: dimension mismatch");
        std::fill(y.begin(), y.end(), Complex{0.0, 0.0});
        for (int k = -kl_; k <= ku_; ++k) {
            const Complex* d = diagonal(k);
            const int i0 = std::max(0, -k);
            const int i1 = dim_ - std::max(0, k);
            for (int i = i0; i < i1; ++i) y[i] += d[i] * x[i + k];
        }
    }

    /// y += c * (A x).
    void apply_add(Complex c, std::span<const Complex> x, std::span<Complex> y) const {
        if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
            throw std::invalid_argument("BandedOperator::apply_add: dimension mismatch");
        for (int k = -kl_; k <= ku_; ++k) {
            const Complex* d = diagonal(k);
            const int i0 = std::max(0, -k);
            const int i1 = dim_ - std::max(0, k);
            for (int i = i0; i < i1; ++i) y[i] += c * (d[i] * x[i + k]);
        }
    }

    StateVector apply(const StateVector& x) const {
        StateVector y(dim_);
        apply(x.amps(), y.amps());
        return y;
    }

    BandedOperator adjoint() const {
        BandedOperator out(dim_, ku_, kl_);
        for (int k = -kl_; k <= ku_; ++k) {
            const int i0 = std::max(0, -k);
            const int i1 = dim_ - std::max(0, k);
            for (int i = i0; i < i1; ++i) out.at(i + k, i) = std::conj(get(i, i + k));
        }
        return out;
    }

    /// max |A - A^dagger| over the band.
    double hermiticity_defect() const {
        double worst = 0.0;
        const int bw = std::max(kl_, ku_);
        for (int k = 0; k <= bw; ++k) {
            for (int i = 0; i + k < dim_; ++i) {
                const Complex upper = get(i, i + k);
                const Complex lower = get(i + k, i);
                worst = std::max(worst, std::abs(upper - std::conj(lower)));
            }
        }
        return worst;
    }

    /// Gershgorin bound on the spectral radius; used for step-size guards.
    double gershgorin_radius() const {
        double worst = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double row = 0.0;
            for (int k = -kl_; k <= ku_; ++k) {
                const int j = i + k;
                if (j >= 0 && j < dim_) row += std::abs(get(i, j));
            }
            worst = std::max(worst, row);
        }
        return worst;
    }

    BandedOperator& operator*=(Complex c) {
        for (Complex& v : data_) v *= c;
        return *this;
    }

    BandedOperator& operator+=(const BandedOperator& other) {
        if (other.dim_ != dim_)
            throw std::invalid_argument("BandedOperator::operator+=: dimension mismatch");
        if (other.kl_ > kl_ || other.ku_ > ku_)
            throw std::invalid_argument("BandedOperator::operator+=: band too wide");
        for (int k = -other.kl_; k <= other.ku_; ++k) {
            const int i0 = std::max(0, -k);
            const int i1 = dim_ - std::max(0, k);
            for (int i = i0; i < i1; ++i) at(i, i + k) += other.get(i, i + k);
        }
        return *this;
    }

  private:
    int dim_ = 0;
    int kl_ = 0;
    int ku_ = 0;
    std::vector<Complex> data_;
};

inline BandedOperator operator*(Complex c, BandedOperator a) {
    a *= c;
    return a;
}

/// C = A B. The product band is the sum of the factor bands.
inline BandedOperator banded_multiply(const BandedOperator& a, const BandedOperator& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("banded_multiply: dimension mismatch");
    const int dim = a.dim();
    BandedOperator c(dim, std::min(dim - 1, a.lower_bw() + b.lower_bw()),
                     std::min(dim - 1, a.upper_bw() + b.upper_bw()));
    for (int i = 0; i < dim; ++i) {
        const int m0 = std::max(0, i - a.lower_bw());
        const int m1 = std::min(dim - 1, i + a.upper_bw());
        for (int m = m0; m <= m1; ++m) {
            const Complex aim = a.get(i, m);
            if (aim == Complex{0.0, 0.0}) continue;
            const int j0 = std::max(0, m - b.lower_bw());
            const int j1 = std::min(dim - 1, m + b.upper_bw());
            for (int j = j0; j <= j1; ++j) {
                if (c.in_band(i, j)) c.at(i, j) += aim * b.get(m, j);
            }
        }
    }
    return c;
}

/// a|n> = sqrt(n)|n-1>: single superdiagonal.
inline BandedOperator annihilation(int dim) {
    if (dim < 2) throw std::invalid_argument("annihilation: dim must be >= 2");
    BandedOperator a(dim, 0, 1);
    for (int n = 0; n + 1 < dim; ++n) a.at(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    return a;
}

/// a^dagger a: diagonal (0, 1, ..., dim-1).
inline BandedOperator number_operator(int dim) {
    if (dim < 2) throw std::invalid_argument("number_operator: dim must be >= 2");
    BandedOperator n(dim, 0, 0);
    for (int k = 0; k < dim; ++k) n.at(k, k) = static_cast<double>(k);
    return n;
}

struct Quadratures {
    BandedOperator q;
    BandedOperator p;
};

/// Q = (a + a^dagger)/sqrt(2), P = (a - a^dagger)/(i sqrt(2)). Both Hermitian,
/// tridiagonal; [Q, P] = i except in the last basis state (truncation).
inline Quadratures quadratures(int dim) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    BandedOperator q(dim, 1, 1);
    BandedOperator p(dim, 1, 1);
    for (int n = 0; n + 1 < dim; ++n) {
        const double s = std::sqrt(static_cast<double>(n + 1)) * inv_sqrt2;
        q.at(n, n + 1) = s;
        q.at(n + 1, n) = s;
        p.at(n, n + 1) = Complex{0.0, -s};
        p.at(n + 1, n) = Complex{0.0, s};
    }
    return {std::move(q), std::move(p)};
}

/// Basis size needed to hold a coherent state of amplitude alpha with the
/// top-level population safely below 1e-8. The vacuum has no tail at all and
/// fits any basis.
inline int coherent_required_dim(Complex alpha) {
    const double a = std::abs(alpha);
    if (a == 0.0) return 2;
    return static_cast<int>(std::ceil(a * a + 10.0 * a + 20.0));
}

/// Coherent state c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), renormalized on
/// the truncated basis. Amplitudes are evaluated in log space so large |alpha|
/// cannot overflow the factorial.
inline StateVector coherent_state(Complex alpha, int dim) {
    if (dim < 2) throw std::invalid_argument("coherent_state: dim must be >= 2");
    const int needed = coherent_required_dim(alpha);
    if (needed > dim)
        throw std::invalid_argument("coherent_state: truncated basis too small, need dim >= " +
                                    std::to_string(needed) + " for |alpha| = " +
                                    std::to_string(std::abs(alpha)));
    StateVector psi(dim);
    const double a = std::abs(alpha);
    if (a == 0.0) {
        psi[0] = 1.0;
        return psi;
    }
    const double log_a = std::log(a);
    const double phase = std::arg(alpha);
    for (int n = 0; n < dim; ++n) {
        const double log_mag = n * log_a - 0.5 * std::lgamma(n + 1.0) - 0.5 * a * a;
        psi[n] = std::polar(std::exp(log_mag), phase * n);
    }
    psi.normalize();
    return psi;
}

/// <psi|op|psi>.
inline Complex expectation(const BandedOperator& op, const StateVector& state) {
    if (op.dim() != state.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    return state.inner(op.apply(state));
}

}  // namespace qduff

#endif  // QDUFF_FOCK_HPP
