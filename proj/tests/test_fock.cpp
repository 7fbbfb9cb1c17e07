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

#include "qduff/fock.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace qduff;
using Catch::Matchers::WithinAbs;

TEST_CASE("annihilation operator matrix elements") {
    SECTION("dim = 2 is [[0, 1], [0, 0]]") {
        const BandedOperator a = annihilation(2);
        CHECK(a.get(0, 0) == Complex{0.0, 0.0});
        CHECK(a.get(0, 1) == Complex{1.0, 0.0});
        CHECK(a.get(1, 0) == Complex{0.0, 0.0});
        CHECK(a.get(1, 1) == Complex{0.0, 0.0});
    }
    SECTION("dim = 4 superdiagonal is (1, sqrt 2, sqrt 3)") {
        const BandedOperator a = annihilation(4);
        CHECK_THAT(a.get(0, 1).real(), WithinAbs(1.0, 1e-15));
        CHECK_THAT(a.get(1, 2).real(), WithinAbs(std::sqrt(2.0), 1e-15));
        CHECK_THAT(a.get(2, 3).real(), WithinAbs(std::sqrt(3.0), 1e-15));
        CHECK(a.lower_bw() == 0);
        CHECK(a.upper_bw() == 1);
    }
    SECTION("dim < 2 rejected") {
        CHECK_THROWS_AS(annihilation(1), std::invalid_argument);
    }
}

TEST_CASE("[a, a^dag] on dim = 8 is diag(1,...,1,-7)") {
    const BandedOperator a = annihilation(8);
    const Eigen::MatrixXcd ad = test::to_dense(a);
    const Eigen::MatrixXcd comm = test::dense_commutator(ad, ad.adjoint());
    for (int i = 0; i < 8; ++i) {
        const double expected = (i == 7) ? -7.0 : 1.0;
        CHECK_THAT(comm(i, i).real(), WithinAbs(expected, 1e-13));
        CHECK_THAT(comm(i, i).imag(), WithinAbs(0.0, 1e-13));
    }
    // Truncation artifact confined to the top basis state.
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (i != j) CHECK_THAT(std::abs(comm(i, j)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("quadratures") {
    SECTION("dim = 2: Q = [[0, 1/sqrt2], [1/sqrt2, 0]]") {
        const auto [q, p] = quadratures(2);
        const double s = 1.0 / std::sqrt(2.0);
        CHECK_THAT(q.get(0, 1).real(), WithinAbs(s, 1e-15));
        CHECK_THAT(q.get(1, 0).real(), WithinAbs(s, 1e-15));
        CHECK(q.get(0, 0) == Complex{0.0, 0.0});
        CHECK_THAT(std::abs(p.get(0, 1) - Complex{0.0, -s}), WithinAbs(0.0, 1e-15));
    }
    SECTION("Hermitian as stored") {
        const auto [q, p] = quadratures(32);
        CHECK(q.hermiticity_defect() < 1e-14);
        CHECK(p.hermiticity_defect() < 1e-14);
    }
    SECTION("<0|Q^2|0> = 1/2 against the dense oracle") {
        const auto [q, p] = quadratures(8);
        StateVector vac(8);
        vac[0] = 1.0;
        const BandedOperator q2 = banded_multiply(q, q);
        CHECK_THAT(expectation(q2, vac).real(), WithinAbs(0.5, 1e-14));
        const Eigen::MatrixXcd qd = test::to_dense(q);
        const Complex oracle = test::dense_expectation(qd * qd, test::to_dense(vac));
        CHECK_THAT(expectation(q2, vac).real(), WithinAbs(oracle.real(), 1e-14));
        CHECK_THAT(oracle.real(), WithinAbs(test::gaussian_moment2(0.0, 0.5), 1e-14));
    }
    SECTION("[Q, P] on dim = 16 is (i,...,i,-15i) and local to the top state") {
        const auto [q, p] = quadratures(16);
        const Eigen::MatrixXcd comm =
            test::dense_commutator(test::to_dense(q), test::to_dense(p));
        for (int i = 0; i < 16; ++i) {
            const double expected = (i == 15) ? -15.0 : 1.0;
            CHECK_THAT(comm(i, i).imag(), WithinAbs(expected, 1e-13));
            CHECK_THAT(comm(i, i).real(), WithinAbs(0.0, 1e-13));
        }
        // [Q,P] - i I vanishes away from the last row/column.
        const Eigen::MatrixXcd defect =
            comm - Complex{0.0, 1.0} * Eigen::MatrixXcd::Identity(16, 16);
        for (int i = 0; i < 15; ++i)
            for (int j = 0; j < 15; ++j) CHECK(std::abs(defect(i, j)) < 1e-13);
    }
}

TEST_CASE("coherent states") {
    SECTION("alpha = 0 is the ground state") {
        const StateVector psi = coherent_state({0.0, 0.0}, 8);
        CHECK_THAT(std::abs(psi[0]), WithinAbs(1.0, 1e-15));
        for (int n = 1; n < 8; ++n) CHECK(std::abs(psi[n]) == 0.0);
    }
    SECTION("first moments: <Q> = sqrt(2) Re alpha, <P> = sqrt(2) Im alpha") {
        const Complex alpha{std::sqrt(2.0), 0.0};
        const StateVector psi = coherent_state(alpha, 64);
        const auto [q, p] = quadratures(64);
        CHECK_THAT(expectation(q, psi).real(), WithinAbs(2.0, 1e-10));
        CHECK_THAT(expectation(p, psi).real(), WithinAbs(0.0, 1e-10));

        const StateVector chi = coherent_state({0.5, 1.25}, 64);
        CHECK_THAT(expectation(q, chi).real(), WithinAbs(std::sqrt(2.0) * 0.5, 1e-10));
        CHECK_THAT(expectation(p, chi).real(), WithinAbs(std::sqrt(2.0) * 1.25, 1e-10));
    }
    SECTION("alpha = 1: sigma(a^dag, a) = 0") {
        const StateVector psi = coherent_state({1.0, 0.0}, 64);
        const BandedOperator a = annihilation(64);
        const StateVector apsi = a.apply(psi);
        const double n = apsi.inner(apsi).real();
        const Complex ae = psi.inner(apsi);
        CHECK_THAT(n - std::norm(ae), WithinAbs(0.0, 1e-10));
    }
    SECTION("truncation precondition enforced with required dim in the message") {
        CHECK_THROWS_WITH(coherent_state({4.0, 0.0}, 32),
                          Catch::Matchers::ContainsSubstring("need dim >="));
    }
    SECTION("pre-renormalization mass: Poisson head >= 1 - 1e-8 at the required dim") {
        for (const double a : {0.5, 1.7, 3.0, 7.5}) {
            const Complex alpha{a, 0.3 * a};
            const int dim = coherent_required_dim(alpha);
            const double tail = test::coherent_tail_mass(std::norm(alpha), dim);
            CHECK(tail < 1e-8);
            // Construction matches the Poisson law after renormalization.
            const StateVector psi = coherent_state(alpha, dim);
            const double head = 1.0 - tail;
            for (int n = 0; n < std::min(dim, 40); ++n) {
                const double pmf = std::exp(n * std::log(std::norm(alpha)) -
                                            std::lgamma(n + 1.0) - std::norm(alpha));
                CHECK_THAT(std::norm(psi[n]), WithinAbs(pmf / head, 1e-12));
            }
        }
    }
}

TEST_CASE("expectation values") {
    const auto [q, p] = quadratures(16);
    StateVector vac(16);
    vac[0] = 1.0;
    SECTION("<0|Q|0> = 0") { CHECK_THAT(std::abs(expectation(q, vac)), WithinAbs(0.0, 1e-15)); }
    SECTION("<3|a^dag a|3> = 3") {
        StateVector three(16);
        three[3] = 1.0;
        CHECK_THAT(expectation(number_operator(16), three).real(), WithinAbs(3.0, 1e-14));
    }
    SECTION("<0|Q^4|0> = 3/4 against the Gaussian oracle") {
        const BandedOperator q4 = banded_multiply(banded_multiply(q, q), banded_multiply(q, q));
        CHECK_THAT(expectation(q4, vac).real(), WithinAbs(0.75, 1e-14));
        CHECK_THAT(expectation(q4, vac).real(),
                   WithinAbs(test::gaussian_moment4(0.0, 0.5), 1e-14));
        CHECK(q4.lower_bw() == 4);
        CHECK(q4.upper_bw() == 4);
    }
    SECTION("dimension mismatch rejected") {
        StateVector other(8);
        other[0] = 1.0;
        CHECK_THROWS_AS(expectation(q, other), std::invalid_argument);
    }
    SECTION("Hermitian expectation is real") {
        std::mt19937_64 rng(7);
        for (int rep = 0; rep < 20; ++rep) {
            const StateVector psi = test::random_state(16, rng);
            CHECK(std::abs(expectation(q, psi).imag()) < 1e-12);
        }
    }
}

TEST_CASE("banded/dense equivalence on random states") {
    std::mt19937_64 rng(42);
    const int dim = 48;
    const auto [q, p] = quadratures(dim);
    const BandedOperator a = annihilation(dim);
    const BandedOperator q2 = banded_multiply(q, q);
    const BandedOperator q4 = banded_multiply(q2, q2);
    for (const BandedOperator* op : {&q, &p, &a, &q2, &q4}) {
        const Eigen::MatrixXcd dense = test::to_dense(*op);
        for (int rep = 0; rep < 100; ++rep) {
            const StateVector x = test::random_state(dim, rng);
            const StateVector y = op->apply(x);
            const Eigen::VectorXcd yd = dense * test::to_dense(x);
            double err = 0.0, scale = 0.0;
            for (int i = 0; i < dim; ++i) {
                err = std::max(err, std::abs(y[i] - yd(i)));
                scale = std::max(scale, std::abs(yd(i)));
            }
            CHECK(err <= 1e-13 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("banded multiply agrees with dense multiply") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    const int dim = 24;
    BandedOperator a(dim, 2, 1), b(dim, 1, 3);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if (a.in_band(i, j)) a.at(i, j) = Complex{normal(rng), normal(rng)};
            if (b.in_band(i, j)) b.at(i, j) = Complex{normal(rng), normal(rng)};
        }
    const BandedOperator c = banded_multiply(a, b);
    const Eigen::MatrixXcd cd = test::to_dense(a) * test::to_dense(b);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            CHECK_THAT(std::abs(c.get(i, j) - cd(i, j)), WithinAbs(0.0, 1e-12));
}
