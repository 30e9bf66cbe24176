#include "doctest.h"

#include "ffspin/numerics.hpp"
#include "test_support.hpp"

#include <numbers>
#include <random>

using namespace ffspin;
using namespace ffspin::numerics;

TEST_CASE("hermitian_eig: Pauli Z") {
    auto r = hermitian_eig(pauli_z());
    CHECK(r.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(is_unitary(r.eigenvectors));
}

TEST_CASE("hermitian_eig: singlet projector spectrum") {
    ComplexMatrix p = singlet_state() * singlet_state().adjoint();
    auto r = hermitian_eig(p);
    CHECK(std::abs(r.eigenvalues(0)) < 1e-14);
    CHECK(std::abs(r.eigenvalues(1)) < 1e-14);
    CHECK(std::abs(r.eigenvalues(2)) < 1e-14);
    CHECK(r.eigenvalues(3) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermitian_eig: reconstruction for random matrices") {
    std::mt19937_64 rng(42);
    for (int n : {2, 3, 8, 17, 64}) {
        ComplexMatrix m = test::random_hermitian(n, rng);
        auto r = hermitian_eig(m);
        ComplexMatrix rec =
            r.eigenvectors * r.eigenvalues.asDiagonal() * r.eigenvectors.adjoint();
        double scale = m.cwiseAbs().maxCoeff();
        CHECK((rec - m).cwiseAbs().maxCoeff() < 1e-10 * scale);
        CHECK(is_unitary(r.eigenvectors));
        for (int i = 1; i < n; ++i) CHECK(r.eigenvalues(i) >= r.eigenvalues(i - 1));
    }
}

TEST_CASE("hermitian_eig: deterministic phases") {
    std::mt19937_64 rng(7);
    ComplexMatrix m = test::random_hermitian(6, rng);
    auto a = hermitian_eig(m);
    auto b = hermitian_eig(m);
    CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
    // largest-magnitude component of each column is real positive
    for (int j = 0; j < 6; ++j) {
        Eigen::Index imax;
        a.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
        Complex piv = a.eigenvectors(imax, j);
        CHECK(std::abs(piv.imag()) < 1e-12);
        CHECK(piv.real() > 0);
    }
}

TEST_CASE("hermitian_eig: rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(hermitian_eig(m), NonHermitianInput);
}

TEST_CASE("kernel_basis: singlet projector has the triplet kernel") {
    ComplexMatrix p = singlet_state() * singlet_state().adjoint();
    ComplexMatrix k = kernel_basis(p, 1e-9);
    REQUIRE(k.cols() == 3);
    CHECK((p * k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((k.adjoint() * k - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    // all kernel vectors are orthogonal to the singlet
    CHECK((singlet_state().adjoint() * k).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kernel_basis: zero matrix gives the full space") {
    ComplexMatrix z = ComplexMatrix::Zero(4, 4);
    CHECK(kernel_basis(z, 1e-9).cols() == 4);
}

TEST_CASE("kernel_basis: shifted Ising term") {
    ComplexMatrix h = -kron(pauli_z(), pauli_z()) + ComplexMatrix::Identity(4, 4);
    ComplexMatrix k = kernel_basis(h, 1e-9);
    REQUIRE(k.cols() == 2);
    // kernel = span{|00>, |11>}
    ComplexVector e00 = ComplexVector::Zero(4), e11 = ComplexVector::Zero(4);
    e00(0) = 1;
    e11(3) = 1;
    CHECK(std::abs((k.adjoint() * e00).norm() - 1.0) < 1e-12);
    CHECK(std::abs((k.adjoint() * e11).norm() - 1.0) < 1e-12);
}

TEST_CASE("kernel_basis: rank + kernel dimension = dim (property)") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);
        ComplexMatrix full = test::random_psd(n, rng);
        // zero out a random number of directions
        auto eig = hermitian_eig(full);
        int zeros = static_cast<int>(rng() % n);
        RealVector vals = eig.eigenvalues;
        for (int i = 0; i < zeros; ++i) vals(i) = 0.0;
        ComplexMatrix m = eig.eigenvectors * vals.asDiagonal() * eig.eigenvectors.adjoint();
        ComplexMatrix k = kernel_basis(m, 1e-9);
        RealVector w = hermitian_eigenvalues(m, 1e-8);
        double lambda_max = w(w.size() - 1);
        int rank = 0;
        for (int i = 0; i < w.size(); ++i)
            if (w(i) >= 1e-9 * lambda_max) ++rank;
        CHECK(rank + static_cast<int>(k.cols()) == n);
        // every returned vector is numerically annihilated
        if (k.cols() > 0) CHECK((m * k).cwiseAbs().maxCoeff() < 1e-8 * lambda_max);
    }
}

TEST_CASE("pinv_sqrt: identity") {
    auto r = pinv_sqrt(ComplexMatrix::Identity(5, 5), 1e-6);
    CHECK(r.retained_rank == 5);
    CHECK((r.inverse_sqrt - ComplexMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pinv_sqrt: diag(4,1,0)") {
    ComplexMatrix b = ComplexMatrix::Zero(3, 3);
    b(0, 0) = 4;
    b(1, 1) = 1;
    auto r = pinv_sqrt(b, 1e-6);
    CHECK(r.retained_rank == 2);
    CHECK(std::abs(r.inverse_sqrt(0, 0) - Complex(0.5)) < 1e-12);
    CHECK(std::abs(r.inverse_sqrt(1, 1) - Complex(1.0)) < 1e-12);
    CHECK(std::abs(r.inverse_sqrt(2, 2)) < 1e-12);
}

TEST_CASE("pinv_sqrt: R B R is the projector onto the retained span") {
    // Gram matrix of 4 Bloch-circle product states on 3 spins
    int n_states = 4, n_spins = 3;
    std::vector<ComplexVector> states;
    for (int j = 0; j < n_states; ++j) {
        double theta = j * std::numbers::pi / n_states;
        Eigen::Vector2cd a;
        a << std::cos(theta), std::sin(theta);
        ComplexVector s = ComplexVector::Ones(1);
        for (int k = 0; k < n_spins; ++k) s = kron(s, a);
        states.push_back(s);
    }
    ComplexMatrix b(n_states, n_states);
    for (int i = 0; i < n_states; ++i)
        for (int j = 0; j < n_states; ++j) b(i, j) = states[i].dot(states[j]);
    auto r = pinv_sqrt(b, 1e-10);
    ComplexMatrix proj = r.retained_basis * r.retained_basis.adjoint();
    CHECK((r.inverse_sqrt * b * r.inverse_sqrt - proj).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pinv_sqrt: zero matrix rejected") {
    CHECK_THROWS_AS(pinv_sqrt(ComplexMatrix::Zero(3, 3), 1e-6), ZeroMatrix);
}

TEST_CASE("stable_product: examples") {
    std::vector<Complex> f1 = {2.0, 3.0, 0.5};
    auto r1 = stable_product(f1);
    CHECK(r1.log_magnitude == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(std::abs(r1.phase) < 1e-14);
    CHECK(!r1.zero);

    std::vector<Complex> f2(1000, Complex(0.9));
    auto r2 = stable_product(f2);
    CHECK(r2.log_magnitude == doctest::Approx(1000.0 * std::log(0.9)).epsilon(1e-12));

    std::vector<Complex> f3 = {Complex(0, 1), Complex(0, 1)};
    auto r3 = stable_product(f3);
    CHECK(r3.log_magnitude == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(r3.phase - std::numbers::pi) < 1e-14);

    std::vector<Complex> f4 = {1.0, 0.0, 5.0};
    CHECK(stable_product(f4).zero);
}

TEST_CASE("stable_product: agrees with naive multiplication") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng() % 12);
        std::vector<Complex> f(n);
        Complex naive(1.0);
        for (auto& z : f) {
            z = Complex(gauss(rng), gauss(rng));
            naive *= z;
        }
        Complex viaLog = stable_product(f).value();
        CHECK(std::abs(viaLog - naive) < 1e-12 * std::max(1.0, std::abs(naive)));
    }
}
