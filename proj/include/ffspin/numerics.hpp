#pragma once

#include "ffspin/types.hpp"

#include <span>

namespace ffspin::numerics {

// Complex scalar kept as log-magnitude + phase so that products of thousands
// of O(1) factors neither underflow nor overflow.  Exact zero is a flag, not
// a -inf magnitude.
struct LogComplex {
    double log_magnitude = 0.0;
    double phase = 0.0;  // (-pi, pi]
    bool zero = false;

    static LogComplex one() { return {}; }
    static LogComplex zero_value() { return {0.0, 0.0, true}; }
    static LogComplex from(Complex z);

    LogComplex& operator*=(const LogComplex& o);
    friend LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }

    // Integer power (k >= 0).
    LogComplex pow(long long k) const;

    Complex value() const;
};

LogComplex stable_product(std::span<const Complex> factors);

struct EigResult {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // orthonormal columns, deterministic phases
};

// Dense Hermitian eigendecomposition.  Per-column phase is fixed by rotating
// the largest-magnitude component to the positive real axis; numerically
// equal eigenvalues are ordered by the index of that component.
EigResult hermitian_eig(const ComplexMatrix& m, double hermiticity_tol = 1e-12);

// Ascending eigenvalues only (cheaper than hermitian_eig for large inputs).
RealVector hermitian_eigenvalues(const ComplexMatrix& m, double hermiticity_tol = 1e-9);

// Orthonormal basis of the numerical kernel of a PSD matrix: eigenvectors
// with eigenvalue < tol * lambda_max.  A matrix that is zero to machine noise
// yields the full space.
ComplexMatrix kernel_basis(const ComplexMatrix& m, double tol);

struct PinvSqrtResult {
    ComplexMatrix inverse_sqrt;  // U diag(kept^-1/2) U^dagger, d x d
    int retained_rank = 0;
    // Compact pieces (retained eigenpairs only), handy when d is large.
    ComplexMatrix retained_basis;    // d x r
    RealVector retained_eigenvalues; // ascending, length r
};

// B = U diag(lambda) U^dagger with eigenvalues below cutoff * lambda_max
// dropped.  cutoff is relative, in (0,1).
PinvSqrtResult pinv_sqrt(const ComplexMatrix& b, double cutoff);

}  // namespace ffspin::numerics
