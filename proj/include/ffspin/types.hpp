#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <compare>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffspin {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Unordered site pair stored as (a, b) with a < b.
struct Edge {
    int a = 0;
    int b = 0;

    Edge() = default;
    Edge(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}

    bool contains(int s) const { return s == a || s == b; }
    int other(int s) const { return s == a ? b : a; }

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// ---- error types ----

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonHermitianInput : Error { using Error::Error; };
struct ZeroMatrix : Error { using Error::Error; };
struct DegenerateLattice : Error { using Error::Error; };
struct UnknownModel : Error { using Error::Error; };
struct RankOutOfRange : Error { using Error::Error; };
struct FullRankSingleSite : Error { using Error::Error; };
struct SharedSiteMismatch : Error { using Error::Error; };
struct NotNatural : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct FrustratedInput : Error { using Error::Error; };
struct FrustratedReference : Error { using Error::Error; };
struct InconsistentConstraints : Error { using Error::Error; };
struct SupportNotInRoots : Error { using Error::Error; };
struct NotAMatching : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// ---- fixed 2x2 / 4x4 building blocks ----

inline const Eigen::Matrix2cd& pauli_x() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    return m;
}
inline const Eigen::Matrix2cd& pauli_y() {
    static const Eigen::Matrix2cd m =
        (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    return m;
}
inline const Eigen::Matrix2cd& pauli_z() {
    static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    return m;
}
inline const Eigen::Matrix2cd& id2() {
    static const Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    return m;
}

// |Psi-> = (|01> - |10>)/sqrt(2), first tensor factor = first site.
inline const Eigen::Vector4cd& singlet_state() {
    static const Eigen::Vector4cd v = [] {
        Eigen::Vector4cd s;
        s << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
        return s;
    }();
    return v;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) return false;
    ComplexMatrix d = m.adjoint() * m - ComplexMatrix::Identity(m.cols(), m.cols());
    return d.norm() <= tol;
}

}  // namespace ffspin
