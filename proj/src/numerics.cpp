#include "ffspin/numerics.hpp"

#include <cmath>
#include <numbers>
#include <vector>

// LAPACK, column-major.
extern "C" {
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void dsbevd_(const char* jobz, const char* uplo, const int* n, const int* kd, double* ab,
             const int* ldab, double* w, double* z, const int* ldz, double* work,
             const int* lwork, int* iwork, const int* liwork, int* info);
}

namespace ffspin::numerics {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_phase(double p) {
    p = std::remainder(p, 2.0 * kPi);
    if (p <= -kPi) p += 2.0 * kPi;
    return p;
}

void eig_complex(ComplexMatrix& a, RealVector& w) {
    int n = static_cast<int>(a.rows());
    w.resize(n);
    int info = 0, lwork = -1, lrwork = -1, liwork = -1;
    Complex wkopt;
    double rwkopt;
    int iwkopt;
    zheevd_("V", "L", &n, a.data(), &n, w.data(), &wkopt, &lwork, &rwkopt, &lrwork,
            &iwkopt, &liwork, &info);
    lwork = static_cast<int>(wkopt.real());
    lrwork = static_cast<int>(rwkopt);
    liwork = iwkopt;
    std::vector<Complex> work(lwork);
    std::vector<double> rwork(lrwork);
    std::vector<int> iwork(liwork);
    zheevd_("V", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, rwork.data(),
            &lrwork, iwork.data(), &liwork, &info);
    if (info != 0) throw Error("zheevd failed, info=" + std::to_string(info));
}

void eig_real(Eigen::MatrixXd& a, RealVector& w) {
    int n = static_cast<int>(a.rows());
    w.resize(n);
    int info = 0, lwork = -1, liwork = -1;
    double wkopt;
    int iwkopt;
    dsyevd_("V", "L", &n, a.data(), &n, w.data(), &wkopt, &lwork, &iwkopt, &liwork, &info);
    lwork = static_cast<int>(wkopt);
    liwork = iwkopt;
    std::vector<double> work(lwork);
    std::vector<int> iwork(liwork);
    dsyevd_("V", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(),
            &liwork, &info);
    if (info != 0) throw Error("dsyevd failed, info=" + std::to_string(info));
}

// Banded storage, lower triangle: ab(i - j, j) = a(i, j), 0 <= i - j <= kd.
void eig_real_banded(const Eigen::MatrixXd& a, int kd, Eigen::MatrixXd& z, RealVector& w) {
    int n = static_cast<int>(a.rows());
    int ldab = kd + 1;
    Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(ldab, n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i <= std::min(n - 1, j + kd); ++i) ab(i - j, j) = a(i, j);
    w.resize(n);
    z.resize(n, n);
    int info = 0, lwork = -1, liwork = -1;
    double wkopt;
    int iwkopt;
    dsbevd_("V", "L", &n, &kd, ab.data(), &ldab, w.data(), z.data(), &n, &wkopt, &lwork,
            &iwkopt, &liwork, &info);
    lwork = static_cast<int>(wkopt);
    liwork = iwkopt;
    std::vector<double> work(lwork);
    std::vector<int> iwork(liwork);
    dsbevd_("V", "L", &n, &kd, ab.data(), &ldab, w.data(), z.data(), &n, work.data(),
            &lwork, iwork.data(), &liwork, &info);
    if (info != 0) throw Error("dsbevd failed, info=" + std::to_string(info));
}

// Hermitian circulant matrices (Gram matrices of uniformly spaced product
// families) diagonalize exactly in the Fourier basis.
bool is_circulant(const ComplexMatrix& a, double tol) {
    int n = static_cast<int>(a.rows());
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(a(i, j) - a(0, (j - i + n) % n)) > tol) return false;
    return true;
}

void eig_circulant(const ComplexMatrix& a, ComplexMatrix& vecs, RealVector& w) {
    int n = static_cast<int>(a.rows());
    std::vector<double> lambda(n);
    for (int m = 0; m < n; ++m) {
        Complex acc(0);
        for (int t = 0; t < n; ++t)
            acc += a(0, t) * std::exp(Complex(0, 2.0 * kPi * m * t / n));
        lambda[m] = acc.real();
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return lambda[x] < lambda[y]; });
    w.resize(n);
    vecs.resize(n, n);
    double norm = 1.0 / std::sqrt(double(n));
    for (int col = 0; col < n; ++col) {
        int m = order[col];
        w(col) = lambda[m];
        for (int j = 0; j < n; ++j)
            vecs(j, col) = norm * std::exp(Complex(0, 2.0 * kPi * m * j / n));
    }
}

// Index of the first strictly-largest-magnitude component.
int leading_index(const ComplexVector& v) {
    int best = 0;
    double best_mag = std::abs(v(0));
    for (int i = 1; i < v.size(); ++i) {
        double m = std::abs(v(i));
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    return best;
}

void canonicalize(EigResult& r) {
    int n = static_cast<int>(r.eigenvalues.size());
    std::vector<int> lead(n);
    for (int j = 0; j < n; ++j) {
        ComplexVector col = r.eigenvectors.col(j);
        int li = leading_index(col);
        Complex pivot = col(li);
        double mag = std::abs(pivot);
        if (mag > 0) r.eigenvectors.col(j) *= std::conj(pivot) / mag;
        lead[j] = li;
    }
    // Stable ordering inside numerically degenerate groups.
    double scale = std::max(1.0, r.eigenvalues.cwiseAbs().maxCoeff());
    double tie_tol = 1e-12 * scale;
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && r.eigenvalues(end) - r.eigenvalues(end - 1) <= tie_tol) ++end;
        if (end - start > 1) {
            std::vector<int> order(end - start);
            for (int i = 0; i < end - start; ++i) order[i] = start + i;
            std::stable_sort(order.begin(), order.end(),
                             [&](int x, int y) { return lead[x] < lead[y]; });
            ComplexMatrix cols(r.eigenvectors.rows(), end - start);
            RealVector vals(end - start);
            for (int i = 0; i < end - start; ++i) {
                cols.col(i) = r.eigenvectors.col(order[i]);
                vals(i) = r.eigenvalues(order[i]);
            }
            r.eigenvectors.middleCols(start, end - start) = cols;
            r.eigenvalues.segment(start, end - start) = vals;
        }
        start = end;
    }
}

}  // namespace

LogComplex LogComplex::from(Complex z) {
    double m = std::abs(z);
    if (m == 0.0) return zero_value();
    return {std::log(m), wrap_phase(std::arg(z)), false};
}

LogComplex& LogComplex::operator*=(const LogComplex& o) {
    if (zero || o.zero) {
        *this = zero_value();
        return *this;
    }
    log_magnitude += o.log_magnitude;
    phase = wrap_phase(phase + o.phase);
    return *this;
}

LogComplex LogComplex::pow(long long k) const {
    if (k == 0) return one();
    if (zero) return zero_value();
    return {log_magnitude * static_cast<double>(k),
            wrap_phase(phase * static_cast<double>(k)), false};
}

Complex LogComplex::value() const {
    if (zero) return Complex(0);
    double m = std::exp(log_magnitude);
    return Complex(m * std::cos(phase), m * std::sin(phase));
}

LogComplex stable_product(std::span<const Complex> factors) {
    LogComplex acc = LogComplex::one();
    for (Complex f : factors) acc *= LogComplex::from(f);
    return acc;
}

EigResult hermitian_eig(const ComplexMatrix& m, double hermiticity_tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw NonHermitianInput("hermitian_eig: matrix must be square and non-empty");
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tol * scale)
        throw NonHermitianInput("hermitian_eig: input is not Hermitian within tolerance");

    ComplexMatrix a = 0.5 * (m + m.adjoint());
    int n = static_cast<int>(a.rows());
    EigResult res;

    if (n >= 512 && is_circulant(a, 1e-11 * scale)) {
        eig_circulant(a, res.eigenvectors, res.eigenvalues);
        return res;  // Fourier modes are already deterministic
    }

    double max_imag = a.imag().cwiseAbs().maxCoeff();
    if (max_imag <= 1e-14 * scale) {
        Eigen::MatrixXd ar = a.real();
        // Large near-banded real matrices (Gram matrices of smooth product
        // families) go through the banded solver.
        int bw = 0;
        if (n > 512) {
            for (int j = 0; j < n && bw < n / 8 + 1; ++j)
                for (int i = j + bw + 1; i < n; ++i)
                    if (std::abs(ar(i, j)) > 1e-17 * scale) bw = std::max(bw, i - j);
        }
        if (n > 512 && bw <= n / 8) {
            Eigen::MatrixXd z;
            eig_real_banded(ar, bw, z, res.eigenvalues);
            res.eigenvectors = z.cast<Complex>();
        } else {
            eig_real(ar, res.eigenvalues);
            res.eigenvectors = ar.cast<Complex>();
        }
    } else {
        eig_complex(a, res.eigenvalues);
        res.eigenvectors = std::move(a);
    }
    canonicalize(res);
    return res;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m, double hermiticity_tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw NonHermitianInput("hermitian_eigenvalues: matrix must be square");
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tol * scale)
        throw NonHermitianInput("hermitian_eigenvalues: input is not Hermitian");
    ComplexMatrix a = 0.5 * (m + m.adjoint());
    int n = static_cast<int>(a.rows());
    RealVector w(n);
    int info = 0, lwork = -1, liwork = -1;

    if (a.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale) {
        Eigen::MatrixXd ar = a.real();
        double wkopt;
        int iwkopt;
        dsyevd_("N", "L", &n, ar.data(), &n, w.data(), &wkopt, &lwork, &iwkopt, &liwork,
                &info);
        lwork = static_cast<int>(wkopt);
        liwork = iwkopt;
        std::vector<double> work(lwork);
        std::vector<int> iwork(liwork);
        dsyevd_("N", "L", &n, ar.data(), &n, w.data(), work.data(), &lwork, iwork.data(),
                &liwork, &info);
    } else {
        int lrwork = -1;
        Complex wkopt;
        double rwkopt;
        int iwkopt;
        zheevd_("N", "L", &n, a.data(), &n, w.data(), &wkopt, &lwork, &rwkopt, &lrwork,
                &iwkopt, &liwork, &info);
        lwork = static_cast<int>(wkopt.real());
        lrwork = static_cast<int>(rwkopt);
        liwork = iwkopt;
        std::vector<Complex> work(lwork);
        std::vector<double> rwork(lrwork);
        std::vector<int> iwork(liwork);
        zheevd_("N", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, rwork.data(),
                &lrwork, iwork.data(), &liwork, &info);
    }
    if (info != 0) throw Error("eigenvalue solve failed, info=" + std::to_string(info));
    return w;
}

ComplexMatrix kernel_basis(const ComplexMatrix& m, double tol) {
    EigResult e = hermitian_eig(m, 1e-8);
    int n = static_cast<int>(e.eigenvalues.size());
    double lambda_max = std::max(e.eigenvalues(n - 1), 0.0);
    if (lambda_max < 1e-13) return e.eigenvectors;  // zero matrix: whole space
    int k = 0;
    while (k < n && e.eigenvalues(k) < tol * lambda_max) ++k;
    return e.eigenvectors.leftCols(k);
}

PinvSqrtResult pinv_sqrt(const ComplexMatrix& b, double cutoff) {
    EigResult e = hermitian_eig(b, 1e-8);
    int n = static_cast<int>(e.eigenvalues.size());
    double lambda_max = e.eigenvalues(n - 1);
    if (lambda_max < 1e-14) throw ZeroMatrix("pinv_sqrt: matrix is numerically zero");
    int first = 0;
    while (first < n && e.eigenvalues(first) < cutoff * lambda_max) ++first;
    int r = n - first;

    PinvSqrtResult out;
    out.retained_rank = r;
    out.retained_basis = e.eigenvectors.rightCols(r);
    out.retained_eigenvalues = e.eigenvalues.tail(r);
    RealVector inv_sqrt = out.retained_eigenvalues.array().rsqrt();
    out.inverse_sqrt = out.retained_basis * inv_sqrt.asDiagonal() *
                       out.retained_basis.adjoint();
    return out;
}

}  // namespace ffspin::numerics
