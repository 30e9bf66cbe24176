#include "ffspin/oracle.hpp"

#include "ffspin/numerics.hpp"

#include <numeric>
#include <random>

namespace ffspin::oracle {

namespace {

constexpr double kDegeneracyGap = 1e-7;

ComplexVector random_state(std::uint64_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(dim);
    for (std::uint64_t i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    return v;
}

void orthogonalize(ComplexVector& v, const std::vector<ComplexVector>& basis) {
    for (const auto& b : basis) v -= b.dot(v) * b;
}

// Lanczos with full reorthogonalization and explicit deflation; finds the
// lowest eigenpair of H restricted to the orthocomplement of `deflate`.
bool lanczos_lowest(const AssembledHamiltonian& h, const std::vector<ComplexVector>& deflate,
                    const OracleOptions& opts, unsigned seed, double& lambda,
                    ComplexVector& vec) {
    std::uint64_t dim = std::uint64_t(1) << h.n_sites;
    std::mt19937_64 rng(seed);
    double scale = std::max(1.0, h.norm_estimate());
    double tol = 1e-9 * scale;

    ComplexVector start = random_state(dim, rng);
    orthogonalize(start, deflate);
    if (start.norm() < 1e-8) return false;  // deflated space exhausted
    start.normalize();

    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        std::vector<ComplexVector> basis;
        std::vector<double> alpha, beta;
        basis.push_back(start);
        for (int j = 0; j < opts.max_lanczos_dim; ++j) {
            ComplexVector w = h.apply(basis[j]);
            alpha.push_back(std::real(basis[j].dot(w)));
            orthogonalize(w, deflate);
            orthogonalize(w, basis);
            orthogonalize(w, basis);  // second pass for safety
            double b = w.norm();
            int m = static_cast<int>(alpha.size());
            // Ritz step on the tridiagonal matrix.
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                tri(i, i) = alpha[i];
                if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            double theta = es.eigenvalues()(0);
            Eigen::VectorXd s = es.eigenvectors().col(0);
            double residual = b * std::abs(s(m - 1));
            if (residual < tol || b < 1e-13 * scale || m == opts.max_lanczos_dim) {
                ComplexVector ritz = ComplexVector::Zero(dim);
                for (int i = 0; i < m; ++i) ritz += s(i) * basis[i];
                orthogonalize(ritz, deflate);
                double nrm = ritz.norm();
                if (nrm < 1e-8) return false;
                ritz /= nrm;
                if (residual < tol || b < 1e-13 * scale) {
                    lambda = theta;
                    vec = std::move(ritz);
                    return true;
                }
                start = std::move(ritz);  // thick restart from the best Ritz vector
                break;
            }
            beta.push_back(b);
            basis.push_back(w / b);
        }
    }
    return false;
}

}  // namespace

AssembledHamiltonian AssembledHamiltonian::from_spec(const HamiltonianSpec& spec) {
    AssembledHamiltonian h;
    h.n_sites = spec.system.n_sites;
    h.terms = spec.local_terms();
    h.shift = spec.ground_shift;
    return h;
}

std::vector<int> AssembledHamiltonian::site_list() const {
    std::vector<int> sites(n_sites);
    std::iota(sites.begin(), sites.end(), 0);
    return sites;
}

ComplexVector AssembledHamiltonian::apply(const ComplexVector& in) const {
    ComplexVector out = ComplexVector::Zero(in.size());
    auto sites = site_list();
    for (const auto& t : terms) accumulate_apply(out, t, in, sites);
    return out;
}

ComplexMatrix AssembledHamiltonian::dense() const {
    if (n_sites > 14) throw TooLarge("dense Hamiltonian limited to 14 sites");
    std::uint64_t dim = std::uint64_t(1) << n_sites;
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    auto sites = site_list();
    for (const auto& t : terms) accumulate_dense(h, t, sites);
    return h;
}

double AssembledHamiltonian::norm_estimate() const {
    double s = 0.0;
    for (const auto& t : terms)
        s += numerics::hermitian_eigenvalues(t.mat).cwiseAbs().maxCoeff();
    return s;
}

RealVector dense_spectrum(const HamiltonianSpec& spec) {
    auto h = AssembledHamiltonian::from_spec(spec);
    return numerics::hermitian_eigenvalues(h.dense(), 1e-8);
}

ExactGroundResult exact_ground(const HamiltonianSpec& spec, int k, const OracleOptions& opts) {
    int n = spec.system.n_sites;
    if (n > opts.size_limit) throw TooLarge("exact_ground: system too large");
    auto h = AssembledHamiltonian::from_spec(spec);
    std::uint64_t dim = std::uint64_t(1) << n;
    k = std::min<int>(k, static_cast<int>(dim));

    ExactGroundResult res;
    if (n <= opts.dense_limit) {
        auto eig = numerics::hermitian_eig(h.dense(), 1e-8);
        res.dense_path = true;
        int m = static_cast<int>(dim);
        res.degeneracy = 1;
        while (res.degeneracy < m &&
               eig.eigenvalues(res.degeneracy) <= eig.eigenvalues(0) + kDegeneracyGap)
            ++res.degeneracy;
        int keep = std::max(k, res.degeneracy);
        res.eigenvalues = eig.eigenvalues.head(keep).array() + h.shift;
        res.eigenvectors = eig.eigenvectors.leftCols(keep);
        res.energy = res.eigenvalues(0);
        return res;
    }

    res.dense_path = false;
    std::vector<ComplexVector> found;
    std::vector<double> values;
    for (int j = 0; j < k; ++j) {
        double lambda;
        ComplexVector vec;
        if (!lanczos_lowest(h, found, opts, opts.seed + 977u * j, lambda, vec)) break;
        found.push_back(std::move(vec));
        values.push_back(lambda);
    }
    if (found.empty()) throw Error("exact_ground: Lanczos failed to converge");
    // Deflation returns values in ascending order up to convergence noise.
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    res.eigenvalues.resize(static_cast<Eigen::Index>(values.size()));
    res.eigenvectors.resize(dim, static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) {
        res.eigenvalues(static_cast<Eigen::Index>(i)) = values[order[i]] + h.shift;
        res.eigenvectors.col(static_cast<Eigen::Index>(i)) = found[order[i]];
    }
    res.energy = res.eigenvalues(0);
    res.degeneracy = 1;
    while (res.degeneracy < static_cast<int>(values.size()) &&
           res.eigenvalues(res.degeneracy) <= res.energy + kDegeneracyGap)
        ++res.degeneracy;
    return res;
}

int kernel_dimension(const HamiltonianSpec& spec, const OracleOptions&) {
    if (spec.system.n_sites > 12) throw TooLarge("kernel_dimension: N must be <= 12");
    RealVector w = dense_spectrum(spec);
    int count = 0;
    while (count < w.size() && w(count) < kDegeneracyGap) ++count;
    return count;
}

double projector_average(const HamiltonianSpec& spec,
                         const std::vector<LocalTerm>& a_terms,
                         const OracleOptions&) {
    int n = spec.system.n_sites;
    if (n > 12) throw TooLarge("projector_average: N must be <= 12");
    auto h = AssembledHamiltonian::from_spec(spec);
    auto eig = numerics::hermitian_eig(h.dense(), 1e-8);
    int m = 0;
    while (m < eig.eigenvalues.size() && eig.eigenvalues(m) < kDegeneracyGap) ++m;
    if (m == 0) throw FrustratedInput("projector_average: no kernel (frustrated input)");
    auto sites = h.site_list();
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        ComplexVector v = eig.eigenvectors.col(i);
        ComplexVector av = ComplexVector::Zero(v.size());
        for (const auto& t : a_terms) accumulate_apply(av, t, v, sites);
        acc += std::real(v.dot(av));
    }
    return acc / m;
}

double projector_average(const HamiltonianSpec& spec, const Observable& a,
                         const OracleOptions& opts) {
    return projector_average(spec, a.local_terms(), opts);
}

}  // namespace ffspin::oracle
