#pragma once

#include "ffspin/model.hpp"

namespace ffspin::oracle {

// Full 2^N Hamiltonian kept as a term list; dense materialization only on
// request.  apply() and dense() act on the term sum without ground_shift;
// reported energies add the shift back.
struct AssembledHamiltonian {
    int n_sites = 0;
    std::vector<LocalTerm> terms;
    double shift = 0.0;

    static AssembledHamiltonian from_spec(const HamiltonianSpec& spec);

    std::vector<int> site_list() const;
    ComplexVector apply(const ComplexVector& in) const;
    ComplexMatrix dense() const;
    double norm_estimate() const;  // sum of term spectral-norm bounds
};

struct ExactGroundResult {
    double energy = 0.0;  // includes ground_shift
    int degeneracy = 0;
    RealVector eigenvalues;      // lowest computed, ascending, include shift
    ComplexMatrix eigenvectors;  // matching columns
    bool dense_path = true;
};

struct OracleOptions {
    int dense_limit = 10;   // dense full diagonalization up to this N
    int size_limit = 20;    // hard cap (iterative path)
    unsigned seed = 0x5eed;
    int max_lanczos_dim = 220;
    int max_restarts = 60;
};

// Lowest k eigenpairs; degeneracy counted with an absolute 1e-7 gap.
ExactGroundResult exact_ground(const HamiltonianSpec& spec, int k,
                               const OracleOptions& opts = {});

// Count of eigenvalues of the (normalized) term sum below 1e-7.  N <= 12.
int kernel_dimension(const HamiltonianSpec& spec, const OracleOptions& opts = {});

// tr(P A) / tr(P) with P the numerical kernel projector of the term sum.
double projector_average(const HamiltonianSpec& spec, const Observable& a,
                         const OracleOptions& opts = {});
double projector_average(const HamiltonianSpec& spec,
                         const std::vector<LocalTerm>& a_terms,
                         const OracleOptions& opts = {});

// Ascending spectrum of the term sum (no shift), eigenvalues only.
RealVector dense_spectrum(const HamiltonianSpec& spec);

}  // namespace ffspin::oracle
