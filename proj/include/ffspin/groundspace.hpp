#pragma once

#include "ffspin/reduction.hpp"

#include <memory>

namespace ffspin {

// Per-component parametrization of the residual kernel: ground states are
// spanned by tensor products of L_v |alpha_j> over the component's sites.
struct ComponentModel {
    int root = 0;
    std::vector<int> sites;                    // sorted, includes root
    std::map<int, Eigen::Matrix2cd> factors;   // L_v; L_root = identity
    std::vector<Eigen::Vector2cd> alphas;      // n_i + 1 pairwise independent
};

struct GroundSpaceModel {
    std::vector<ComponentModel> components;  // ordered by root site
    std::vector<int> root_sites;             // sorted union
    IsometryNetwork network;

    long long dimension() const;  // product of (n_i + 1)
    int component_of(int site) const;
};

// Solve the local factors from the root-star constraints and verify every
// stored constraint against them.
GroundSpaceModel local_factors(const CompleteHomogeneous& outcome, double tol = 1e-8);

// Real Bloch-circle states at equally spaced angles j*pi/(n_c+1).
std::vector<Eigen::Vector2cd> choose_alphas(int n_c);

struct RestrictionResult {
    ComplexMatrix skew;             // W(op), d x d in the product basis
    ComplexMatrix gram;             // B = W(1)
    ComplexMatrix ortho_transform;  // r x d; rows map |Psi_j> onto an ON basis
    ComplexMatrix restricted;       // r x r restriction of the operator
    int retained_rank = 0;
};

struct RestrictOptions {
    double gram_cutoff = 1e-10;  // relative eigenvalue cutoff on the Gram
};

// Restriction of a sum of root-local terms to the kernel parametrized by the
// model.  Matrix entries factorize into per-site scalars accumulated in log
// space; nothing exponential in the component sizes is ever formed.
RestrictionResult restrict_operator(const GroundSpaceModel& model,
                                    const std::vector<LocalTerm>& terms,
                                    const RestrictOptions& opts = {});

// Same machinery with the Gram factorization cached, for callers that
// restrict many operators against one model.
class Restrictor {
  public:
    explicit Restrictor(const GroundSpaceModel& model, const RestrictOptions& opts = {});
    ~Restrictor();
    Restrictor(Restrictor&&) noexcept;
    Restrictor& operator=(Restrictor&&) noexcept;

    ComplexMatrix skew(const std::vector<LocalTerm>& terms) const;
    RestrictionResult restrict(const std::vector<LocalTerm>& terms) const;
    const ComplexMatrix& gram() const;
    int retained_rank() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Product basis vector C |alpha_J> on the root sites (materialized; for
// validation at small root counts only).
ComplexVector kernel_product_state(const GroundSpaceModel& model, long long index);

// Maximal-mixture ground-manifold expectation tr(A-bar)/d of an observable.
double ground_expectation(const HamiltonianSpec& h_u, const Observable& a,
                          const ReduceConfig& cfg = {});

// 0 when frustrated, otherwise the exact kernel dimension.
long long ground_dimension(const HamiltonianSpec& h_u, const ReduceConfig& cfg = {});

struct SchmidtCheckResult {
    int max_rank = 0;
    int bound = 0;
    bool pass = false;
};

// Sample random ground-manifold states and verify the Schmidt rank across
// (region | complement) stays within |region| + 1.
SchmidtCheckResult schmidt_check(const HamiltonianSpec& h_u, const std::vector<int>& region,
                                 int samples, unsigned seed = 0x5eed,
                                 const ReduceConfig& cfg = {});

}  // namespace ffspin
