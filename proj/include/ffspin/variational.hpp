#pragma once

#include "ffspin/groundspace.hpp"
#include "ffspin/model.hpp"

#include <optional>

namespace ffspin {

enum class BoundType { Upper, Lower, Exact };
std::string to_string(BoundType b);

struct EstimateResult {
    std::string method;
    double energy = 0.0;
    BoundType bound = BoundType::Upper;
    std::map<std::string, double> observables;  // e.g. "mz_per_site"
    double wall_time_s = 0.0;
    long long subspace_dim = 0;  // retained rank / degeneracy / 1 for product
    std::optional<ComplexVector> coefficients;  // state in the method's basis
};

struct EstimateOptions {
    bool compute_mz = false;
    int restarts = 8;          // product-state multistart
    int budget_sweeps = 3;     // rotation coordinate-descent sweeps
    int line_search_iters = 14;
    unsigned seed = 0x5eed;
    double gram_cutoff = 1e-10;
};

// Restriction of H to the symmetric subspace of the full system: exact for
// frustration-free references, variational upper bound otherwise.
EstimateResult symmetric_estimate(const HamiltonianSpec& h,
                                  const EstimateOptions& opts = {});

// Restriction of H to the ground manifold of a frustration-free reference.
EstimateResult symmetric_estimate(const HamiltonianSpec& h, const GroundSpaceModel& kernel,
                                  const EstimateOptions& opts = {});
EstimateResult symmetric_estimate_kernel(const HamiltonianSpec& h,
                                         const HamiltonianSpec& reference,
                                         const EstimateOptions& opts = {});

// Gutzwiller product ansatz: exact coordinate-wise updates to convergence,
// best of `restarts` seeded initializations.
EstimateResult product_mean_field(const HamiltonianSpec& h, const EstimateOptions& opts = {});

// Sum of minimal eigenvalues of edge clusters, single-spin terms split
// equally over incident edges; rigorous lower bound.
EstimateResult anderson_bound(const HamiltonianSpec& h);

// One layer of two-site isometries built from the lowest eigenvectors of the
// two-site reduced operators eta_{a,b}.
struct QLayer {
    std::vector<Edge> matching;
    std::vector<Eigen::Matrix<Complex, 4, 2>> isometries;
    std::vector<int> parent_of_new_site;  // new label -> original site
};

std::vector<Edge> greedy_matching(const SpinSystem& system);
std::pair<QLayer, HamiltonianSpec> build_q_layer(const HamiltonianSpec& h,
                                                 const std::vector<Edge>& matching);

// Minimize the symmetric-subspace estimate over per-site Bloch rotations of
// the Hamiltonian; never worse than the product ansatz (its optimum is one of
// the starting points).
EstimateResult rotated_symmetric_estimate(const HamiltonianSpec& h,
                                          const EstimateOptions& opts = {});

// ---- parameter sweeps ----

struct SweepRequest {
    ModelName model = ModelName::Xxz;
    LatticeKind lattice = LatticeKind::Chain;
    std::pair<int, int> dims = {3, 3};
    std::vector<double> lambdas;
    std::vector<std::string> methods;      // symmetric|product|anderson|rotated|qsym|ed
    std::vector<std::string> observables;  // subset of {"mz"}
    unsigned seed = 0x5eed;
    int oracle_dense_limit = 10;
    int oracle_size_limit = 20;
    int threads = 1;
    bool timings = false;
};

struct SweepRow {
    double lambda = 0.0;
    std::string method;
    std::optional<double> energy;
    std::optional<double> energy_per_site;
    std::string bound_type;
    std::optional<double> mz_per_site;
    std::optional<long long> ground_dim;
    std::optional<double> runtime_ms;
    std::string error;
};

std::vector<SweepRow> lambda_sweep(const SweepRequest& req);

}  // namespace ffspin
