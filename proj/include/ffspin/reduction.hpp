#pragma once

#include "ffspin/model.hpp"

#include <optional>
#include <set>
#include <variant>

namespace ffspin {

// Rank-1 two-spin functional <beta|.  `bra` holds the functional coefficients
// in the |a b> basis of the canonical edge (a < b), unit Euclidean norm; the
// functional acts on states by bra.transpose() * psi.
struct Constraint {
    Edge edge;
    Eigen::Vector4cd bra;
    bool entangled = false;
};

Constraint make_constraint(Edge e, const Eigen::Vector4cd& raw_bra);

// bra reshaped as a 2x2 matrix indexed [first_site bit][other bit].
Eigen::Matrix2cd bra_matrix(const Constraint& c, int first_site);

// One reduction move.  PairContraction eliminates `daughter` by the isometry
// R: C^2(parent) -> S subset C^2(parent) x C^2(daughter), columns orthonormal.
// SpinFix eliminates a site by freezing it into `state`.
struct PairContraction {
    int parent = 0;
    int daughter = 0;
    Eigen::Matrix<Complex, 4, 2> isometry;
};
struct SpinFix {
    int site = 0;
    Eigen::Vector2cd state;
};
using IsometryStep = std::variant<PairContraction, SpinFix>;

struct IsometryNetwork {
    int n_leaves = 0;
    std::vector<int> root_sites;         // sorted
    std::vector<IsometryStep> steps;     // in the order they were applied

    // Longest root-to-leaf chain of isometries.
    int depth() const;
};

// Working Hamiltonian over a shrinking subset of the original sites; labels
// stay stable so the isometry network can refer to them.
struct TermGraph {
    int n_leaves = 0;
    std::set<int> sites;
    std::map<Edge, ComplexMatrix> pair_terms;
    std::map<int, ComplexMatrix> site_terms;
    double shift = 0.0;
    double scale = 1.0;  // largest input term eigenvalue, for zero thresholds

    static TermGraph from_spec(const HamiltonianSpec& spec);
    double zero_floor() const { return 1e-12 * scale; }
};

// Number of eigenvalues above tol * lambda_max (0 for a numerically zero term).
int term_rank(const ComplexMatrix& h, double tol);

// Contract the pair `e` (term rank must be 2 or 3).  The kept subspace is the
// kernel, plus the lowest excited eigenvector in the rank-3 case; parent is
// the lower site label.
std::pair<TermGraph, IsometryStep> contract_pair(const TermGraph& g, Edge e, double tol);

// Freeze site u into `fix_to` (the state orthogonal to a rank-1 single-spin
// term).  Every pair term touching u becomes a single-spin term.
std::pair<TermGraph, IsometryStep> fix_spin(const TermGraph& g, int u,
                                            const Eigen::Vector2cd& fix_to);

// Combine constraints on {a,b} and {b,c} through the two-spin singlet into a
// constraint on {a,c}; empty when the contraction is numerically zero.
std::optional<Constraint> induce_constraint(const Constraint& ab, const Constraint& bc);

struct FrustrationWitness {
    std::string kind;  // "full-rank pair term" | "full-rank single-spin term"
    std::optional<Edge> edge;
    std::optional<int> site;
};

struct Frustrated {
    FrustrationWitness witness;
};

struct CompleteHomogeneous {
    std::vector<std::vector<int>> components;  // partition of root sites, sorted
    std::map<Edge, Constraint> constraints;
    IsometryNetwork network;

    long long ground_dimension() const;  // product over components of (n_i + 1)
};

using ReductionOutcome = std::variant<Frustrated, CompleteHomogeneous>;

inline bool is_frustrated(const ReductionOutcome& o) {
    return std::holds_alternative<Frustrated>(o);
}

struct ReduceConfig {
    double tol = 1e-9;              // relative rank tolerance
    double duplicate_tol = 1e-9;    // |1 - |<b|b'>|| below this = same constraint
    int materialize_limit = 256;    // complete-graph materialization cap
    bool reverse_edge_order = false;  // ordering hook for order-independence tests
};

// Full decision procedure: normalize, check naturalness, eliminate rank-1
// single-spin terms, contract rank-2/3 pair terms, close the rank-1 residue
// under constraint induction.  Throws NotNatural for inputs outside the
// supported class.
ReductionOutcome reduce(const HamiltonianSpec& spec, const ReduceConfig& cfg = {});

// Expand a root-space state through the network onto the leaves (validation
// only; total leaf count must stay materializable).
ComplexVector apply_network(const IsometryNetwork& net, const ComplexVector& root_state);

// T^dagger A T for a sum of leaf-local terms; only steps in the causal cone
// of the support are contracted, and supports never grow.
std::vector<LocalTerm> pullback_operator(const IsometryNetwork& net,
                                         const std::vector<LocalTerm>& leaf_terms);
std::vector<LocalTerm> pullback_operator(const IsometryNetwork& net, const Observable& a);

}  // namespace ffspin
