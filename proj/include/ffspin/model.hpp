#pragma once

#include "ffspin/localop.hpp"
#include "ffspin/types.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ffspin {

struct SpinSystem {
    int n_sites = 0;
    std::vector<Edge> edges;  // sorted, no duplicates, no self-loops
    std::vector<std::array<double, 2>> coords;  // empty unless lattice-derived

    bool has_edge(Edge e) const {
        return std::binary_search(edges.begin(), edges.end(), e);
    }
    int degree(int site) const;
    void validate() const;
};

enum class LatticeKind { Chain, SquareTorus, TrigonalTorus };

LatticeKind lattice_from_string(const std::string& s);
std::string to_string(LatticeKind k);

SpinSystem build_lattice(LatticeKind kind, std::pair<int, int> dims);

struct HamiltonianSpec {
    SpinSystem system;
    // 4x4 term on edge (a, b), a < b, big-endian basis |a b>.
    std::map<Edge, ComplexMatrix> two_spin_terms;
    std::map<int, ComplexMatrix> single_spin_terms;  // 2x2
    double ground_shift = 0.0;

    std::vector<LocalTerm> local_terms() const;  // all terms, edges then sites
    int n_sites() const { return system.n_sites; }
};

enum class ModelName { Xxz, Tfi, HeisenbergFerro, SingletSum };

ModelName model_from_string(const std::string& s);
std::string to_string(ModelName m);

HamiltonianSpec named_model(ModelName name, const SpinSystem& system, double lambda);

// Shift every term so its lowest eigenvalue is zero; the removed constants
// accumulate in ground_shift (original H = normalized H + ground_shift * 1).
// Terms that become numerically zero are dropped.
HamiltonianSpec normalize_terms(const HamiltonianSpec& spec);

struct NaturalnessReport {
    bool natural = true;
    std::string reason;
    std::optional<Edge> edge;  // offending term, when term-local

    explicit operator bool() const { return natural; }
};

// Natural = connected interaction graph + every two-spin term has an
// entangled excited state.  Expects a normalized spec.
NaturalnessReport check_natural(const HamiltonianSpec& spec);

// True iff some vector of span(columns) is entangled, i.e. the quadratic
// polynomial det(sum_i c_i reshape(v_i)) is not identically zero.
bool span_contains_entangled(const ComplexMatrix& columns, double tol = 1e-10);

// ---- observables ----

enum class PauliAxis : char { X = 'X', Y = 'Y', Z = 'Z' };

struct PauliTerm {
    Complex coefficient;
    std::map<int, PauliAxis> paulis;  // site -> axis; empty = identity term
};

struct Observable {
    std::vector<PauliTerm> terms;

    int locality() const;
    // Pauli strings are self-adjoint, so Hermiticity means real coefficients
    // after combining duplicate strings.
    void validate_hermitian(double tol = 1e-10) const;
    std::vector<LocalTerm> local_terms() const;
};

Observable magnetization_z(int n_sites);
Observable total_sz_squared(int n_sites);

const Eigen::Matrix2cd& pauli_matrix(PauliAxis axis);

}  // namespace ffspin
