#include "ffspin/model.hpp"

#include "ffspin/numerics.hpp"

#include <cmath>
#include <set>

namespace ffspin {

int SpinSystem::degree(int site) const {
    int d = 0;
    for (const Edge& e : edges)
        if (e.contains(site)) ++d;
    return d;
}

void SpinSystem::validate() const {
    if (n_sites <= 0) throw Error("SpinSystem: n_sites must be positive");
    Edge prev{-1, -1};
    for (const Edge& e : edges) {
        if (e.a == e.b) throw Error("SpinSystem: self-loop on site " + std::to_string(e.a));
        if (e.a < 0 || e.b >= n_sites)
            throw Error("SpinSystem: edge site out of range");
        if (!(prev < e)) throw Error("SpinSystem: edges must be sorted and unique");
        prev = e;
    }
}

LatticeKind lattice_from_string(const std::string& s) {
    if (s == "chain") return LatticeKind::Chain;
    if (s == "square_torus") return LatticeKind::SquareTorus;
    if (s == "trigonal_torus") return LatticeKind::TrigonalTorus;
    throw UnknownModel("unknown lattice kind: " + s);
}

std::string to_string(LatticeKind k) {
    switch (k) {
        case LatticeKind::Chain: return "chain";
        case LatticeKind::SquareTorus: return "square_torus";
        case LatticeKind::TrigonalTorus: return "trigonal_torus";
    }
    return "?";
}

SpinSystem build_lattice(LatticeKind kind, std::pair<int, int> dims) {
    SpinSystem sys;
    if (kind == LatticeKind::Chain) {
        int n = dims.first;
        if (n < 1) throw DegenerateLattice("chain length must be >= 1");
        sys.n_sites = n;
        for (int i = 0; i + 1 < n; ++i) sys.edges.emplace_back(i, i + 1);
        for (int i = 0; i < n; ++i) sys.coords.push_back({double(i), 0.0});
        return sys;
    }
    auto [lx, ly] = dims;
    if (lx < 3 || ly < 3)
        throw DegenerateLattice("torus lattices need every axis >= 3");
    sys.n_sites = lx * ly;
    auto site = [&](int x, int y) {
        return ((x % lx + lx) % lx) * ly + ((y % ly + ly) % ly);
    };
    std::set<Edge> edges;
    std::vector<std::pair<int, int>> offsets = {{1, 0}, {0, 1}};
    if (kind == LatticeKind::TrigonalTorus) offsets.push_back({1, 1});
    for (int x = 0; x < lx; ++x)
        for (int y = 0; y < ly; ++y) {
            for (auto [dx, dy] : offsets)
                edges.insert(Edge(site(x, y), site(x + dx, y + dy)));
            sys.coords.push_back({double(x), double(y)});
        }
    sys.edges.assign(edges.begin(), edges.end());
    return sys;
}

std::vector<LocalTerm> HamiltonianSpec::local_terms() const {
    std::vector<LocalTerm> out;
    for (const auto& [e, h] : two_spin_terms) out.push_back({{e.a, e.b}, h});
    for (const auto& [v, h] : single_spin_terms) out.push_back({{v}, h});
    return out;
}

ModelName model_from_string(const std::string& s) {
    if (s == "xxz") return ModelName::Xxz;
    if (s == "tfi") return ModelName::Tfi;
    if (s == "heisenberg_ferro") return ModelName::HeisenbergFerro;
    if (s == "singlet_sum") return ModelName::SingletSum;
    throw UnknownModel("unknown model name: " + s);
}

std::string to_string(ModelName m) {
    switch (m) {
        case ModelName::Xxz: return "xxz";
        case ModelName::Tfi: return "tfi";
        case ModelName::HeisenbergFerro: return "heisenberg_ferro";
        case ModelName::SingletSum: return "singlet_sum";
    }
    return "?";
}

HamiltonianSpec named_model(ModelName name, const SpinSystem& system, double lambda) {
    system.validate();
    HamiltonianSpec spec;
    spec.system = system;

    const ComplexMatrix xx = kron(pauli_x(), pauli_x());
    const ComplexMatrix yy = kron(pauli_y(), pauli_y());
    const ComplexMatrix zz = kron(pauli_z(), pauli_z());

    ComplexMatrix edge_term;
    switch (name) {
        case ModelName::Xxz:
            edge_term = -xx - yy - (1.0 - lambda) * zz;
            break;
        case ModelName::Tfi:
            edge_term = -zz;
            break;
        case ModelName::HeisenbergFerro:
            edge_term = -xx - yy - zz;
            break;
        case ModelName::SingletSum:
            edge_term = singlet_state() * singlet_state().adjoint();
            break;
    }
    for (const Edge& e : system.edges) spec.two_spin_terms[e] = edge_term;
    if (name == ModelName::Tfi && lambda != 0.0) {
        ComplexMatrix hx = -lambda * ComplexMatrix(pauli_x());
        for (int v = 0; v < system.n_sites; ++v) spec.single_spin_terms[v] = hx;
    }
    return spec;
}

HamiltonianSpec normalize_terms(const HamiltonianSpec& spec) {
    HamiltonianSpec out;
    out.system = spec.system;
    out.ground_shift = spec.ground_shift;
    auto normalize_one = [&](const ComplexMatrix& h) -> std::optional<ComplexMatrix> {
        auto eig = numerics::hermitian_eig(h, 1e-9);
        double lambda_min = eig.eigenvalues(0);
        out.ground_shift += lambda_min;
        ComplexMatrix shifted =
            h - lambda_min * ComplexMatrix::Identity(h.rows(), h.cols());
        double lambda_max = eig.eigenvalues(eig.eigenvalues.size() - 1) - lambda_min;
        if (lambda_max < 1e-12) return std::nullopt;  // scalar term, dropped
        return shifted;
    };
    for (const auto& [e, h] : spec.two_spin_terms)
        if (auto t = normalize_one(h)) out.two_spin_terms[e] = *t;
    for (const auto& [v, h] : spec.single_spin_terms)
        if (auto t = normalize_one(h)) out.single_spin_terms[v] = *t;
    return out;
}

bool span_contains_entangled(const ComplexMatrix& columns, double tol) {
    int r = static_cast<int>(columns.cols());
    if (r == 0) return false;
    if (r >= 3) return true;  // the product-state variety contains no 3-dim subspace
    auto as_mat = [&](int j) {
        Eigen::Matrix2cd m;
        m << columns(0, j), columns(1, j), columns(2, j), columns(3, j);
        return m;
    };
    Eigen::Matrix2cd m0 = as_mat(0);
    if (r == 1) return std::abs(m0.determinant()) > tol;
    Eigen::Matrix2cd m1 = as_mat(1);
    // det(s*m0 + t*m1) = s^2 det(m0) + s*t*mixed + t^2 det(m1)
    Complex mixed = m0(0, 0) * m1(1, 1) + m1(0, 0) * m0(1, 1) - m0(0, 1) * m1(1, 0) -
                    m1(0, 1) * m0(1, 0);
    return std::abs(m0.determinant()) > tol || std::abs(m1.determinant()) > tol ||
           std::abs(mixed) > tol;
}

NaturalnessReport check_natural(const HamiltonianSpec& spec) {
    spec.system.validate();
    // (i) connectivity over nonzero two-spin terms
    int n = spec.system.n_sites;
    std::vector<std::vector<int>> adj(n);
    for (const auto& [e, h] : spec.two_spin_terms) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    if (n > 1) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count != n) {
            NaturalnessReport rep;
            rep.natural = false;
            rep.reason = "isolated subsystem: interaction graph is disconnected";
            return rep;
        }
    }
    // (ii) entangled excited state for each term
    for (const auto& [e, h] : spec.two_spin_terms) {
        ComplexMatrix ker = numerics::kernel_basis(h, 1e-9);
        int rank = 4 - static_cast<int>(ker.cols());
        auto eig = numerics::hermitian_eig(h, 1e-9);
        ComplexMatrix support = eig.eigenvectors.rightCols(rank);
        if (!span_contains_entangled(support)) {
            NaturalnessReport rep;
            rep.natural = false;
            rep.reason = "term has a product excited space";
            rep.edge = e;
            return rep;
        }
    }
    return {};
}

// ---- observables ----

const Eigen::Matrix2cd& pauli_matrix(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return pauli_x();
        case PauliAxis::Y: return pauli_y();
        case PauliAxis::Z: return pauli_z();
    }
    return id2();
}

int Observable::locality() const {
    int k = 0;
    for (const auto& t : terms) k = std::max<int>(k, static_cast<int>(t.paulis.size()));
    return k;
}

void Observable::validate_hermitian(double tol) const {
    std::map<std::string, Complex> combined;
    for (const auto& t : terms) {
        std::string key;
        for (const auto& [s, p] : t.paulis)
            key += std::to_string(s) + static_cast<char>(p);
        combined[key] += t.coefficient;
    }
    for (const auto& [key, c] : combined)
        if (std::abs(c.imag()) > tol * std::max(1.0, std::abs(c)))
            throw Error("observable is not Hermitian (complex weight on string " + key + ")");
}

std::vector<LocalTerm> Observable::local_terms() const {
    std::vector<LocalTerm> out;
    for (const auto& t : terms) {
        LocalTerm lt;
        lt.mat = ComplexMatrix::Identity(1, 1) * t.coefficient;
        for (const auto& [site, axis] : t.paulis) {  // map: ascending sites
            lt.sites.push_back(site);
            lt.mat = kron(lt.mat, pauli_matrix(axis));
        }
        out.push_back(std::move(lt));
    }
    return out;
}

Observable magnetization_z(int n_sites) {
    Observable obs;
    for (int v = 0; v < n_sites; ++v)
        obs.terms.push_back({Complex(1), {{v, PauliAxis::Z}}});
    return obs;
}

Observable total_sz_squared(int n_sites) {
    // (sum_v Z_v / 2)^2 = N/4 * 1 + (1/4) sum_{u != v} Z_u Z_v
    Observable obs;
    obs.terms.push_back({Complex(n_sites / 4.0), {}});
    for (int u = 0; u < n_sites; ++u)
        for (int v = u + 1; v < n_sites; ++v)
            obs.terms.push_back({Complex(0.5), {{u, PauliAxis::Z}, {v, PauliAxis::Z}}});
    return obs;
}

}  // namespace ffspin
