#include "doctest.h"

#include "ffspin/groundspace.hpp"
#include "ffspin/numerics.hpp"
#include "ffspin/oracle.hpp"
#include "ffspin/reduction.hpp"
#include "test_support.hpp"

using namespace ffspin;

namespace {

ComplexMatrix dense_of(const TermGraph& g) {
    std::vector<int> sites(g.sites.begin(), g.sites.end());
    std::uint64_t dim = std::uint64_t(1) << sites.size();
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (const auto& [e, m] : g.pair_terms) accumulate_dense(h, {{e.a, e.b}, m}, sites);
    for (const auto& [v, m] : g.site_terms) accumulate_dense(h, {{v}, m}, sites);
    return h;
}

int kernel_count(const ComplexMatrix& h) {
    RealVector w = numerics::hermitian_eigenvalues(h, 1e-8);
    int c = 0;
    while (c < w.size() && w(c) < 1e-7) ++c;
    return c;
}

ComplexMatrix ising_term() {
    return -kron(pauli_z(), pauli_z()) + ComplexMatrix::Identity(4, 4);
}

Eigen::Vector4cd phi_plus_bra() {
    Eigen::Vector4cd v;
    v << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    return v;
}

}  // namespace

TEST_CASE("term_rank examples") {
    ComplexMatrix singlet = singlet_state() * singlet_state().adjoint();
    CHECK(term_rank(singlet, 1e-9) == 1);
    CHECK(term_rank(ising_term(), 1e-9) == 2);
    // shifted antiferromagnetic Heisenberg: S.S + 3/4
    ComplexMatrix ss = 0.25 * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                               kron(pauli_z(), pauli_z())) +
                       0.75 * ComplexMatrix::Identity(4, 4);
    CHECK(term_rank(ss, 1e-9) == 3);
    CHECK(term_rank(ComplexMatrix::Zero(4, 4), 1e-9) == 0);
}

TEST_CASE("contract_pair: two-site Ising pair leaves a trivial Hamiltonian") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = ising_term();
    TermGraph g = TermGraph::from_spec(spec);
    CHECK(kernel_count(dense_of(g)) == 2);

    auto [g2, step] = contract_pair(g, Edge(0, 1), 1e-9);
    CHECK(g2.sites == std::set<int>{0});
    CHECK(g2.pair_terms.empty());
    CHECK(g2.site_terms.empty());
    CHECK(kernel_count(dense_of(g2)) == 2);

    const auto& pc = std::get<PairContraction>(step);
    CHECK(pc.parent == 0);
    CHECK(pc.daughter == 1);
    CHECK((pc.isometry.adjoint() * pc.isometry -
           Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("contract_pair: 3-site Ising chain, middle edge first") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {3, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = ising_term();
    spec.two_spin_terms[Edge(1, 2)] = ising_term();
    TermGraph g = TermGraph::from_spec(spec);
    CHECK(kernel_count(dense_of(g)) == 2);

    auto [g2, step] = contract_pair(g, Edge(1, 2), 1e-9);
    REQUIRE(g2.pair_terms.count(Edge(0, 1)) == 1);
    CHECK(term_rank(g2.pair_terms.at(Edge(0, 1)), 1e-9) == 2);
    CHECK(kernel_count(dense_of(g2)) == 2);

    auto [g3, step2] = contract_pair(g2, Edge(0, 1), 1e-9);
    CHECK(g3.sites.size() == 1);
    CHECK(kernel_count(dense_of(g3)) == 2);
}

TEST_CASE("contract_pair: rank-3 term leaves a rank-1 single-spin residual") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] =
        0.25 * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                kron(pauli_z(), pauli_z())) +
        0.75 * ComplexMatrix::Identity(4, 4);
    TermGraph g = TermGraph::from_spec(spec);
    auto [g2, step] = contract_pair(g, Edge(0, 1), 1e-9);
    REQUIRE(g2.site_terms.count(0) == 1);
    CHECK(term_rank(g2.site_terms.at(0), 1e-9) == 1);
    CHECK(kernel_count(dense_of(g2)) == kernel_count(dense_of(g)));
}

TEST_CASE("contract_pair: rank out of range rejected") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = singlet_state() * singlet_state().adjoint();
    TermGraph g = TermGraph::from_spec(spec);
    CHECK_THROWS_AS(contract_pair(g, Edge(0, 1), 1e-9), RankOutOfRange);
}

TEST_CASE("fix_spin: |0><0| fixes the spin to |1>") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = ising_term();
    Eigen::Matrix2cd p00 = Eigen::Matrix2cd::Zero();
    p00(0, 0) = 1;
    spec.single_spin_terms[0] = p00;
    TermGraph g = TermGraph::from_spec(spec);

    Eigen::Vector2cd e1;
    e1 << 0, 1;
    auto [g2, step] = fix_spin(g, 0, e1);
    const auto& sf = std::get<SpinFix>(step);
    CHECK(sf.site == 0);
    CHECK(std::abs(std::abs(sf.state(1)) - 1.0) < 1e-12);
    CHECK(g2.sites == std::set<int>{1});
    // -ZZ+1 with spin 0 at |1> becomes Z+1 on spin 1
    REQUIRE(g2.site_terms.count(1) == 1);
    ComplexMatrix expect = Eigen::Matrix2cd(pauli_z()) + Eigen::Matrix2cd::Identity();
    CHECK((g2.site_terms.at(1) - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fix_spin: singlet neighbor chain (derived kernel dimension 1)") {
    // |0><0| on u plus a singlet projector on {u,v}
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = singlet_state() * singlet_state().adjoint();
    Eigen::Matrix2cd p00 = Eigen::Matrix2cd::Zero();
    p00(0, 0) = 1;
    spec.single_spin_terms[0] = p00;
    TermGraph g = TermGraph::from_spec(spec);
    CHECK(kernel_count(dense_of(g)) == 1);

    Eigen::Vector2cd e1;
    e1 << 0, 1;
    auto [g2, step] = fix_spin(g, 0, e1);
    REQUIRE(g2.site_terms.count(1) == 1);
    CHECK(term_rank(g2.site_terms.at(1), 1e-9) == 1);
    CHECK(kernel_count(dense_of(g2)) == 1);
}

TEST_CASE("fix_spin: full-rank single-spin term rejected") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = ising_term();
    spec.single_spin_terms[0] =
        Eigen::Matrix2cd(pauli_z()) + 2.0 * Eigen::Matrix2cd::Identity();
    TermGraph g = TermGraph::from_spec(spec);
    Eigen::Vector2cd e1;
    e1 << 0, 1;
    CHECK_THROWS_AS(fix_spin(g, 0, e1), FullRankSingleSite);
}

TEST_CASE("induce_constraint: singlet with singlet gives the singlet") {
    Constraint ab = make_constraint(Edge(0, 1), singlet_state().conjugate());
    Constraint bc = make_constraint(Edge(1, 2), singlet_state().conjugate());
    auto out = induce_constraint(ab, bc);
    REQUIRE(out.has_value());
    CHECK(out->edge == Edge(0, 2));
    CHECK(out->entangled);

    // independent oracle: contract the raw tensors index by index
    Eigen::Vector4cd expected = Eigen::Vector4cd::Zero();
    const Eigen::Vector4cd f = singlet_state().conjugate();
    const Eigen::Vector4cd psi = singlet_state();
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            Complex acc(0);
            for (int j = 0; j < 2; ++j)
                for (int jp = 0; jp < 2; ++jp)
                    acc += f(2 * i + j) * f(2 * jp + k) * psi(2 * j + jp);
            expected(2 * i + k) = acc;
        }
    expected.normalize();
    CHECK(std::abs(std::abs(expected.dot(out->bra)) - 1.0) < 1e-12);
    // and it is proportional to the singlet functional itself
    CHECK(std::abs(std::abs(singlet_state().conjugate().dot(out->bra)) - 1.0) < 1e-12);
}

TEST_CASE("induce_constraint: singlet with Phi+ annihilates the pair kernel") {
    Constraint ab = make_constraint(Edge(0, 1), singlet_state().conjugate());
    Constraint bc = make_constraint(Edge(1, 2), phi_plus_bra());
    auto out = induce_constraint(ab, bc);
    REQUIRE(out.has_value());
    CHECK(out->entangled);

    // oracle: every kernel vector of the two projectors on 3 qubits is
    // annihilated by the induced functional on (0, 2)
    HamiltonianSpec spec;
    spec.system.n_sites = 3;
    spec.system.edges = {Edge(0, 1), Edge(1, 2)};
    Eigen::Vector4cd beta_ab = ab.bra.conjugate();
    Eigen::Vector4cd beta_bc = bc.bra.conjugate();
    spec.two_spin_terms[Edge(0, 1)] = beta_ab * beta_ab.adjoint();
    spec.two_spin_terms[Edge(1, 2)] = beta_bc * beta_bc.adjoint();
    auto h = oracle::AssembledHamiltonian::from_spec(spec);
    auto eig = numerics::hermitian_eig(h.dense(), 1e-8);
    for (int i = 0; i < eig.eigenvalues.size(); ++i) {
        if (eig.eigenvalues(i) > 1e-9) break;
        ComplexVector v = eig.eigenvectors.col(i);
        double worst = 0;
        for (int b1 = 0; b1 < 2; ++b1) {  // middle spin free index
            Complex acc(0);
            for (int b0 = 0; b0 < 2; ++b0)
                for (int b2 = 0; b2 < 2; ++b2)
                    acc += out->bra(2 * b0 + b2) * v(4 * b0 + 2 * b1 + b2);
            worst = std::max(worst, std::abs(acc));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("induce_constraint: entangled inputs give entangled nonzero output") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::Vector4cd a, b;
        do {
            for (int i = 0; i < 4; ++i) a(i) = Complex(gauss(rng), gauss(rng));
            a.normalize();
        } while (std::abs(a(0) * a(3) - a(1) * a(2)) < 0.05);
        do {
            for (int i = 0; i < 4; ++i) b(i) = Complex(gauss(rng), gauss(rng));
            b.normalize();
        } while (std::abs(b(0) * b(3) - b(1) * b(2)) < 0.05);
        Constraint ab = make_constraint(Edge(0, 1), a);
        Constraint bc = make_constraint(Edge(1, 2), b);
        auto out = induce_constraint(ab, bc);
        REQUIRE(out.has_value());
        CHECK(out->entangled);
    }
}

TEST_CASE("induce_constraint: shared-site mismatch rejected") {
    Constraint ab = make_constraint(Edge(0, 1), singlet_state().conjugate());
    Constraint cd = make_constraint(Edge(2, 3), singlet_state().conjugate());
    CHECK_THROWS_AS(induce_constraint(ab, cd), SharedSiteMismatch);
    Constraint ba = make_constraint(Edge(0, 1), phi_plus_bra());
    CHECK_THROWS_AS(induce_constraint(ab, ba), SharedSiteMismatch);
}

TEST_CASE("reduce: ferromagnetic XXX chain reduces with no contractions") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {6, 1});
    HamiltonianSpec spec = named_model(ModelName::HeisenbergFerro, s, 0.0);
    auto outcome = reduce(spec);
    REQUIRE(!is_frustrated(outcome));
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    CHECK(ch.network.steps.empty());
    CHECK(ch.network.root_sites.size() == 6);
    REQUIRE(ch.components.size() == 1);
    CHECK(ch.components[0].size() == 6);
    CHECK(ch.ground_dimension() == 7);
    // complete graph materialized, every constraint proportional to the singlet
    CHECK(ch.constraints.size() == 15);
    for (const auto& [e, c] : ch.constraints) {
        CHECK(c.entangled);
        CHECK(std::abs(std::abs(singlet_state().conjugate().dot(c.bra)) - 1.0) < 1e-9);
    }
}

TEST_CASE("reduce: triangle with two singlets and one Phi+ constraint") {
    HamiltonianSpec spec;
    spec.system.n_sites = 3;
    spec.system.edges = {Edge(0, 1), Edge(0, 2), Edge(1, 2)};
    ComplexMatrix singlet = singlet_state() * singlet_state().adjoint();
    Eigen::Vector4cd phip = phi_plus_bra().conjugate();
    spec.two_spin_terms[Edge(0, 1)] = singlet;
    spec.two_spin_terms[Edge(1, 2)] = singlet;
    spec.two_spin_terms[Edge(0, 2)] = phip * phip.adjoint();

    CHECK(oracle::kernel_dimension(normalize_terms(spec)) == 2);

    auto outcome = reduce(spec);
    REQUIRE(!is_frustrated(outcome));
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    CHECK(!ch.network.steps.empty());  // the merge forces at least one contraction
    CHECK(ch.ground_dimension() == 2);
}

TEST_CASE("reduce: rank-1 triangles are never frustrated (dimension bound)") {
    // any three two-spin rank-1 terms on 3 qubits keep a kernel of dim >= 2
    std::mt19937_64 rng(71);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        HamiltonianSpec spec;
        spec.system.n_sites = 3;
        spec.system.edges = {Edge(0, 1), Edge(0, 2), Edge(1, 2)};
        for (const Edge& e : spec.system.edges) {
            Eigen::Vector4cd b;
            do {
                for (int i = 0; i < 4; ++i) b(i) = Complex(gauss(rng), gauss(rng));
                b.normalize();
            } while (std::abs(b(0) * b(3) - b(1) * b(2)) < 0.05);
            spec.two_spin_terms[e] = b * b.adjoint();
        }
        auto outcome = reduce(spec);
        REQUIRE(!is_frustrated(outcome));
        long long dim = std::get<CompleteHomogeneous>(outcome).ground_dimension();
        CHECK(dim == oracle::kernel_dimension(normalize_terms(spec)));
        CHECK(dim >= 2);
    }
}

TEST_CASE("reduce: frustrated instances detected (oracle cross-check)") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 4 + static_cast<int>(rng() % 3);
        HamiltonianSpec ff = test::random_planted_ff(n, rng);
        HamiltonianSpec fr = test::frustrate(ff, rng);
        CHECK(!is_frustrated(reduce(ff)));
        CHECK(is_frustrated(reduce(fr)));
    }
}

TEST_CASE("reduce: TFI with a field is frustrated") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {4, 1});
    auto outcome = reduce(named_model(ModelName::Tfi, s, 0.7));
    CHECK(is_frustrated(outcome));
}

TEST_CASE("reduce: non-natural input rejected") {
    SpinSystem s;
    s.n_sites = 4;
    s.edges = {Edge(0, 1), Edge(2, 3)};
    CHECK_THROWS_AS(reduce(named_model(ModelName::SingletSum, s, 0.0)), NotNatural);
}

TEST_CASE("reduce: kernel dimension preserved step by step") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 4 + static_cast<int>(rng() % 3);
        HamiltonianSpec spec = normalize_terms(test::random_planted_ff(n, rng));
        TermGraph g = TermGraph::from_spec(spec);
        int expected = kernel_count(dense_of(g));
        for (int guard = 0; guard < 4 * n; ++guard) {
            int fix_site = -1;
            for (const auto& [v, h] : g.site_terms)
                if (term_rank(h, 1e-9) == 1 && fix_site < 0) fix_site = v;
            if (fix_site >= 0) {
                ComplexMatrix ker = numerics::kernel_basis(g.site_terms.at(fix_site), 1e-9);
                auto [g2, st] = fix_spin(g, fix_site, ker.col(0));
                g = std::move(g2);
                CHECK(kernel_count(dense_of(g)) == expected);
                continue;
            }
            std::optional<Edge> target;
            for (const auto& [e, h] : g.pair_terms) {
                int r = term_rank(h, 1e-9);
                if ((r == 2 || r == 3) && !target) target = e;
            }
            if (!target) break;
            auto [g2, st] = contract_pair(g, *target, 1e-9);
            g = std::move(g2);
            CHECK(kernel_count(dense_of(g)) == expected);
        }
    }
}

TEST_CASE("reduce: order independence of verdict and dimension") {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 4 + static_cast<int>(rng() % 4);
        HamiltonianSpec spec = test::random_planted_ff(n, rng);
        if (trial % 3 == 2) spec = test::frustrate(spec, rng);
        ReduceConfig fwd, rev;
        rev.reverse_edge_order = true;
        auto a = reduce(spec, fwd);
        auto b = reduce(spec, rev);
        CHECK(is_frustrated(a) == is_frustrated(b));
        if (!is_frustrated(a)) {
            CHECK(std::get<CompleteHomogeneous>(a).ground_dimension() ==
                  std::get<CompleteHomogeneous>(b).ground_dimension());
        }
    }
}

TEST_CASE("reduce: closure soundness and completeness of residual constraints") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 4 + static_cast<int>(rng() % 3);
        HamiltonianSpec spec = normalize_terms(test::random_planted_ff(n, rng, false));
        auto outcome = reduce(spec);
        REQUIRE(!is_frustrated(outcome));
        const auto& ch = std::get<CompleteHomogeneous>(outcome);

        // each component's constraint graph is complete; all entangled
        for (const auto& comp : ch.components)
            for (size_t i = 0; i < comp.size(); ++i)
                for (size_t j = i + 1; j < comp.size(); ++j) {
                    auto it = ch.constraints.find(Edge(comp[i], comp[j]));
                    REQUIRE(it != ch.constraints.end());
                    CHECK(it->second.entangled);
                }

        // closure: no length-2 path induces anything new (up to scalar)
        for (const auto& [e1, c1] : ch.constraints)
            for (const auto& [e2, c2] : ch.constraints) {
                if (e1 == e2) continue;
                int shared = -1, cnt = 0;
                for (int s : {e1.a, e1.b})
                    if (e2.contains(s)) {
                        shared = s;
                        ++cnt;
                    }
                if (cnt != 1) continue;
                int a = e1.other(shared), c = e2.other(shared);
                auto ind = induce_constraint(c1, c2);
                REQUIRE(ind.has_value());
                auto it = ch.constraints.find(Edge(a, c));
                REQUIRE(it != ch.constraints.end());
                CHECK(1.0 - std::abs(ind->bra.dot(it->second.bra)) < 1e-8);
            }

        // soundness: residual constraints annihilate pullbacks of oracle
        // kernel vectors
        auto h = oracle::AssembledHamiltonian::from_spec(spec);
        auto eig = numerics::hermitian_eig(h.dense(), 1e-8);
        std::vector<int> roots = ch.network.root_sites;
        int nr = static_cast<int>(roots.size());
        for (int i = 0; i < eig.eigenvalues.size() && eig.eigenvalues(i) < 1e-8; ++i) {
            ComplexVector w = eig.eigenvectors.col(i);
            ComplexVector back = ComplexVector::Zero(std::uint64_t(1) << nr);
            for (std::uint64_t j = 0; j < (std::uint64_t(1) << nr); ++j) {
                ComplexVector ej = ComplexVector::Zero(std::uint64_t(1) << nr);
                ej(j) = 1;
                back(j) = std::conj(apply_network(ch.network, ej).dot(w));
            }
            for (const auto& [e, c] : ch.constraints) {
                LocalTerm proj{{e.a, e.b},
                               c.bra.conjugate() * c.bra.conjugate().adjoint()};
                ComplexVector out = ComplexVector::Zero(back.size());
                accumulate_apply(out, proj, back, roots);
                CHECK(std::abs(back.dot(out)) < 1e-9);
            }
        }
    }
}

TEST_CASE("apply_network: empty network is the identity") {
    IsometryNetwork net;
    net.n_leaves = 2;
    net.root_sites = {0, 1};
    ComplexVector v(4);
    v << 1, 2, 3, 4;
    CHECK((apply_network(net, v) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_network: Ising 3-chain maps |0> to |000>") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {3, 1});
    HamiltonianSpec spec = normalize_terms(named_model(ModelName::Tfi, s, 0.0));
    auto outcome = reduce(spec);
    REQUIRE(!is_frustrated(outcome));
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    REQUIRE(ch.network.root_sites.size() == 1);
    ComplexVector root(2);
    root << 1, 0;
    ComplexVector leaf = apply_network(ch.network, root);
    REQUIRE(leaf.size() == 8);
    CHECK(std::abs(std::abs(leaf(0)) - 1.0) < 1e-12);
    // oracle kernel membership
    auto h = oracle::AssembledHamiltonian::from_spec(spec);
    CHECK(h.apply(leaf).norm() < 1e-10);
}

TEST_CASE("apply_network: preserves norms on random states") {
    std::mt19937_64 rng(13);
    HamiltonianSpec spec = normalize_terms(test::random_planted_ff(5, rng));
    auto outcome = reduce(spec);
    REQUIRE(!is_frustrated(outcome));
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    int nr = static_cast<int>(ch.network.root_sites.size());
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        ComplexVector v(std::uint64_t(1) << nr);
        for (int i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
        v.normalize();
        CHECK(std::abs(apply_network(ch.network, v).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("pullback_operator: empty network passes operators through") {
    IsometryNetwork net;
    net.n_leaves = 3;
    net.root_sites = {0, 1, 2};
    Observable z0;
    z0.terms.push_back({Complex(1), {{0, PauliAxis::Z}}});
    auto out = pullback_operator(net, z0);
    REQUIRE(out.size() == 1);
    CHECK(out[0].sites == std::vector<int>{0});
    CHECK((out[0].mat - pauli_z()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pullback_operator: daughter Z maps to parent Z through span{00,11}") {
    Eigen::Matrix<Complex, 4, 2> r = Eigen::Matrix<Complex, 4, 2>::Zero();
    r(0, 0) = 1;  // |00> <- |0>
    r(3, 1) = 1;  // |11> <- |1>
    IsometryNetwork net;
    net.n_leaves = 2;
    net.root_sites = {0};
    net.steps.push_back(PairContraction{0, 1, r});

    Observable zd;
    zd.terms.push_back({Complex(1), {{1, PauliAxis::Z}}});
    auto out = pullback_operator(net, zd);
    REQUIRE(out.size() == 1);
    CHECK(out[0].sites == std::vector<int>{0});
    // independent evaluation of R^dag (1 x Z) R
    ComplexMatrix direct = r.adjoint() * kron(id2(), pauli_z()) * r;
    CHECK((out[0].mat - direct).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((out[0].mat - pauli_z()).cwiseAbs().maxCoeff() < 1e-14);

    Observable unit;
    unit.terms.push_back({Complex(1), {}});
    auto outu = pullback_operator(net, unit);
    REQUIRE(outu.size() == 1);
    CHECK(outu[0].sites.empty());
    CHECK(std::abs(outu[0].mat(0, 0) - Complex(1)) < 1e-14);
}

TEST_CASE("network depth of the Ising chain reduction") {
    SpinSystem s = build_lattice(LatticeKind::Chain, {5, 1});
    auto outcome = reduce(normalize_terms(named_model(ModelName::Tfi, s, 0.0)));
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    CHECK(ch.network.steps.size() == 4);
    CHECK(ch.network.depth() == 4);
}
