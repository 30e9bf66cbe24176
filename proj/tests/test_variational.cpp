#include "doctest.h"

#include "ffspin/numerics.hpp"
#include "ffspin/oracle.hpp"
#include "ffspin/variational.hpp"
#include "test_support.hpp"

using namespace ffspin;

TEST_CASE("symmetric_estimate: exact for the frustration-free XXZ point") {
    SpinSystem torus = build_lattice(LatticeKind::TrigonalTorus, {3, 3});
    HamiltonianSpec spec = named_model(ModelName::Xxz, torus, 0.0);
    EstimateResult est = symmetric_estimate(spec);
    auto ed = oracle::exact_ground(spec, 2);
    CHECK(est.energy == doctest::Approx(ed.energy).epsilon(1e-10));
    CHECK(est.energy == doctest::Approx(-27.0).epsilon(1e-10));
    CHECK(est.bound == BoundType::Upper);
    CHECK(est.subspace_dim == 10);
}

TEST_CASE("symmetric_estimate: TFI torus at lambda 0 hits the aligned product value") {
    SpinSystem torus = build_lattice(LatticeKind::SquareTorus, {4, 4});
    HamiltonianSpec spec = named_model(ModelName::Tfi, torus, 0.0);
    EstimateResult est = symmetric_estimate(spec);
    CHECK(est.energy == doctest::Approx(-32.0).epsilon(1e-9));
}

TEST_CASE("symmetric_estimate: derivative at lambda 0 matches the oracle") {
    SpinSystem torus = build_lattice(LatticeKind::TrigonalTorus, {3, 3});
    double h = 1e-4;
    auto est = [&](double lam) {
        return symmetric_estimate(named_model(ModelName::Xxz, torus, lam)).energy;
    };
    auto ora = [&](double lam) {
        return oracle::exact_ground(named_model(ModelName::Xxz, torus, lam), 2).energy;
    };
    double d_est = (est(h) - est(-h)) / (2 * h);
    double d_ora = (ora(h) - ora(-h)) / (2 * h);
    CHECK(std::abs(d_est - d_ora) < 1e-3 * std::abs(d_ora));
    CHECK(est(0.0) == doctest::Approx(ora(0.0)).epsilon(1e-10));
}

TEST_CASE("symmetric_estimate on a reduced kernel model") {
    // restriction to the ground manifold of the Ising chain (2-dimensional)
    SpinSystem chain = build_lattice(LatticeKind::Chain, {5, 1});
    HamiltonianSpec ising = named_model(ModelName::Tfi, chain, 0.0);
    HamiltonianSpec perturbed = named_model(ModelName::Tfi, chain, 0.05);
    EstimateResult est = symmetric_estimate_kernel(perturbed, ising);
    auto ed = oracle::exact_ground(perturbed, 2);
    CHECK(est.energy >= ed.energy - 1e-8);
    CHECK(est.subspace_dim == 2);
    // frustrated reference rejected
    CHECK_THROWS_AS(symmetric_estimate_kernel(perturbed, perturbed), FrustratedReference);
}

TEST_CASE("product_mean_field: ferro XXX chain reaches -(N-1)") {
    SpinSystem chain = build_lattice(LatticeKind::Chain, {5, 1});
    HamiltonianSpec spec = named_model(ModelName::HeisenbergFerro, chain, 0.0);
    EstimateOptions opts;
    opts.restarts = 4;
    EstimateResult est = product_mean_field(spec, opts);
    CHECK(est.energy == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("product_mean_field: TFI limits") {
    SpinSystem torus = build_lattice(LatticeKind::SquareTorus, {3, 3});
    EstimateOptions opts;
    opts.compute_mz = true;
    EstimateResult at0 = product_mean_field(named_model(ModelName::Tfi, torus, 0.0), opts);
    CHECK(at0.energy == doctest::Approx(-18.0).epsilon(1e-9));
    CHECK(std::abs(std::abs(at0.observables.at("mz_per_site")) - 1.0) < 1e-8);

    EstimateResult at10 = product_mean_field(named_model(ModelName::Tfi, torus, 10.0), opts);
    CHECK(std::abs(at10.observables.at("mz_per_site")) < 0.05);
    CHECK(at10.energy <= -10.0 * 9 + 1e-6);  // X-polarized value
}

TEST_CASE("anderson_bound: tight for frustration-free models") {
    SpinSystem chain = build_lattice(LatticeKind::Chain, {3, 1});
    HamiltonianSpec xxx = named_model(ModelName::HeisenbergFerro, chain, 0.0);
    EstimateResult b = anderson_bound(xxx);
    CHECK(b.energy == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(b.energy == doctest::Approx(oracle::exact_ground(xxx, 1).energy).epsilon(1e-9));
    CHECK(b.bound == BoundType::Lower);

    // normalized FF Hamiltonian: bound equals the ground energy exactly
    HamiltonianSpec norm = normalize_terms(xxx);
    EstimateResult bn = anderson_bound(norm);
    CHECK(bn.energy == doctest::Approx(oracle::exact_ground(norm, 1).energy).epsilon(1e-9));
}

TEST_CASE("anderson_bound: below the oracle on frustrated XXZ") {
    SpinSystem torus = build_lattice(LatticeKind::TrigonalTorus, {3, 3});
    HamiltonianSpec spec = named_model(ModelName::Xxz, torus, 0.2);
    EstimateResult b = anderson_bound(spec);
    double per_term = numerics::hermitian_eigenvalues(spec.two_spin_terms.begin()->second)(0);
    CHECK(b.energy == doctest::Approx(27.0 * per_term).epsilon(1e-12));
    CHECK(b.energy <= oracle::exact_ground(spec, 1).energy + 1e-8);
}

TEST_CASE("build_q_layer: single edge keeps the two lowest eigenvectors") {
    std::mt19937_64 rng(61);
    SpinSystem s = build_lattice(LatticeKind::Chain, {2, 1});
    HamiltonianSpec spec;
    spec.system = s;
    spec.two_spin_terms[Edge(0, 1)] = test::random_hermitian(4, rng);
    auto [layer, reduced] = build_q_layer(spec, {Edge(0, 1)});
    REQUIRE(layer.isometries.size() == 1);
    CHECK((layer.isometries[0].adjoint() * layer.isometries[0] -
           Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    RealVector w = numerics::hermitian_eigenvalues(spec.two_spin_terms.at(Edge(0, 1)));
    RealVector wr = oracle::dense_spectrum(reduced);
    CHECK(wr(0) == doctest::Approx(w(0)).epsilon(1e-10));
    CHECK(wr(1) == doctest::Approx(w(1)).epsilon(1e-10));
}

TEST_CASE("build_q_layer: 4-cycle contracts to two sites and raises the minimum") {
    SpinSystem cycle;  // the 2x2 torus collapses to a 4-cycle
    cycle.n_sites = 4;
    cycle.edges = {Edge(0, 1), Edge(0, 3), Edge(1, 2), Edge(2, 3)};
    HamiltonianSpec spec = named_model(ModelName::Tfi, cycle, 0.8);
    auto [layer, reduced] = build_q_layer(spec, {Edge(0, 1), Edge(2, 3)});
    CHECK(reduced.system.n_sites == 2);
    double e_full = oracle::exact_ground(spec, 1).energy;
    double e_red = oracle::exact_ground(reduced, 1).energy;
    CHECK(e_red >= e_full - 1e-9);
}

TEST_CASE("build_q_layer: matching validation") {
    SpinSystem chain = build_lattice(LatticeKind::Chain, {4, 1});
    HamiltonianSpec spec = named_model(ModelName::HeisenbergFerro, chain, 0.0);
    CHECK_THROWS_AS(build_q_layer(spec, {Edge(0, 2)}), NotAMatching);
    CHECK_THROWS_AS(build_q_layer(spec, {Edge(0, 1), Edge(1, 2)}), NotAMatching);
}

TEST_CASE("build_q_layer: isometric restriction never lowers the minimum (property)") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 4 + static_cast<int>(rng() % 3);
        SpinSystem s = test::random_connected_graph(n, 0.4, rng);
        HamiltonianSpec spec;
        spec.system = s;
        for (const Edge& e : s.edges) spec.two_spin_terms[e] = test::random_hermitian(4, rng);
        if (trial % 2) spec.single_spin_terms[1] = test::random_hermitian(2, rng);
        auto matching = greedy_matching(s);
        REQUIRE(!matching.empty());
        auto [layer, reduced] = build_q_layer(spec, matching);
        double e_full = oracle::exact_ground(spec, 1).energy;
        double e_red = oracle::exact_ground(reduced, 1).energy;
        CHECK(e_red >= e_full - 1e-9);
    }
}

TEST_CASE("rotated_symmetric_estimate: exact on the ferromagnet, dominates product") {
    SpinSystem chain = build_lattice(LatticeKind::Chain, {5, 1});
    HamiltonianSpec xxx = named_model(ModelName::HeisenbergFerro, chain, 0.0);
    EstimateOptions opts;
    opts.budget_sweeps = 2;
    EstimateResult rot = rotated_symmetric_estimate(xxx, opts);
    auto ed = oracle::exact_ground(xxx, 1);
    CHECK(rot.energy == doctest::Approx(ed.energy).epsilon(1e-9));
    EstimateResult pm = product_mean_field(xxx, opts);
    CHECK(rot.energy <= pm.energy + 1e-7);
}

TEST_CASE("rotated_symmetric_estimate: recovers the X-polarized product at strong field") {
    SpinSystem torus = build_lattice(LatticeKind::SquareTorus, {3, 3});
    HamiltonianSpec spec = named_model(ModelName::Tfi, torus, 10.0);
    EstimateOptions opts;
    opts.budget_sweeps = 2;
    EstimateResult rot = rotated_symmetric_estimate(spec, opts);
    EstimateResult pm = product_mean_field(spec, opts);
    CHECK(rot.energy <= pm.energy + 1e-7);
    CHECK(rot.energy == doctest::Approx(pm.energy).epsilon(1e-2));
    CHECK(rot.energy >= oracle::exact_ground(spec, 1).energy - 1e-8);
}

TEST_CASE("rotated_symmetric_estimate: never above product on mixed instances") {
    std::mt19937_64 rng(97);
    SpinSystem chain = build_lattice(LatticeKind::Chain, {4, 1});
    for (double lam : {0.1, 0.6, 1.5}) {
        HamiltonianSpec spec = named_model(ModelName::Xxz, chain, lam);
        EstimateOptions opts;
        opts.budget_sweeps = 2;
        opts.seed = static_cast<unsigned>(rng());
        EstimateResult rot = rotated_symmetric_estimate(spec, opts);
        EstimateResult pm = product_mean_field(spec, opts);
        CHECK(rot.energy <= pm.energy + 1e-7);
        CHECK(rot.energy >= oracle::exact_ground(spec, 1).energy - 1e-8);
    }
}

TEST_CASE("lambda_sweep: XXZ bound ordering and determinism") {
    SweepRequest req;
    req.model = ModelName::Xxz;
    req.lattice = LatticeKind::TrigonalTorus;
    req.dims = {3, 3};
    req.lambdas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    req.methods = {"symmetric", "product", "ed", "anderson"};
    req.observables = {"mz"};
    req.seed = 12345;

    auto rows = lambda_sweep(req);
    REQUIRE(rows.size() == 24);

    std::map<std::pair<double, std::string>, SweepRow> by_key;
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        by_key[{r.lambda, r.method}] = r;
    }
    for (double lam : req.lambdas) {
        double anderson = *by_key.at({lam, "anderson"}).energy;
        double ed = *by_key.at({lam, "ed"}).energy;
        double symmetric = *by_key.at({lam, "symmetric"}).energy;
        double product = *by_key.at({lam, "product"}).energy;
        CHECK(anderson <= ed + 1e-8);
        CHECK(ed <= symmetric + 1e-8);
        CHECK(symmetric <= product + 1e-7);
    }
    // exactness at the frustration-free point
    CHECK(*by_key.at({0.0, "symmetric"}).energy ==
          doctest::Approx(*by_key.at({0.0, "ed"}).energy).epsilon(1e-10));

    // a second run with the same seed reproduces the numbers exactly
    auto rows2 = lambda_sweep(req);
    REQUIRE(rows2.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].lambda == rows2[i].lambda);
        CHECK(rows[i].method == rows2[i].method);
        CHECK(*rows[i].energy == *rows2[i].energy);
    }
}

TEST_CASE("lambda_sweep: worker threads do not change the results") {
    SweepRequest req;
    req.model = ModelName::Xxz;
    req.lattice = LatticeKind::Chain;
    req.dims = {5, 1};
    req.lambdas = {0.0, 0.2, 0.4};
    req.methods = {"symmetric", "product", "anderson"};
    req.seed = 99;
    auto serial = lambda_sweep(req);
    req.threads = 2;
    auto parallel = lambda_sweep(req);
    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].method == parallel[i].method);
        CHECK(*serial[i].energy == *parallel[i].energy);
    }
}

TEST_CASE("lambda_sweep: empty grid gives an empty table, bad methods error per row") {
    SweepRequest req;
    req.model = ModelName::Xxz;
    req.lattice = LatticeKind::Chain;
    req.dims = {4, 1};
    req.methods = {"symmetric"};
    CHECK(lambda_sweep(req).empty());

    req.lambdas = {0.1};
    req.methods = {"bogus", "symmetric"};
    auto rows = lambda_sweep(req);
    REQUIRE(rows.size() == 2);
    CHECK(!rows[0].error.empty());  // methods sorted: bogus first
    CHECK(rows[1].error.empty());
}
