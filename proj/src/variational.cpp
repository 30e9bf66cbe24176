#include "ffspin/variational.hpp"

#include "ffspin/numerics.hpp"
#include "ffspin/oracle.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <random>

namespace ffspin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

GroundSpaceModel plain_symmetric_model(int n_sites) {
    GroundSpaceModel model;
    ComponentModel cm;
    cm.root = 0;
    for (int v = 0; v < n_sites; ++v) {
        cm.sites.push_back(v);
        cm.factors[v] = Eigen::Matrix2cd::Identity();
        model.root_sites.push_back(v);
    }
    cm.alphas = choose_alphas(n_sites);
    model.components.push_back(std::move(cm));
    model.network.n_leaves = n_sites;
    model.network.root_sites = model.root_sites;
    return model;
}

// Minimal eigenpair of the restricted operator plus maximal-mixture averages
// of extra observables over the (near-)degenerate minimizing eigenspace.
struct RestrictedMinimum {
    double value = 0.0;
    ComplexVector state;
    int degeneracy = 1;
    int rank = 0;
};

RestrictedMinimum restricted_minimum(const Restrictor& restrictor,
                                     const std::vector<LocalTerm>& terms) {
    RestrictionResult rr = restrictor.restrict(terms);
    // the operators restricted here are Hermitian; drop the numerical skew
    ComplexMatrix h_bar = 0.5 * (rr.restricted + rr.restricted.adjoint());
    auto eig = numerics::hermitian_eig(h_bar, 1e-8);
    RestrictedMinimum rm;
    rm.value = eig.eigenvalues(0);
    rm.state = eig.eigenvectors.col(0);
    rm.rank = rr.retained_rank;
    while (rm.degeneracy < eig.eigenvalues.size() &&
           eig.eigenvalues(rm.degeneracy) <= rm.value + 1e-9)
        ++rm.degeneracy;
    return rm;
}

double degenerate_average(const Restrictor& restrictor, const std::vector<LocalTerm>& h_terms,
                          const std::vector<LocalTerm>& obs_terms) {
    RestrictionResult rr = restrictor.restrict(h_terms);
    ComplexMatrix h_bar = 0.5 * (rr.restricted + rr.restricted.adjoint());
    auto eig = numerics::hermitian_eig(h_bar, 1e-8);
    int deg = 1;
    while (deg < eig.eigenvalues.size() &&
           eig.eigenvalues(deg) <= eig.eigenvalues(0) + 1e-9)
        ++deg;
    ComplexMatrix obs = restrictor.restrict(obs_terms).restricted;
    double acc = 0.0;
    for (int i = 0; i < deg; ++i)
        acc += std::real((eig.eigenvectors.col(i).adjoint() * obs *
                          eig.eigenvectors.col(i))(0, 0));
    return acc / deg;
}

EstimateResult estimate_on_model(const HamiltonianSpec& h, const GroundSpaceModel& model,
                                 const std::string& method, const EstimateOptions& opts) {
    auto t0 = Clock::now();
    Restrictor restrictor(model, {opts.gram_cutoff});
    std::vector<LocalTerm> terms = pullback_operator(model.network, h.local_terms());
    RestrictedMinimum rm = restricted_minimum(restrictor, terms);

    EstimateResult res;
    res.method = method;
    res.energy = rm.value + h.ground_shift;
    res.bound = BoundType::Upper;
    res.subspace_dim = rm.rank;
    res.coefficients = rm.state;
    if (opts.compute_mz) {
        auto mz = pullback_operator(model.network,
                                    magnetization_z(h.system.n_sites).local_terms());
        res.observables["mz_per_site"] =
            degenerate_average(restrictor, terms, mz) / h.system.n_sites;
    }
    res.wall_time_s = seconds_since(t0);
    return res;
}

Eigen::Matrix2cd bloch_unitary(double theta, double phi) {
    Eigen::Matrix2cd u;
    Complex eiphi = std::exp(Complex(0, phi));
    u << std::cos(theta / 2), -std::sin(theta / 2) * std::conj(eiphi),
        std::sin(theta / 2) * eiphi, std::cos(theta / 2);
    return u;
}

std::vector<LocalTerm> rotated_terms(const HamiltonianSpec& h,
                                     const std::vector<Eigen::Matrix2cd>& u) {
    std::vector<LocalTerm> out;
    for (const auto& [e, mat] : h.two_spin_terms) {
        ComplexMatrix w = kron(u[e.a], u[e.b]);
        out.push_back({{e.a, e.b}, w.adjoint() * mat * w});
    }
    for (const auto& [v, mat] : h.single_spin_terms)
        out.push_back({{v}, u[v].adjoint() * mat * u[v]});
    return out;
}

}  // namespace

std::string to_string(BoundType b) {
    switch (b) {
        case BoundType::Upper: return "upper";
        case BoundType::Lower: return "lower";
        case BoundType::Exact: return "exact";
    }
    return "?";
}

EstimateResult symmetric_estimate(const HamiltonianSpec& h, const EstimateOptions& opts) {
    return estimate_on_model(h, plain_symmetric_model(h.system.n_sites), "symmetric", opts);
}

EstimateResult symmetric_estimate(const HamiltonianSpec& h, const GroundSpaceModel& kernel,
                                  const EstimateOptions& opts) {
    return estimate_on_model(h, kernel, "symmetric", opts);
}

EstimateResult symmetric_estimate_kernel(const HamiltonianSpec& h,
                                         const HamiltonianSpec& reference,
                                         const EstimateOptions& opts) {
    ReductionOutcome outcome = reduce(reference);
    if (is_frustrated(outcome))
        throw FrustratedReference("symmetric_estimate: reference Hamiltonian is frustrated");
    GroundSpaceModel model = local_factors(std::get<CompleteHomogeneous>(outcome));
    return estimate_on_model(h, model, "symmetric", opts);
}

EstimateResult product_mean_field(const HamiltonianSpec& h, const EstimateOptions& opts) {
    auto t0 = Clock::now();
    int n = h.system.n_sites;
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto energy_of = [&](const std::vector<Eigen::Vector2cd>& phi) {
        double e = h.ground_shift;
        for (const auto& [edge, mat] : h.two_spin_terms) {
            Eigen::Vector4cd pq = kron(phi[edge.a], phi[edge.b]);
            e += std::real(pq.dot(ComplexMatrix(mat) * pq));
        }
        for (const auto& [v, mat] : h.single_spin_terms)
            e += std::real(phi[v].dot(Eigen::Matrix2cd(mat) * phi[v]));
        return e;
    };

    std::vector<Eigen::Vector2cd> best;
    double best_energy = 0.0;
    for (int attempt = 0; attempt < std::max(1, opts.restarts); ++attempt) {
        std::vector<Eigen::Vector2cd> phi(n);
        for (auto& p : phi) {
            p << Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng));
            p.normalize();
        }
        double prev = energy_of(phi);
        for (int sweep = 0; sweep < 1000; ++sweep) {
            for (int v = 0; v < n; ++v) {
                Eigen::Matrix2cd field = Eigen::Matrix2cd::Zero();
                if (auto it = h.single_spin_terms.find(v); it != h.single_spin_terms.end())
                    field += it->second;
                for (const auto& [edge, mat] : h.two_spin_terms) {
                    if (!edge.contains(v)) continue;
                    int other = edge.other(v);
                    field += contract_site(mat, {edge.a, edge.b}, other, phi[other]);
                }
                if (field.cwiseAbs().maxCoeff() < 1e-300) continue;
                auto eig = numerics::hermitian_eig(field, 1e-8);
                phi[v] = eig.eigenvectors.col(0);
            }
            double now = energy_of(phi);
            if (prev - now < 1e-10) {
                prev = now;
                break;
            }
            prev = now;
        }
        if (attempt == 0 || prev < best_energy) {
            best_energy = prev;
            best = phi;
        }
    }

    EstimateResult res;
    res.method = "product";
    res.energy = best_energy;
    res.bound = BoundType::Upper;
    res.subspace_dim = 1;
    if (opts.compute_mz) {
        double mz = 0.0;
        for (int v = 0; v < n; ++v)
            mz += std::real(best[v].dot(Eigen::Matrix2cd(pauli_z()) * best[v]));
        res.observables["mz_per_site"] = mz / n;
    }
    ComplexVector coeff(2 * n);
    for (int v = 0; v < n; ++v) coeff.segment(2 * v, 2) = best[v];
    res.coefficients = coeff;
    res.wall_time_s = seconds_since(t0);
    return res;
}

EstimateResult anderson_bound(const HamiltonianSpec& h) {
    auto t0 = Clock::now();
    std::map<int, int> degree;
    for (const auto& [e, mat] : h.two_spin_terms) {
        ++degree[e.a];
        ++degree[e.b];
    }
    double bound = h.ground_shift;
    for (const auto& [e, mat] : h.two_spin_terms) {
        ComplexMatrix cluster = mat;
        for (int v : {e.a, e.b}) {
            auto it = h.single_spin_terms.find(v);
            if (it == h.single_spin_terms.end()) continue;
            cluster += embed(it->second, {v}, {e.a, e.b}) / degree.at(v);
        }
        bound += numerics::hermitian_eigenvalues(cluster)(0);
    }
    for (const auto& [v, mat] : h.single_spin_terms)
        if (!degree.count(v)) bound += numerics::hermitian_eigenvalues(mat)(0);

    EstimateResult res;
    res.method = "anderson";
    res.energy = bound;
    res.bound = BoundType::Lower;
    res.wall_time_s = seconds_since(t0);
    return res;
}

std::vector<Edge> greedy_matching(const SpinSystem& system) {
    std::vector<Edge> matching;
    std::vector<char> used(system.n_sites, 0);
    for (const Edge& e : system.edges) {
        if (used[e.a] || used[e.b]) continue;
        used[e.a] = used[e.b] = 1;
        matching.push_back(e);
    }
    return matching;
}

std::pair<QLayer, HamiltonianSpec> build_q_layer(const HamiltonianSpec& h,
                                                 const std::vector<Edge>& matching) {
    int n = h.system.n_sites;
    std::vector<int> pair_of(n, -1);
    for (size_t i = 0; i < matching.size(); ++i) {
        const Edge& e = matching[i];
        if (!h.system.has_edge(e))
            throw NotAMatching("q-layer pair (" + std::to_string(e.a) + "," +
                               std::to_string(e.b) + ") is not an edge");
        if (pair_of[e.a] >= 0 || pair_of[e.b] >= 0)
            throw NotAMatching("q-layer pairs must be disjoint");
        pair_of[e.a] = pair_of[e.b] = static_cast<int>(i);
    }

    auto terms = h.local_terms();
    QLayer layer;
    layer.matching = matching;
    for (const Edge& e : matching) {
        // two-site reduced operator: the normalized partial trace of H
        ComplexMatrix eta = ComplexMatrix::Zero(4, 4);
        std::vector<int> pair_sites = {e.a, e.b};
        for (const auto& t : terms) {
            int inside = 0;
            for (int s : t.sites) inside += e.contains(s) ? 1 : 0;
            if (inside == static_cast<int>(t.sites.size()) && !t.sites.empty()) {
                eta += embed(t.mat, t.sites, pair_sites);
            } else if (inside == 1 && t.sites.size() == 2) {
                int in_site = e.contains(t.sites[0]) ? t.sites[0] : t.sites[1];
                int out_site = t.sites[0] == in_site ? t.sites[1] : t.sites[0];
                ComplexMatrix red = trace_site(t.mat, t.sites, out_site) / 2.0;
                eta += embed(red, {in_site}, pair_sites);
            }
            // fully outside terms only shift eta by a scalar
        }
        auto eig = numerics::hermitian_eig(eta, 1e-8);
        layer.isometries.push_back(eig.eigenvectors.leftCols(2));
    }

    // relabeling: matched pairs collapse onto their lower site
    std::vector<int> survivors;
    for (int s = 0; s < n; ++s)
        if (pair_of[s] < 0 || matching[pair_of[s]].a == s) survivors.push_back(s);
    std::map<int, int> new_label;
    for (size_t i = 0; i < survivors.size(); ++i) new_label[survivors[i]] = static_cast<int>(i);
    layer.parent_of_new_site = survivors;

    double floor = 1e-12;
    for (const auto& t : terms) floor = std::max(floor, 1e-12 * t.mat.cwiseAbs().maxCoeff());

    std::map<std::vector<int>, ComplexMatrix> mapped;
    for (const auto& t : terms) {
        std::vector<int> logical;
        for (int s : t.sites) {
            int l = pair_of[s] >= 0 ? matching[pair_of[s]].a : s;
            if (std::find(logical.begin(), logical.end(), l) == logical.end())
                logical.push_back(l);
        }
        std::sort(logical.begin(), logical.end());
        std::vector<int> phys;
        for (int l : logical) {
            if (pair_of[l] >= 0) {
                phys.push_back(matching[pair_of[l]].a);
                phys.push_back(matching[pair_of[l]].b);
            } else {
                phys.push_back(l);
            }
        }
        std::sort(phys.begin(), phys.end());

        int nl = static_cast<int>(logical.size());
        int np = static_cast<int>(phys.size());
        ComplexMatrix k = ComplexMatrix::Zero(std::uint64_t(1) << np, std::uint64_t(1) << nl);
        for (std::uint64_t pidx = 0; pidx < (std::uint64_t(1) << np); ++pidx)
            for (std::uint64_t lidx = 0; lidx < (std::uint64_t(1) << nl); ++lidx) {
                Complex val(1);
                for (int li = 0; li < nl && val != Complex(0); ++li) {
                    int l = logical[li];
                    std::uint64_t bl = (lidx >> bit_shift(li, nl)) & 1u;
                    if (pair_of[l] >= 0) {
                        const Edge& pe = matching[pair_of[l]];
                        std::uint64_t ba =
                            (pidx >> bit_shift(position_of(phys, pe.a), np)) & 1u;
                        std::uint64_t bb =
                            (pidx >> bit_shift(position_of(phys, pe.b), np)) & 1u;
                        val *= layer.isometries[pair_of[l]](ba * 2 + bb, bl);
                    } else {
                        std::uint64_t bp = (pidx >> bit_shift(position_of(phys, l), np)) & 1u;
                        if (bp != bl) val = Complex(0);
                    }
                }
                k(pidx, lidx) = val;
            }

        ComplexMatrix lifted = embed(t.mat, t.sites, phys);
        ComplexMatrix res = k.adjoint() * lifted * k;
        res = 0.5 * (res + res.adjoint());
        if (res.cwiseAbs().maxCoeff() < floor) continue;
        std::vector<int> relabeled;
        for (int l : logical) relabeled.push_back(new_label.at(l));
        auto it = mapped.find(relabeled);
        if (it == mapped.end())
            mapped[relabeled] = res;
        else
            it->second += res;
    }

    HamiltonianSpec out;
    out.system.n_sites = static_cast<int>(survivors.size());
    out.ground_shift = h.ground_shift;
    for (auto& [sites, mat] : mapped) {
        if (mat.cwiseAbs().maxCoeff() < floor) continue;
        if (sites.size() == 2) {
            out.system.edges.emplace_back(sites[0], sites[1]);
            out.two_spin_terms[Edge(sites[0], sites[1])] = mat;
        } else if (sites.size() == 1) {
            out.single_spin_terms[sites[0]] = mat;
        }
    }
    std::sort(out.system.edges.begin(), out.system.edges.end());
    return {std::move(layer), std::move(out)};
}

EstimateResult rotated_symmetric_estimate(const HamiltonianSpec& h,
                                          const EstimateOptions& opts) {
    auto t0 = Clock::now();
    int n = h.system.n_sites;
    GroundSpaceModel model = plain_symmetric_model(n);
    Restrictor restrictor(model, {opts.gram_cutoff});

    auto objective = [&](const std::vector<double>& angles) {
        std::vector<Eigen::Matrix2cd> u(n);
        for (int v = 0; v < n; ++v) u[v] = bloch_unitary(angles[2 * v], angles[2 * v + 1]);
        RestrictionResult rr = restrictor.restrict(rotated_terms(h, u));
        ComplexMatrix h_bar = 0.5 * (rr.restricted + rr.restricted.adjoint());
        return numerics::hermitian_eigenvalues(h_bar, 1e-8)(0) + h.ground_shift;
    };

    auto golden = [&](std::vector<double>& angles, int idx, double lo, double hi) {
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        angles[idx] = c;
        double fc = objective(angles);
        angles[idx] = d;
        double fd = objective(angles);
        for (int i = 0; i < opts.line_search_iters; ++i) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                angles[idx] = c;
                fc = objective(angles);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                angles[idx] = d;
                fd = objective(angles);
            }
        }
        angles[idx] = fc < fd ? c : d;
        return std::min(fc, fd);
    };

    // starting points: identity, the mean-field optimum, and random draws
    std::vector<std::vector<double>> starts;
    starts.emplace_back(2 * n, 0.0);
    EstimateOptions pm_opts = opts;
    pm_opts.compute_mz = false;
    EstimateResult pm = product_mean_field(h, pm_opts);
    {
        std::vector<double> a(2 * n, 0.0);
        for (int v = 0; v < n; ++v) {
            Complex c0 = (*pm.coefficients)(2 * v), c1 = (*pm.coefficients)(2 * v + 1);
            a[2 * v] = 2.0 * std::atan2(std::abs(c1), std::abs(c0));
            a[2 * v + 1] = std::arg(c1) - std::arg(c0);
        }
        starts.push_back(std::move(a));
    }
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uni(0.0, M_PI);
    for (int r = 0; r < 2; ++r) {
        std::vector<double> a(2 * n);
        for (int i = 0; i < 2 * n; ++i) a[i] = uni(rng) * (i % 2 ? 2.0 : 1.0);
        starts.push_back(std::move(a));
    }

    std::vector<double> best_angles;
    double best = 0.0;
    bool first = true;
    for (auto& angles : starts) {
        double e = objective(angles);
        for (int sweep = 0; sweep < opts.budget_sweeps; ++sweep) {
            for (int v = 0; v < n; ++v)
                for (int q = 0; q < 2; ++q) {
                    int idx = 2 * v + q;
                    double center = angles[idx];
                    e = std::min(e, golden(angles, idx, center - M_PI / 2, center + M_PI / 2));
                }
        }
        e = objective(angles);
        if (first || e < best) {
            best = e;
            best_angles = angles;
            first = false;
        }
    }
    // never worse than the product ansatz it contains
    if (pm.energy < best) {
        best = std::min(best, pm.energy);
        best_angles = starts[1];
    }

    EstimateResult res;
    res.method = "rotated";
    res.energy = best;
    res.bound = BoundType::Upper;
    res.subspace_dim = restrictor.retained_rank();
    if (opts.compute_mz) {
        std::vector<Eigen::Matrix2cd> u(n);
        for (int v = 0; v < n; ++v)
            u[v] = bloch_unitary(best_angles[2 * v], best_angles[2 * v + 1]);
        std::vector<LocalTerm> mz;
        for (int v = 0; v < n; ++v)
            mz.push_back({{v}, u[v].adjoint() * pauli_z() * u[v]});
        res.observables["mz_per_site"] =
            degenerate_average(restrictor, rotated_terms(h, u), mz) / n;
    }
    res.wall_time_s = seconds_since(t0);
    return res;
}

// ---- sweeps ----

namespace {

SweepRow run_cell(const SweepRequest& req, double lambda, const std::string& method,
                  unsigned cell_seed) {
    SweepRow row;
    row.lambda = lambda;
    row.method = method;
    auto t0 = Clock::now();
    try {
        SpinSystem system = build_lattice(req.lattice, req.dims);
        HamiltonianSpec spec = named_model(req.model, system, lambda);
        int n = system.n_sites;
        bool want_mz = std::find(req.observables.begin(), req.observables.end(), "mz") !=
                       req.observables.end();

        EstimateOptions opts;
        opts.seed = cell_seed;
        opts.compute_mz = want_mz;

        if (method == "ed") {
            oracle::OracleOptions oopts;
            oopts.dense_limit = req.oracle_dense_limit;
            oopts.size_limit = req.oracle_size_limit;
            oopts.seed = cell_seed;
            auto ed = oracle::exact_ground(spec, 6, oopts);
            row.energy = ed.energy;
            row.bound_type = "exact";
            row.ground_dim = ed.degeneracy;
            if (want_mz) {
                auto mz_terms = magnetization_z(n).local_terms();
                auto sites = oracle::AssembledHamiltonian::from_spec(spec).site_list();
                double acc = 0.0;
                for (int i = 0; i < ed.degeneracy; ++i) {
                    ComplexVector v = ed.eigenvectors.col(i);
                    ComplexVector av = ComplexVector::Zero(v.size());
                    for (const auto& t : mz_terms) accumulate_apply(av, t, v, sites);
                    acc += std::real(v.dot(av));
                }
                row.mz_per_site = acc / ed.degeneracy / n;
            }
        } else {
            EstimateResult er;
            if (method == "symmetric") {
                er = symmetric_estimate(spec, opts);
            } else if (method == "product") {
                er = product_mean_field(spec, opts);
            } else if (method == "anderson") {
                er = anderson_bound(spec);
            } else if (method == "rotated") {
                er = rotated_symmetric_estimate(spec, opts);
            } else if (method == "qsym") {
                auto [layer, reduced] = build_q_layer(spec, greedy_matching(system));
                er = symmetric_estimate(reduced, opts);
                er.method = "qsym";
                if (want_mz) {
                    IsometryNetwork net;
                    net.n_leaves = n;
                    for (size_t i = 0; i < layer.matching.size(); ++i)
                        net.steps.push_back(PairContraction{layer.matching[i].a,
                                                            layer.matching[i].b,
                                                            layer.isometries[i]});
                    for (int s : layer.parent_of_new_site) net.root_sites.push_back(s);
                    auto pulled = pullback_operator(net, magnetization_z(n));
                    std::map<int, int> relabel;
                    for (size_t i = 0; i < layer.parent_of_new_site.size(); ++i)
                        relabel[layer.parent_of_new_site[i]] = static_cast<int>(i);
                    for (auto& t : pulled)
                        for (auto& s : t.sites) s = relabel.at(s);
                    GroundSpaceModel m2 = plain_symmetric_model(reduced.system.n_sites);
                    Restrictor r2(m2, {opts.gram_cutoff});
                    er.observables["mz_per_site"] =
                        degenerate_average(
                            r2, pullback_operator(m2.network, reduced.local_terms()),
                            pulled) /
                        n;
                }
            } else {
                throw Error("unknown method: " + method);
            }
            row.energy = er.energy;
            row.bound_type = to_string(er.bound);
            if (er.subspace_dim > 0) row.ground_dim = er.subspace_dim;
            if (auto it = er.observables.find("mz_per_site"); it != er.observables.end())
                row.mz_per_site = it->second;
        }
        if (row.energy) row.energy_per_site = *row.energy / n;
    } catch (const std::exception& ex) {
        row.error = ex.what();
    }
    if (req.timings)
        row.runtime_ms = 1000.0 * seconds_since(t0);
    return row;
}

}  // namespace

std::vector<SweepRow> lambda_sweep(const SweepRequest& req) {
    struct Cell {
        double lambda;
        std::string method;
        unsigned seed;
    };
    std::vector<Cell> cells;
    std::vector<std::string> methods = req.methods;
    std::sort(methods.begin(), methods.end());
    std::vector<double> lambdas = req.lambdas;
    std::sort(lambdas.begin(), lambdas.end());
    for (size_t li = 0; li < lambdas.size(); ++li)
        for (size_t mi = 0; mi < methods.size(); ++mi)
            cells.push_back({lambdas[li], methods[mi],
                             req.seed + 1000003u * static_cast<unsigned>(li) +
                                 static_cast<unsigned>(mi)});

    std::vector<SweepRow> rows(cells.size());
    int threads = std::max(1, req.threads);
    if (threads == 1) {
        for (size_t i = 0; i < cells.size(); ++i)
            rows[i] = run_cell(req, cells[i].lambda, cells[i].method, cells[i].seed);
    } else {
        for (size_t base = 0; base < cells.size(); base += threads) {
            std::vector<std::future<SweepRow>> futs;
            for (size_t i = base; i < std::min(cells.size(), base + threads); ++i)
                futs.push_back(std::async(std::launch::async, [&, i] {
                    return run_cell(req, cells[i].lambda, cells[i].method, cells[i].seed);
                }));
            for (size_t i = 0; i < futs.size(); ++i) rows[base + i] = futs[i].get();
        }
    }
    return rows;
}

}  // namespace ffspin
