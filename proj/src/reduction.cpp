#include "ffspin/reduction.hpp"

#include "ffspin/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>

namespace ffspin {

namespace {

const Eigen::Matrix2cd& j_mat() {
    static const Eigen::Matrix2cd j = (Eigen::Matrix2cd() << 0, 1, -1, 0).finished();
    return j;
}

Eigen::Vector4cd flatten(const Eigen::Matrix2cd& m) {
    Eigen::Vector4cd v;
    v << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
    return v;
}

// Isometry from sites_out \ {q} to sites_out: R on the (p, q) pair (p < q,
// row index |p q>), identity elsewhere.
ComplexMatrix step_embed(const std::vector<int>& sites_out, int p, int q,
                         const Eigen::Matrix<Complex, 4, 2>& r) {
    int n = static_cast<int>(sites_out.size());
    std::vector<int> sites_in;
    for (int s : sites_out)
        if (s != q) sites_in.push_back(s);
    int m = n - 1;
    int pos_p_in = position_of(sites_in, p);
    int pos_p_out = position_of(sites_out, p);
    int pos_q_out = position_of(sites_out, q);
    assert(pos_p_in >= 0 && pos_p_out >= 0 && pos_q_out >= 0);

    std::uint64_t dim_in = std::uint64_t(1) << m;
    ComplexMatrix out = ComplexMatrix::Zero(std::uint64_t(1) << n, dim_in);
    for (std::uint64_t i = 0; i < dim_in; ++i) {
        // spread the untouched bits of the input index into the output index
        std::uint64_t base = 0;
        for (int pos = 0; pos < m; ++pos) {
            if (pos == pos_p_in) continue;
            std::uint64_t bit = (i >> bit_shift(pos, m)) & 1u;
            int s = sites_in[pos];
            base |= bit << bit_shift(position_of(sites_out, s), n);
        }
        std::uint64_t bin = (i >> bit_shift(pos_p_in, m)) & 1u;
        for (int bp = 0; bp < 2; ++bp)
            for (int bq = 0; bq < 2; ++bq) {
                Complex v = r(bp * 2 + bq, bin);
                if (v == Complex(0)) continue;
                std::uint64_t idx = base |
                                    (std::uint64_t(bp) << bit_shift(pos_p_out, n)) |
                                    (std::uint64_t(bq) << bit_shift(pos_q_out, n));
                out(idx, i) += v;
            }
    }
    return out;
}

void hermitize(ComplexMatrix& m) { m = 0.5 * (m + m.adjoint()); }

bool negligible(const ComplexMatrix& m, double floor) {
    return m.cwiseAbs().maxCoeff() < floor;
}

}  // namespace

Constraint make_constraint(Edge e, const Eigen::Vector4cd& raw_bra) {
    Constraint c;
    c.edge = e;
    double n = raw_bra.norm();
    if (n <= 0) throw Error("make_constraint: zero functional");
    c.bra = raw_bra / n;
    Eigen::Matrix2cd m;
    m << c.bra(0), c.bra(1), c.bra(2), c.bra(3);
    c.entangled = std::abs(m.determinant()) > 1e-10;
    return c;
}

Eigen::Matrix2cd bra_matrix(const Constraint& c, int first_site) {
    Eigen::Matrix2cd m;
    m << c.bra(0), c.bra(1), c.bra(2), c.bra(3);
    if (first_site == c.edge.a) return m;
    assert(first_site == c.edge.b);
    return m.transpose();
}

int IsometryNetwork::depth() const {
    std::map<int, int> d;
    for (int s : root_sites) d[s] = 0;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (const auto* pc = std::get_if<PairContraction>(&*it)) {
            int base = d.count(pc->parent) ? d[pc->parent] : 0;
            d[pc->parent] = base + 1;
            d[pc->daughter] = base + 1;
        } else {
            const auto& sf = std::get<SpinFix>(*it);
            d[sf.site] = 1;
        }
    }
    int mx = 0;
    for (const auto& [s, v] : d) mx = std::max(mx, v);
    return mx;
}

TermGraph TermGraph::from_spec(const HamiltonianSpec& spec) {
    TermGraph g;
    g.n_leaves = spec.system.n_sites;
    for (int s = 0; s < g.n_leaves; ++s) g.sites.insert(s);
    g.shift = spec.ground_shift;
    g.scale = 1e-300;
    for (const auto& [e, h] : spec.two_spin_terms) {
        ComplexMatrix m = h;
        hermitize(m);
        g.pair_terms[e] = m;
        g.scale = std::max(g.scale, m.cwiseAbs().maxCoeff());
    }
    for (const auto& [v, h] : spec.single_spin_terms) {
        ComplexMatrix m = h;
        hermitize(m);
        g.site_terms[v] = m;
        g.scale = std::max(g.scale, m.cwiseAbs().maxCoeff());
    }
    g.scale = std::max(g.scale, 1e-300);
    return g;
}

int term_rank(const ComplexMatrix& h, double tol) {
    RealVector w = numerics::hermitian_eigenvalues(h, 1e-8);
    double lambda_max = w(w.size() - 1);
    if (lambda_max < 1e-300) return 0;
    int r = 0;
    for (int i = 0; i < w.size(); ++i)
        if (w(i) > tol * lambda_max) ++r;
    return r;
}

std::pair<TermGraph, IsometryStep> contract_pair(const TermGraph& g, Edge e, double tol) {
    auto it = g.pair_terms.find(e);
    if (it == g.pair_terms.end()) throw Error("contract_pair: no term on that edge");
    const ComplexMatrix& h = it->second;
    int rank = term_rank(h, tol);
    if (rank != 2 && rank != 3)
        throw RankOutOfRange("contract_pair: term rank " + std::to_string(rank) +
                             " is not 2 or 3");
    auto eig = numerics::hermitian_eig(h, 1e-8);
    // Kept subspace = kernel (rank 2) or kernel + lowest excited state (rank 3);
    // either way the first two eigenvector columns.
    Eigen::Matrix<Complex, 4, 2> r = eig.eigenvectors.leftCols(2);
    int parent = e.a, daughter = e.b;

    TermGraph out;
    out.n_leaves = g.n_leaves;
    out.sites = g.sites;
    out.sites.erase(daughter);
    out.shift = g.shift;
    out.scale = g.scale;
    double floor = g.zero_floor();

    std::map<Edge, ComplexMatrix> new_pairs;
    std::map<int, ComplexMatrix> new_singles = g.site_terms;

    auto add_single = [&](int site, const ComplexMatrix& m) {
        auto jt = new_singles.find(site);
        if (jt == new_singles.end())
            new_singles[site] = m;
        else
            jt->second += m;
    };

    // single-spin terms sitting on the contracted pair fold into the parent
    for (int s : {parent, daughter}) {
        auto jt = new_singles.find(s);
        if (jt == new_singles.end()) continue;
        ComplexMatrix lifted = embed(jt->second, {s}, {parent, daughter});
        ComplexMatrix mapped = r.adjoint() * lifted * r;
        hermitize(mapped);
        new_singles.erase(jt);
        if (!negligible(mapped, floor)) add_single(parent, mapped);
    }
    // the contracted term itself: diag of kept eigenvalues on the parent
    {
        ComplexMatrix self = r.adjoint() * h * r;
        hermitize(self);
        if (!negligible(self, floor)) add_single(parent, self);
    }
    // pair terms touching the contracted pair
    for (const auto& [f, hf] : g.pair_terms) {
        if (f == e) continue;
        if (!f.contains(parent) && !f.contains(daughter)) {
            new_pairs[f] = hf;
            continue;
        }
        int a = f.contains(parent) ? f.other(parent) : f.other(daughter);
        std::vector<int> full = {a, parent, daughter};
        std::sort(full.begin(), full.end());
        ComplexMatrix lifted = embed(hf, {f.a, f.b}, full);
        ComplexMatrix k = step_embed(full, parent, daughter, r);
        ComplexMatrix mapped = k.adjoint() * lifted * k;
        hermitize(mapped);
        if (negligible(mapped, floor)) continue;
        Edge ne(a, parent);
        auto jt = new_pairs.find(ne);
        if (jt == new_pairs.end())
            new_pairs[ne] = mapped;
        else
            jt->second += mapped;
    }
    // a mapped contribution can cancel against a previous one
    for (auto jt = new_pairs.begin(); jt != new_pairs.end();) {
        if (negligible(jt->second, floor))
            jt = new_pairs.erase(jt);
        else
            ++jt;
    }
    out.pair_terms = std::move(new_pairs);
    out.site_terms = std::move(new_singles);
    return {std::move(out), PairContraction{parent, daughter, r}};
}

std::pair<TermGraph, IsometryStep> fix_spin(const TermGraph& g, int u,
                                            const Eigen::Vector2cd& fix_to) {
    if (!g.sites.count(u)) throw Error("fix_spin: site not active");
    TermGraph out;
    out.n_leaves = g.n_leaves;
    out.sites = g.sites;
    out.sites.erase(u);
    out.shift = g.shift;
    out.scale = g.scale;
    double floor = g.zero_floor();

    out.site_terms = g.site_terms;
    if (auto it = out.site_terms.find(u); it != out.site_terms.end()) {
        if (term_rank(it->second, 1e-9) == 2)
            throw FullRankSingleSite("fix_spin: full-rank single-spin term on site " +
                                     std::to_string(u));
        out.shift += std::real(fix_to.dot(it->second * fix_to));
        out.site_terms.erase(it);
    }
    for (const auto& [f, hf] : g.pair_terms) {
        if (!f.contains(u)) {
            out.pair_terms[f] = hf;
            continue;
        }
        int a = f.other(u);
        ComplexMatrix mapped = contract_site(hf, {f.a, f.b}, u, fix_to);
        hermitize(mapped);
        if (negligible(mapped, floor)) continue;
        auto jt = out.site_terms.find(a);
        if (jt == out.site_terms.end())
            out.site_terms[a] = mapped;
        else
            jt->second += mapped;
    }
    for (auto jt = out.site_terms.begin(); jt != out.site_terms.end();) {
        if (negligible(jt->second, floor))
            jt = out.site_terms.erase(jt);
        else
            ++jt;
    }
    Eigen::Vector2cd st = fix_to.normalized();
    return {std::move(out), SpinFix{u, st}};
}

std::optional<Constraint> induce_constraint(const Constraint& ab, const Constraint& bc) {
    // shared middle site
    int shared = -1;
    int n_shared = 0;
    for (int s : {ab.edge.a, ab.edge.b})
        if (bc.edge.contains(s)) {
            shared = s;
            ++n_shared;
        }
    if (n_shared != 1)
        throw SharedSiteMismatch("induce_constraint: constraints must share exactly one site");
    int a = ab.edge.other(shared);
    int c = bc.edge.other(shared);

    Eigen::Matrix2cd left = bra_matrix(ab, a);        // [a][shared]
    Eigen::Matrix2cd right = bra_matrix(bc, shared);  // [shared][c]
    Eigen::Matrix2cd m = left * j_mat() * right / std::sqrt(2.0);
    if (flatten(m).norm() < 1e-12) return std::nullopt;
    if (a > c) m.transposeInPlace();
    return make_constraint(Edge(a, c), flatten(m));
}

long long CompleteHomogeneous::ground_dimension() const {
    long long d = 1;
    for (const auto& comp : components) {
        long long f = static_cast<long long>(comp.size()) + 1;
        if (d > (1LL << 62) / f) return 1LL << 62;  // saturate
        d *= f;
    }
    return d;
}

namespace {

struct ClosureState {
    std::map<Edge, Constraint> constraints;
    std::vector<std::vector<int>> components;
    std::map<int, Eigen::Matrix2cd> factors;  // L_v per site (root: identity)
};

Eigen::Matrix2cd normalize_factor(Eigen::Matrix2cd l) {
    l *= std::sqrt(2.0) / l.norm();
    // fix the global phase by the largest entry
    int bi = 0, bj = 0;
    double best = -1;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(l(i, j)) > best) {
                best = std::abs(l(i, j));
                bi = i;
                bj = j;
            }
    Complex piv = l(bi, bj);
    l *= std::conj(piv) / std::abs(piv);
    return l;
}

// Constraint predicted by the local factors on an arbitrary pair.
Constraint predicted_constraint(Edge e, const Eigen::Matrix2cd& lu,
                                const Eigen::Matrix2cd& lv) {
    Eigen::Matrix2cd m = lu.transpose().inverse() * j_mat() * lv.inverse();
    return make_constraint(e, flatten(m));
}

}  // namespace

ReductionOutcome reduce(const HamiltonianSpec& input, const ReduceConfig& cfg) {
    HamiltonianSpec spec = normalize_terms(input);
    if (auto nat = check_natural(spec); !nat)
        throw NotNatural("reduce: input is not natural: " + nat.reason);

    TermGraph g = TermGraph::from_spec(spec);
    IsometryNetwork net;
    net.n_leaves = g.n_leaves;

    auto edge_less = [&](const Edge& x, const Edge& y) {
        return cfg.reverse_edge_order ? y < x : x < y;
    };

    long long iteration_cap = 16LL * g.n_leaves + 256;
    for (long long iter = 0;; ++iter) {
        if (iter > iteration_cap) throw Error("reduce: failed to terminate");

        // (1) full-rank terms decide frustration outright
        for (const auto& [v, h] : g.site_terms)
            if (term_rank(h, cfg.tol) == 2)
                return Frustrated{{"full-rank single-spin term", std::nullopt, v}};
        for (const auto& [e, h] : g.pair_terms)
            if (term_rank(h, cfg.tol) == 4)
                return Frustrated{{"full-rank pair term", e, std::nullopt}};

        // (2) consume rank-1 single-spin terms
        if (!g.site_terms.empty()) {
            int u = g.site_terms.begin()->first;
            ComplexMatrix ker = numerics::kernel_basis(g.site_terms.at(u), cfg.tol);
            assert(ker.cols() == 1);
            auto [g2, step] = fix_spin(g, u, ker.col(0));
            g = std::move(g2);
            net.steps.push_back(step);
            continue;
        }

        // (3) contract the lowest rank-2/3 pair term
        std::optional<Edge> target;
        for (const auto& [e, h] : g.pair_terms) {
            int r = term_rank(h, cfg.tol);
            if (r == 2 || r == 3)
                if (!target || edge_less(e, *target)) target = e;
        }
        if (target) {
            auto [g2, step] = contract_pair(g, *target, cfg.tol);
            g = std::move(g2);
            net.steps.push_back(step);
            continue;
        }

        // (4) only rank-1 pair terms remain: closure over induced constraints
        ClosureState cs;
        for (const auto& [e, h] : g.pair_terms) {
            auto eig = numerics::hermitian_eig(h, 1e-8);
            Constraint c = make_constraint(e, eig.eigenvectors.col(3).conjugate());
            if (!c.entangled)
                throw NotNatural("reduce: product constraint on edge (" +
                                 std::to_string(e.a) + "," + std::to_string(e.b) + ")");
            cs.constraints.emplace(e, std::move(c));
        }

        // connected components of the constraint graph
        std::map<int, std::vector<int>> adj;
        for (const auto& [e, c] : cs.constraints) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
        std::set<int> unvisited = g.sites;
        while (!unvisited.empty()) {
            int root = *unvisited.begin();
            std::vector<int> comp = {root};
            unvisited.erase(root);
            std::vector<int> queue = {root};
            while (!queue.empty()) {
                int u = queue.back();
                queue.pop_back();
                for (int v : adj[u])
                    if (unvisited.count(v)) {
                        unvisited.erase(v);
                        comp.push_back(v);
                        queue.push_back(v);
                    }
            }
            std::sort(comp.begin(), comp.end());
            cs.components.push_back(std::move(comp));
        }
        std::sort(cs.components.begin(), cs.components.end());

        // per component: derive the root star by induction along a BFS tree,
        // then the local factors, then check every stored constraint
        std::optional<std::pair<Edge, Constraint>> merge;  // edge + predicted bra
        for (const auto& comp : cs.components) {
            int root = comp[0];
            cs.factors[root] = Eigen::Matrix2cd::Identity();
            if (comp.size() == 1) continue;

            std::map<int, Constraint> star;  // v -> constraint on {root, v}
            std::vector<int> order = {root};
            std::set<int> seen = {root};
            for (size_t qi = 0; qi < order.size(); ++qi) {
                int u = order[qi];
                for (int v : adj[u]) {
                    if (seen.count(v)) continue;
                    seen.insert(v);
                    order.push_back(v);
                    if (u == root) {
                        star[v] = cs.constraints.at(Edge(root, v));
                    } else {
                        auto ind = induce_constraint(star.at(u), cs.constraints.at(Edge(u, v)));
                        assert(ind && "induction of entangled constraints cannot vanish");
                        star[v] = *ind;
                    }
                    if (!star[v].entangled)
                        throw NotNatural("reduce: induced constraint is a product functional");
                }
            }
            for (int v : comp) {
                if (v == root) continue;
                // transport: B * L ∝ J makes every alpha(x)L alpha vanish
                Eigen::Matrix2cd b = bra_matrix(star.at(v), root);
                cs.factors[v] = normalize_factor(b.inverse() * j_mat());
            }
            // consistency of every stored constraint with the factor family
            for (const auto& [e, c] : cs.constraints) {
                if (!std::binary_search(comp.begin(), comp.end(), e.a)) continue;
                Constraint pred = predicted_constraint(e, cs.factors.at(e.a),
                                                       cs.factors.at(e.b));
                Complex overlap = c.bra.dot(pred.bra);
                if (1.0 - std::abs(overlap) > cfg.duplicate_tol) {
                    if (!merge || edge_less(e, merge->first))
                        merge = {e, pred};
                }
            }
        }

        if (merge) {
            // Subsume the stored constraint and the induced one into a rank-2
            // term; the second projector is orthogonalized against the first
            // so the kept kernel is exact.
            const Constraint& orig = cs.constraints.at(merge->first);
            Eigen::Vector4cd b1 = orig.bra.conjugate();  // |beta>
            Eigen::Vector4cd b2 = merge->second.bra.conjugate();
            b2 -= b1.dot(b2) * b1;
            b2.normalize();
            g.pair_terms[merge->first] =
                g.scale * (b1 * b1.adjoint() + b2 * b2.adjoint());
            continue;
        }

        // closed: assemble the outcome
        CompleteHomogeneous out;
        out.components = cs.components;
        out.constraints = cs.constraints;
        for (const auto& comp : cs.components) {
            if (comp.size() < 2) continue;
            if (static_cast<int>(comp.size()) <= cfg.materialize_limit) {
                for (size_t i = 0; i < comp.size(); ++i)
                    for (size_t j = i + 1; j < comp.size(); ++j) {
                        Edge e(comp[i], comp[j]);
                        if (!out.constraints.count(e))
                            out.constraints.emplace(
                                e, predicted_constraint(e, cs.factors.at(e.a),
                                                        cs.factors.at(e.b)));
                    }
            } else {
                int root = comp[0];
                for (int v : comp) {
                    if (v == root) continue;
                    Edge e(root, v);
                    if (!out.constraints.count(e))
                        out.constraints.emplace(
                            e, predicted_constraint(e, cs.factors.at(e.a),
                                                    cs.factors.at(e.b)));
                }
            }
        }
        net.root_sites.assign(g.sites.begin(), g.sites.end());
        out.network = std::move(net);
        return out;
    }
}

ComplexVector apply_network(const IsometryNetwork& net, const ComplexVector& root_state) {
    if (net.n_leaves > 24) throw TooLarge("apply_network: too many leaves to materialize");
    std::uint64_t root_dim = std::uint64_t(1) << net.root_sites.size();
    if (root_state.size() != static_cast<Eigen::Index>(root_dim))
        throw Error("apply_network: root state has wrong dimension");

    std::vector<int> sites = net.root_sites;
    ComplexVector state = root_state;
    for (auto it = net.steps.rbegin(); it != net.steps.rend(); ++it) {
        if (const auto* pc = std::get_if<PairContraction>(&*it)) {
            std::vector<int> out_sites = sites;
            out_sites.insert(
                std::upper_bound(out_sites.begin(), out_sites.end(), pc->daughter),
                pc->daughter);
            int n = static_cast<int>(out_sites.size());
            int sq = bit_shift(position_of(out_sites, pc->daughter), n);
            int sp = bit_shift(position_of(out_sites, pc->parent), n);
            std::vector<int> in_sites = sites;
            int sp_in = bit_shift(position_of(in_sites, pc->parent), n - 1);
            std::uint64_t dim_out = std::uint64_t(1) << n;
            ComplexVector next(dim_out);
            for (std::uint64_t idx = 0; idx < dim_out; ++idx) {
                std::uint64_t bp = (idx >> sp) & 1u;
                std::uint64_t bq = (idx >> sq) & 1u;
                std::uint64_t hi = idx >> (sq + 1);
                std::uint64_t lo = idx & ((std::uint64_t(1) << sq) - 1);
                std::uint64_t base = (hi << sq) | lo;  // index without the daughter bit
                Complex acc(0);
                for (std::uint64_t bin = 0; bin < 2; ++bin) {
                    Complex v = pc->isometry(bp * 2 + bq, bin);
                    if (v == Complex(0)) continue;
                    std::uint64_t src =
                        (base & ~(std::uint64_t(1) << sp_in)) | (bin << sp_in);
                    acc += v * state(src);
                }
                next(idx) = acc;
            }
            state = std::move(next);
            sites = std::move(out_sites);
        } else {
            const auto& sf = std::get<SpinFix>(*it);
            std::vector<int> out_sites = sites;
            out_sites.insert(std::upper_bound(out_sites.begin(), out_sites.end(), sf.site),
                             sf.site);
            int n = static_cast<int>(out_sites.size());
            int pos = position_of(out_sites, sf.site);
            std::uint64_t dim_out = std::uint64_t(1) << n;
            ComplexVector next(dim_out);
            for (std::uint64_t idx = 0; idx < dim_out; ++idx) {
                std::uint64_t bit = (idx >> bit_shift(pos, n)) & 1u;
                // index with the inserted site's bit removed
                std::uint64_t hi = idx >> (bit_shift(pos, n) + 1);
                std::uint64_t lo = idx & ((std::uint64_t(1) << bit_shift(pos, n)) - 1);
                std::uint64_t src = (hi << bit_shift(pos, n)) | lo;
                next(idx) = sf.state(bit) * state(src);
            }
            state = std::move(next);
            sites = std::move(out_sites);
        }
    }
    return state;
}

std::vector<LocalTerm> pullback_operator(const IsometryNetwork& net,
                                         const std::vector<LocalTerm>& leaf_terms) {
    std::vector<LocalTerm> terms = leaf_terms;
    for (const auto& step : net.steps) {
        if (const auto* pc = std::get_if<PairContraction>(&step)) {
            for (auto& t : terms) {
                bool has_p = position_of(t.sites, pc->parent) >= 0;
                bool has_q = position_of(t.sites, pc->daughter) >= 0;
                if (!has_p && !has_q) continue;
                std::vector<int> full = t.sites;
                if (!has_p)
                    full.insert(std::upper_bound(full.begin(), full.end(), pc->parent),
                                pc->parent);
                if (!has_q)
                    full.insert(std::upper_bound(full.begin(), full.end(), pc->daughter),
                                pc->daughter);
                ComplexMatrix lifted =
                    (full.size() == t.sites.size()) ? t.mat : embed(t.mat, t.sites, full);
                ComplexMatrix k = step_embed(full, pc->parent, pc->daughter, pc->isometry);
                t.mat = k.adjoint() * lifted * k;
                full.erase(std::find(full.begin(), full.end(), pc->daughter));
                t.sites = std::move(full);
            }
        } else {
            const auto& sf = std::get<SpinFix>(step);
            for (auto& t : terms) {
                if (position_of(t.sites, sf.site) < 0) continue;
                t.mat = contract_site(t.mat, t.sites, sf.site, sf.state);
                t.sites.erase(std::find(t.sites.begin(), t.sites.end(), sf.site));
            }
        }
    }
    return terms;
}

std::vector<LocalTerm> pullback_operator(const IsometryNetwork& net, const Observable& a) {
    return pullback_operator(net, a.local_terms());
}

}  // namespace ffspin
