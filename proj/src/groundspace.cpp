#include "ffspin/groundspace.hpp"

#include "ffspin/numerics.hpp"

#include <cmath>
#include <random>

namespace ffspin {

namespace {

const Eigen::Matrix2cd& j_mat() {
    static const Eigen::Matrix2cd j = (Eigen::Matrix2cd() << 0, 1, -1, 0).finished();
    return j;
}

Eigen::Matrix2cd normalize_factor(Eigen::Matrix2cd l) {
    l *= std::sqrt(2.0) / l.norm();
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

Eigen::Vector4cd flatten(const Eigen::Matrix2cd& m) {
    Eigen::Vector4cd v;
    v << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
    return v;
}

}  // namespace

long long GroundSpaceModel::dimension() const {
    long long d = 1;
    for (const auto& c : components) d *= static_cast<long long>(c.sites.size()) + 1;
    return d;
}

int GroundSpaceModel::component_of(int site) const {
    for (size_t i = 0; i < components.size(); ++i)
        if (std::binary_search(components[i].sites.begin(), components[i].sites.end(), site))
            return static_cast<int>(i);
    return -1;
}

std::vector<Eigen::Vector2cd> choose_alphas(int n_c) {
    // Equatorial states (|0> + w^j |1>)/sqrt(2) at the (n_c+1)-th roots of
    // unity.  Pairwise independent, and the product-state Gram they induce is
    // circulant with binomial eigenvalues, so it stays invertible in floating
    // point (real Bloch-circle angles give an exponentially ill-conditioned
    // Vandermonde Gram instead).
    std::vector<Eigen::Vector2cd> out;
    out.reserve(n_c + 1);
    for (int j = 0; j <= n_c; ++j) {
        double phi = 2.0 * M_PI * j / (n_c + 1);
        Eigen::Vector2cd a;
        a << 1.0 / std::sqrt(2.0), std::exp(Complex(0, phi)) / std::sqrt(2.0);
        out.push_back(a);
    }
    return out;
}

GroundSpaceModel local_factors(const CompleteHomogeneous& outcome, double tol) {
    GroundSpaceModel model;
    model.network = outcome.network;
    model.root_sites = outcome.network.root_sites;

    for (const auto& comp : outcome.components) {
        ComponentModel cm;
        cm.root = comp[0];
        cm.sites = comp;
        cm.factors[cm.root] = Eigen::Matrix2cd::Identity();
        for (int v : comp) {
            if (v == cm.root) continue;
            auto it = outcome.constraints.find(Edge(cm.root, v));
            if (it == outcome.constraints.end())
                throw InconsistentConstraints(
                    "local_factors: missing root constraint for site " + std::to_string(v));
            // solve B * L ∝ J so that each constraint kills alpha (x) L alpha
            Eigen::Matrix2cd b = bra_matrix(it->second, cm.root);
            Eigen::Matrix2cd l = normalize_factor(b.inverse() * j_mat());
            if (std::abs(l.determinant()) <= 1e-10)
                throw InconsistentConstraints("local_factors: singular local factor");
            cm.factors[v] = l;
        }
        cm.alphas = choose_alphas(static_cast<int>(comp.size()));
        model.components.push_back(std::move(cm));
    }

    // every stored constraint must be proportional to the transported singlet
    for (const auto& [e, c] : outcome.constraints) {
        int ci = model.component_of(e.a);
        if (ci < 0 || ci != model.component_of(e.b))
            throw InconsistentConstraints("local_factors: constraint straddles components");
        const auto& cm = model.components[ci];
        Eigen::Matrix2cd pred =
            cm.factors.at(e.a).transpose().inverse() * j_mat() * cm.factors.at(e.b).inverse();
        Eigen::Vector4cd pv = flatten(pred).normalized();
        double overlap = std::abs(c.bra.dot(pv));
        if (1.0 - overlap > tol)
            throw InconsistentConstraints(
                "local_factors: constraint on (" + std::to_string(e.a) + "," +
                std::to_string(e.b) + ") is inconsistent with the factor family");
    }
    return model;
}

// ---- restriction machinery ----

namespace {

using numerics::LogComplex;

struct FactorGroup {
    int comp = 0;
    int multiplicity = 0;
    std::vector<int> member_sites;
    Eigen::Matrix2cd gram2;          // L^dag L shared by the member sites
    std::vector<LogComplex> lg;      // row-major log table over alpha pairs
};

struct Workspace {
    long long d = 1;
    std::vector<long long> comp_dims;
    std::vector<std::vector<int>> tuples;  // per global index: alpha index per comp
    std::vector<FactorGroup> groups;
    std::map<int, int> site_group;  // site -> group index
    std::map<int, int> site_comp;
    std::vector<double> log_diag;   // log <Psi_J | Psi_J>
};

Workspace build_workspace(const GroundSpaceModel& model) {
    Workspace ws;
    int n_comp = static_cast<int>(model.components.size());
    for (const auto& c : model.components)
        ws.comp_dims.push_back(static_cast<long long>(c.sites.size()) + 1);
    for (long long dc : ws.comp_dims) {
        if (ws.d > (1LL << 22) / std::max(dc, 1LL))
            throw TooLarge("restriction basis dimension too large");
        ws.d *= dc;
    }

    ws.tuples.assign(ws.d, std::vector<int>(n_comp, 0));
    for (long long j = 0; j < ws.d; ++j) {
        long long rem = j;
        for (int c = n_comp - 1; c >= 0; --c) {
            ws.tuples[j][c] = static_cast<int>(rem % ws.comp_dims[c]);
            rem /= ws.comp_dims[c];
        }
    }

    for (int c = 0; c < n_comp; ++c) {
        const auto& cm = model.components[c];
        long long dc = ws.comp_dims[c];
        for (int v : cm.sites) {
            ws.site_comp[v] = c;
            const Eigen::Matrix2cd& l = cm.factors.at(v);
            Eigen::Matrix2cd g2 = l.adjoint() * l;
            // sites with matching factors share one per-group table; the
            // tolerance absorbs roundoff wobble between transported factors
            double g2_scale = std::max(g2.cwiseAbs().maxCoeff(), 1e-300);
            int gi = -1;
            for (size_t k = 0; k < ws.groups.size(); ++k) {
                if (ws.groups[k].comp != c) continue;
                if ((ws.groups[k].gram2 - g2).cwiseAbs().maxCoeff() <= 1e-12 * g2_scale) {
                    gi = static_cast<int>(k);
                    break;
                }
            }
            if (gi < 0) {
                FactorGroup fg;
                fg.comp = c;
                fg.gram2 = g2;
                fg.multiplicity = 0;
                Eigen::MatrixXcd tbl(dc, dc);
                for (long long j = 0; j < dc; ++j)
                    for (long long k = 0; k < dc; ++k)
                        tbl(j, k) = (cm.alphas[j].adjoint() * g2 * cm.alphas[k])(0, 0);
                fg.lg.resize(dc * dc);
                for (long long j = 0; j < dc; ++j)
                    for (long long k = 0; k < dc; ++k)
                        fg.lg[j * dc + k] = LogComplex::from(tbl(j, k));
                ws.groups.push_back(std::move(fg));
                gi = static_cast<int>(ws.groups.size()) - 1;
            }
            ws.groups[gi].multiplicity += 1;
            ws.groups[gi].member_sites.push_back(v);
            ws.site_group[v] = gi;
        }
    }

    ws.log_diag.assign(ws.d, 0.0);
    for (long long j = 0; j < ws.d; ++j) {
        double acc = 0.0;
        for (const auto& g : ws.groups) {
            long long dc = ws.comp_dims[g.comp];
            int jc = ws.tuples[j][g.comp];
            acc += g.multiplicity * g.lg[jc * dc + jc].log_magnitude;
        }
        ws.log_diag[j] = acc;
    }
    return ws;
}

// W with rows/columns scaled to the unit-normalized product basis, so entries
// stay bounded regardless of component sizes.
ComplexMatrix weighted_skew(const GroundSpaceModel& model, const Workspace& ws,
                            const std::vector<LocalTerm>& terms) {
    ComplexMatrix w = ComplexMatrix::Zero(ws.d, ws.d);
    for (const auto& t : terms) {
        std::vector<int> sup_count(ws.groups.size(), 0);
        for (int v : t.sites) {
            auto it = ws.site_group.find(v);
            if (it == ws.site_group.end())
                throw SupportNotInRoots("restriction: operator touches site " +
                                        std::to_string(v) + " outside the root set");
            ++sup_count[it->second];
        }
        // support vectors (x) L_v alpha_{j_c(v)} per basis index
        int k = t.arity();
        std::uint64_t sub_dim = std::uint64_t(1) << k;
        ComplexMatrix u(sub_dim, ws.d);
        for (long long j = 0; j < ws.d; ++j) {
            ComplexVector acc = ComplexVector::Ones(1);
            for (int v : t.sites) {
                int c = ws.site_comp.at(v);
                const auto& cm = model.components[c];
                Eigen::Vector2cd x = cm.factors.at(v) * cm.alphas[ws.tuples[j][c]];
                ComplexVector nxt(acc.size() * 2);
                for (Eigen::Index i = 0; i < acc.size(); ++i) {
                    nxt(2 * i) = acc(i) * x(0);
                    nxt(2 * i + 1) = acc(i) * x(1);
                }
                acc = std::move(nxt);
            }
            u.col(j) = acc;
        }
        ComplexMatrix tu = t.mat * u;

        for (long long j = 0; j < ws.d; ++j) {
            for (long long kk = 0; kk < ws.d; ++kk) {
                LogComplex lc = LogComplex::one();
                for (size_t gi = 0; gi < ws.groups.size(); ++gi) {
                    const auto& g = ws.groups[gi];
                    int m = g.multiplicity - sup_count[gi];
                    if (m == 0) continue;
                    long long dc = ws.comp_dims[g.comp];
                    const LogComplex& f =
                        g.lg[static_cast<long long>(ws.tuples[j][g.comp]) * dc +
                             ws.tuples[kk][g.comp]];
                    if (f.zero) {
                        lc = LogComplex::zero_value();
                        break;
                    }
                    lc *= f.pow(m);
                }
                if (lc.zero) continue;
                lc.log_magnitude -= 0.5 * (ws.log_diag[j] + ws.log_diag[kk]);
                Complex inner = u.col(j).dot(tu.col(kk));
                w(j, kk) += lc.value() * inner;
            }
        }
    }
    return w;
}

}  // namespace

struct Restrictor::Impl {
    GroundSpaceModel model;
    Workspace ws;
    ComplexMatrix gram;
    ComplexMatrix ortho;  // r x d
    int rank = 0;
};

Restrictor::Restrictor(const GroundSpaceModel& model, const RestrictOptions& opts)
    : impl_(std::make_unique<Impl>()) {
    impl_->model = model;
    impl_->ws = build_workspace(model);
    LocalTerm unit{{}, ComplexMatrix::Identity(1, 1)};
    impl_->gram = weighted_skew(model, impl_->ws, {unit});
    auto pinv = numerics::pinv_sqrt(impl_->gram, opts.gram_cutoff);
    impl_->rank = pinv.retained_rank;
    RealVector inv_sqrt = pinv.retained_eigenvalues.array().rsqrt();
    impl_->ortho = inv_sqrt.asDiagonal() * pinv.retained_basis.adjoint();
}

Restrictor::~Restrictor() = default;
Restrictor::Restrictor(Restrictor&&) noexcept = default;
Restrictor& Restrictor::operator=(Restrictor&&) noexcept = default;

ComplexMatrix Restrictor::skew(const std::vector<LocalTerm>& terms) const {
    return weighted_skew(impl_->model, impl_->ws, terms);
}

const ComplexMatrix& Restrictor::gram() const { return impl_->gram; }
int Restrictor::retained_rank() const { return impl_->rank; }

RestrictionResult Restrictor::restrict(const std::vector<LocalTerm>& terms) const {
    RestrictionResult rr;
    rr.gram = impl_->gram;
    rr.skew = skew(terms);
    rr.ortho_transform = impl_->ortho;
    rr.retained_rank = impl_->rank;
    rr.restricted = impl_->ortho * rr.skew * impl_->ortho.adjoint();
    return rr;
}

RestrictionResult restrict_operator(const GroundSpaceModel& model,
                                    const std::vector<LocalTerm>& terms,
                                    const RestrictOptions& opts) {
    return Restrictor(model, opts).restrict(terms);
}

ComplexVector kernel_product_state(const GroundSpaceModel& model, long long index) {
    int n_roots = static_cast<int>(model.root_sites.size());
    if (n_roots > 24) throw TooLarge("kernel_product_state: too many root sites");
    std::vector<int> tuple(model.components.size(), 0);
    long long rem = index;
    for (int c = static_cast<int>(model.components.size()) - 1; c >= 0; --c) {
        long long dc = static_cast<long long>(model.components[c].sites.size()) + 1;
        tuple[c] = static_cast<int>(rem % dc);
        rem /= dc;
    }
    ComplexVector state = ComplexVector::Ones(1);
    for (int v : model.root_sites) {
        int c = model.component_of(v);
        const auto& cm = model.components[c];
        Eigen::Vector2cd x = cm.factors.at(v) * cm.alphas[tuple[c]];
        ComplexVector nxt(state.size() * 2);
        for (Eigen::Index i = 0; i < state.size(); ++i) {
            nxt(2 * i) = state(i) * x(0);
            nxt(2 * i + 1) = state(i) * x(1);
        }
        state = std::move(nxt);
    }
    return state;
}

double ground_expectation(const HamiltonianSpec& h_u, const Observable& a,
                          const ReduceConfig& cfg) {
    ReductionOutcome outcome = reduce(h_u, cfg);
    if (is_frustrated(outcome))
        throw FrustratedInput("ground_expectation: Hamiltonian is frustrated");
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    GroundSpaceModel model = local_factors(ch);
    auto pulled = pullback_operator(model.network, a.local_terms());
    RestrictionResult rr = restrict_operator(model, pulled);
    return std::real(rr.restricted.trace()) / rr.retained_rank;
}

long long ground_dimension(const HamiltonianSpec& h_u, const ReduceConfig& cfg) {
    ReductionOutcome outcome = reduce(h_u, cfg);
    if (is_frustrated(outcome)) return 0;
    return std::get<CompleteHomogeneous>(outcome).ground_dimension();
}

SchmidtCheckResult schmidt_check(const HamiltonianSpec& h_u, const std::vector<int>& region,
                                 int samples, unsigned seed, const ReduceConfig& cfg) {
    int n = h_u.system.n_sites;
    if (n > 20) throw TooLarge("schmidt_check: system too large");
    if (region.empty() || static_cast<int>(region.size()) >= n)
        throw Error("schmidt_check: region must be a nonempty proper subset");

    ReductionOutcome outcome = reduce(h_u, cfg);
    if (is_frustrated(outcome))
        throw FrustratedInput("schmidt_check: Hamiltonian is frustrated");
    GroundSpaceModel model = local_factors(std::get<CompleteHomogeneous>(outcome));

    long long d = model.dimension();
    std::vector<ComplexVector> basis;
    for (long long j = 0; j < d; ++j)
        basis.push_back(kernel_product_state(model, j));

    std::vector<int> reg = region;
    std::sort(reg.begin(), reg.end());
    std::vector<int> comp;
    for (int s = 0; s < n; ++s)
        if (!std::binary_search(reg.begin(), reg.end(), s)) comp.push_back(s);
    int a_bits = static_cast<int>(reg.size());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SchmidtCheckResult res;
    res.bound = a_bits + 1;
    for (int s = 0; s < samples; ++s) {
        ComplexVector root = ComplexVector::Zero(basis[0].size());
        for (long long j = 0; j < d; ++j)
            root += Complex(gauss(rng), gauss(rng)) * basis[j];
        root.normalize();
        ComplexVector leaf = apply_network(model.network, root);

        ComplexMatrix m = ComplexMatrix::Zero(std::uint64_t(1) << a_bits,
                                              std::uint64_t(1) << comp.size());
        for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
            std::uint64_t row = 0, col = 0;
            for (int p = 0; p < a_bits; ++p)
                row |= ((idx >> bit_shift(reg[p], n)) & 1u) << bit_shift(p, a_bits);
            for (size_t p = 0; p < comp.size(); ++p)
                col |= ((idx >> bit_shift(comp[p], n)) & 1u)
                       << bit_shift(static_cast<int>(p), static_cast<int>(comp.size()));
            m(row, col) = leaf(idx);
        }
        Eigen::BDCSVD<ComplexMatrix> svd(m);
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-8) ++rank;
        res.max_rank = std::max(res.max_rank, rank);
    }
    res.pass = res.max_rank <= res.bound;
    return res;
}

}  // namespace ffspin
