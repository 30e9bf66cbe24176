#include "ffspin/localop.hpp"

#include <cassert>

namespace ffspin {

namespace {

// For each site of `sub`, the bit shift of that site inside `full`.
std::vector<int> sub_shifts(const std::vector<int>& sub, const std::vector<int>& full) {
    int n = static_cast<int>(full.size());
    std::vector<int> shifts;
    shifts.reserve(sub.size());
    for (int s : sub) {
        int p = position_of(full, s);
        assert(p >= 0 && "term support must be contained in the site list");
        shifts.push_back(bit_shift(p, n));
    }
    return shifts;
}

// Local (term-internal) index of a global basis index.
inline std::uint64_t local_index(std::uint64_t idx, const std::vector<int>& shifts) {
    std::uint64_t l = 0;
    int k = static_cast<int>(shifts.size());
    for (int p = 0; p < k; ++p)
        l |= ((idx >> shifts[p]) & 1u) << (k - 1 - p);
    return l;
}

// Global index with the support bits replaced by local index `l`.
inline std::uint64_t replace_bits(std::uint64_t idx, std::uint64_t l,
                                  const std::vector<int>& shifts) {
    int k = static_cast<int>(shifts.size());
    for (int p = 0; p < k; ++p) {
        std::uint64_t bit = (l >> (k - 1 - p)) & 1u;
        idx = (idx & ~(std::uint64_t(1) << shifts[p])) | (bit << shifts[p]);
    }
    return idx;
}

}  // namespace

ComplexMatrix embed(const ComplexMatrix& mat, const std::vector<int>& sub,
                    const std::vector<int>& full) {
    int n = static_cast<int>(full.size());
    std::uint64_t dim = std::uint64_t(1) << n;
    auto shifts = sub_shifts(sub, full);
    std::uint64_t sub_dim = std::uint64_t(1) << sub.size();

    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (std::uint64_t col = 0; col < dim; ++col) {
        std::uint64_t c = local_index(col, shifts);
        for (std::uint64_t r = 0; r < sub_dim; ++r) {
            Complex v = mat(r, c);
            if (v == Complex(0)) continue;
            out(replace_bits(col, r, shifts), col) += v;
        }
    }
    return out;
}

void accumulate_dense(ComplexMatrix& out, const LocalTerm& term,
                      const std::vector<int>& sites) {
    int n = static_cast<int>(sites.size());
    std::uint64_t dim = std::uint64_t(1) << n;
    assert(out.rows() == static_cast<Eigen::Index>(dim));
    if (term.sites.empty()) {
        out.diagonal().array() += term.mat(0, 0);
        return;
    }
    auto shifts = sub_shifts(term.sites, sites);
    std::uint64_t sub_dim = std::uint64_t(1) << term.sites.size();
    for (std::uint64_t col = 0; col < dim; ++col) {
        std::uint64_t c = local_index(col, shifts);
        for (std::uint64_t r = 0; r < sub_dim; ++r) {
            Complex v = term.mat(r, c);
            if (v == Complex(0)) continue;
            out(replace_bits(col, r, shifts), col) += v;
        }
    }
}

ComplexMatrix contract_site(const ComplexMatrix& mat, const std::vector<int>& sites,
                            int u, const Eigen::Vector2cd& phi) {
    int n = static_cast<int>(sites.size());
    int pos_u = position_of(sites, u);
    assert(pos_u >= 0);
    std::vector<int> rest;
    for (int s : sites)
        if (s != u) rest.push_back(s);
    int m = n - 1;
    std::uint64_t dim_out = std::uint64_t(1) << m;

    auto lift = [&](std::uint64_t i, int bu) {
        std::uint64_t idx = std::uint64_t(bu) << bit_shift(pos_u, n);
        for (int pos = 0; pos < m; ++pos) {
            std::uint64_t bit = (i >> bit_shift(pos, m)) & 1u;
            idx |= bit << bit_shift(position_of(sites, rest[pos]), n);
        }
        return idx;
    };
    ComplexMatrix out = ComplexMatrix::Zero(dim_out, dim_out);
    for (std::uint64_t i = 0; i < dim_out; ++i)
        for (std::uint64_t j = 0; j < dim_out; ++j) {
            Complex acc(0);
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    acc += std::conj(phi(s)) * mat(lift(i, s), lift(j, t)) * phi(t);
            out(i, j) = acc;
        }
    return out;
}

ComplexMatrix trace_site(const ComplexMatrix& mat, const std::vector<int>& sites, int u) {
    Eigen::Vector2cd e0, e1;
    e0 << 1, 0;
    e1 << 0, 1;
    return contract_site(mat, sites, u, e0) + contract_site(mat, sites, u, e1);
}

void accumulate_apply(ComplexVector& out, const LocalTerm& term,
                      const ComplexVector& in, const std::vector<int>& sites) {
    int n = static_cast<int>(sites.size());
    std::uint64_t dim = std::uint64_t(1) << n;
    assert(in.size() == static_cast<Eigen::Index>(dim) && out.size() == in.size());
    if (term.sites.empty()) {
        out += term.mat(0, 0) * in;
        return;
    }
    auto shifts = sub_shifts(term.sites, sites);
    std::uint64_t sub_dim = std::uint64_t(1) << term.sites.size();
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        std::uint64_t r = local_index(idx, shifts);
        Complex acc(0);
        for (std::uint64_t c = 0; c < sub_dim; ++c) {
            Complex v = term.mat(r, c);
            if (v == Complex(0)) continue;
            acc += v * in(replace_bits(idx, c, shifts));
        }
        out(idx) += acc;
    }
}

}  // namespace ffspin
