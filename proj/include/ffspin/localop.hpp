#pragma once

#include "ffspin/types.hpp"

#include <cstdint>
#include <vector>

namespace ffspin {

// Operator acting on a few labeled sites.  `sites` is sorted ascending and the
// matrix is 2^k x 2^k in big-endian order (first listed site = most
// significant bit).  An empty site list denotes a scalar (1x1 matrix).
struct LocalTerm {
    std::vector<int> sites;
    ComplexMatrix mat;

    int arity() const { return static_cast<int>(sites.size()); }
};

// Index helpers, big-endian: a state on sites (s_0 < s_1 < ... < s_{n-1}) has
// amplitude index sum_p bit(s_p) << (n-1-p).
inline int bit_shift(int pos, int n) { return n - 1 - pos; }

// Position of `site` in the sorted list, -1 if absent.
inline int position_of(const std::vector<int>& sites, int site) {
    auto it = std::lower_bound(sites.begin(), sites.end(), site);
    if (it == sites.end() || *it != site) return -1;
    return static_cast<int>(it - sites.begin());
}

// Embed `mat` (on sorted subset `sub`) into the space of the sorted list
// `full`.  Intended for small dimensions only.
ComplexMatrix embed(const ComplexMatrix& mat, const std::vector<int>& sub,
                    const std::vector<int>& full);

// out += term applied in the 2^n space of sorted `sites` (dense accumulate).
void accumulate_dense(ComplexMatrix& out, const LocalTerm& term,
                      const std::vector<int>& sites);

// out += term * in, matrix-free, on the 2^n space of sorted `sites`.
void accumulate_apply(ComplexVector& out, const LocalTerm& term,
                      const ComplexVector& in, const std::vector<int>& sites);

// <phi|_u mat |phi>_u: contract the index of site u (of sorted `sites`) with
// phi on both sides; result acts on the remaining sites.
ComplexMatrix contract_site(const ComplexMatrix& mat, const std::vector<int>& sites,
                            int u, const Eigen::Vector2cd& phi);

// Partial trace over site u of `mat` on sorted `sites`.
ComplexMatrix trace_site(const ComplexMatrix& mat, const std::vector<int>& sites, int u);

}  // namespace ffspin
