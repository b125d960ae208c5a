#pragma once

// Post-stratification of N = m^{2K} joint samples into sqrt(N) strata of
// sqrt(N) samples each, using only the ranks of the outer coordinates.
//
// Pass k (k = 1..K) cuts the current ordering into m^{k-1} contiguous blocks
// of m^{2K-k+1} samples and stably sorts each block by Y_k. After the last
// pass, stratum p is positions [p*sqrt(N), (p+1)*sqrt(N)) of the ordering.
// Ties keep their prior relative order, so discrete coordinates give a
// deterministic (row-order dependent) result.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nestex/dataset.hpp"
#include "nestex/error.hpp"
#include "nestex/numeric.hpp"

namespace nestex {

struct StratifiedIndex {
    std::vector<std::size_t> perm;  // perm[position] = row in the dataset
    std::size_t m = 0;
    std::size_t k_dim = 0;
    std::size_t n_total = 0;
    std::size_t stratum_size = 0;  // m^K == sqrt(N)

    [[nodiscard]] std::size_t stratum_count() const noexcept { return stratum_size; }

    // Dataset rows of stratum p, in within-stratum order.
    [[nodiscard]] std::span<const std::size_t> rows(std::size_t p) const {
        if (p >= stratum_size)
            fail(Errc::bounds, "stratum " + std::to_string(p) + " out of range [0, " + std::to_string(stratum_size) + ")");
        return std::span<const std::size_t>(perm).subspan(p * stratum_size, stratum_size);
    }
};

inline StratifiedIndex stratify(const Dataset& d, std::size_t m) {
    check_stratifiable(d, m);
    const std::size_t k_dim = d.k_dim();
    const std::size_t n = d.size();

    StratifiedIndex idx;
    idx.m = m;
    idx.k_dim = k_dim;
    idx.n_total = n;
    idx.stratum_size = *checked_pow(m, k_dim);
    idx.perm.resize(n);
    std::iota(idx.perm.begin(), idx.perm.end(), std::size_t{0});

    std::size_t block = n;  // m^{2K-k+1} for pass k
    for (std::size_t k = 0; k < k_dim; ++k) {
        for (auto first = idx.perm.begin(); first != idx.perm.end(); first += static_cast<std::ptrdiff_t>(block)) {
            std::stable_sort(first, first + static_cast<std::ptrdiff_t>(block),
                             [&](std::size_t a, std::size_t b) { return d.y(a, k) < d.y(b, k); });
        }
        block /= m;
    }
    return idx;
}

inline std::vector<JointSample> stratum(const Dataset& d, const StratifiedIndex& idx, std::size_t p) {
    if (idx.n_total != d.size()) fail(Errc::invalid_argument, "index was built for a different dataset");
    std::vector<JointSample> out;
    out.reserve(idx.stratum_size);
    for (std::size_t row : idx.rows(p)) out.push_back(d.sample(row));
    return out;
}

}  // namespace nestex
