#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oblivkand {

/// C(n, k) in uint64, throwing on overflow.
inline uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
        if (r > UINT64_MAX) throw std::overflow_error("binomial overflow");
    }
    return static_cast<uint64_t>(r);
}

/// Number of ways to write `total` as an ordered sum of `slots` naturals.
inline uint64_t composition_count(int total, int slots) {
    return binomial(total + slots - 1, slots - 1);
}

/// Visits every composition of `total` into `slots` nonnegative counts, in the
/// canonical order used throughout: earlier slots take larger counts first,
/// so the first composition is (total, 0, ..., 0) and the last (0, ..., 0, total).
inline void for_each_composition(int total, int slots,
                                 const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> counts(static_cast<size_t>(slots), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == slots - 1) {
            counts[static_cast<size_t>(pos)] = remaining;
            visit(counts);
            counts[static_cast<size_t>(pos)] = 0;
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            counts[static_cast<size_t>(pos)] = v;
            rec(pos + 1, remaining - v);
        }
        counts[static_cast<size_t>(pos)] = 0;
    };
    if (slots <= 0) throw std::invalid_argument("composition: slots must be positive");
    rec(0, total);
}

/// Rank of a composition in the canonical order above.
inline uint64_t composition_rank(const std::vector<int>& counts) {
    int slots = static_cast<int>(counts.size());
    int remaining = 0;
    for (int c : counts) remaining += c;
    uint64_t rank = 0;
    for (int pos = 0; pos < slots - 1; ++pos) {
        int c = counts[static_cast<size_t>(pos)];
        // compositions putting a larger count in this slot come first
        for (int v = remaining; v > c; --v) rank += composition_count(remaining - v, slots - 1 - pos);
        remaining -= c;
    }
    return rank;
}

}  // namespace oblivkand
