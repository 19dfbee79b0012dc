#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "kthin/parallel.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// Number of endpoint sets of size 1..k drawn from `candidates` vertices,
/// saturating at UINT64_MAX.
inline std::uint64_t tuple_count(std::int64_t candidates, int k) {
    std::uint64_t total = 0;
    std::uint64_t binom = 1;  // C(candidates, t)
    for (int t = 1; t <= k && t <= candidates; ++t) {
        const auto num = static_cast<unsigned __int128>(binom) * static_cast<std::uint64_t>(candidates - t + 1);
        const unsigned __int128 next = num / static_cast<std::uint64_t>(t);
        if (next > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
        binom = static_cast<std::uint64_t>(next);
        if (total > std::numeric_limits<std::uint64_t>::max() - binom) return std::numeric_limits<std::uint64_t>::max();
        total += binom;
    }
    return total;
}

/// Calls visit(endpoints, worker) for every set of 1..k non-root vertices.
/// Endpoints arrive in tin order. Work is split into tasks keyed by
/// (size, last endpoint); within a task sets appear in colexicographic
/// order of their tin positions.
template <class Visit>
void enumerate_tuples(const RootedTree& t, int k, unsigned workers, Visit&& visit) {
    const std::vector<Vertex> candidates(t.preorder().begin() + 1, t.preorder().end());
    const auto m = static_cast<int>(candidates.size());
    std::vector<std::pair<int, int>> tasks;
    for (int size = 1; size <= k && size <= m; ++size) {
        for (int last = size - 1; last < m; ++last) tasks.emplace_back(size, last);
    }
    parallel_tasks(tasks.size(), workers, [&](std::size_t task, unsigned worker) {
        const auto [size, last] = tasks[task];
        const int r = size - 1;
        std::vector<int> c(static_cast<std::size_t>(size));
        std::vector<Vertex> endpoints(static_cast<std::size_t>(size));
        for (int i = 0; i < r; ++i) c[static_cast<std::size_t>(i)] = i;
        c[static_cast<std::size_t>(r)] = last;
        endpoints[static_cast<std::size_t>(r)] = candidates[static_cast<std::size_t>(last)];
        while (true) {
            for (int i = 0; i < r; ++i) {
                endpoints[static_cast<std::size_t>(i)] = candidates[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])];
            }
            visit(std::span<const Vertex>(endpoints), worker);
            int i = 0;
            while (i < r && c[static_cast<std::size_t>(i)] + 1 == c[static_cast<std::size_t>(i) + 1]) ++i;
            if (i == r) break;
            ++c[static_cast<std::size_t>(i)];
            for (int j = 0; j < i; ++j) c[static_cast<std::size_t>(j)] = j;
        }
    });
}

}  // namespace kthin
