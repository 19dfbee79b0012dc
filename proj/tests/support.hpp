#pragma once

#include <string>
#include <vector>

#include "kthin/graph.hpp"
#include "kthin/rng.hpp"
#include "kthin/tree.hpp"

namespace kthin::test {

struct Instance {
    WeightedGraph g;
    RootedTree t;
    std::uint64_t seed;
};

/// Random connected graph with n in [lo, hi], weights 1..10, and a uniformly
/// keyed random spanning tree.
inline Instance random_instance(std::uint64_t seed, Vertex lo = 4, Vertex hi = 12, Weight max_weight = 10) {
    CounterRng rng(seed, 0x636f72707573);
    const auto n = static_cast<Vertex>(lo + static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
    const EdgeId max_m = n * (n - 1) / 2;
    const auto m = static_cast<EdgeId>(n - 1 + static_cast<EdgeId>(rng.below(static_cast<std::uint64_t>(max_m - n + 2))));
    WeightedGraph g = random_connected(n, m, max_weight, rng());
    RootedTree t = random_spanning_tree(g, rng());
    return {std::move(g), std::move(t), seed};
}

inline std::vector<Instance> corpus(std::size_t count, std::uint64_t base = 1, Vertex lo = 4, Vertex hi = 12) {
    std::vector<Instance> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_instance(base + i, lo, hi));
    return out;
}

/// C4: 1-2-3-4-1 with unit weights (0-based ids 0..3).
inline WeightedGraph c4() { return parse_graph("p 4 4\ne 1 2 1\ne 2 3 1\ne 3 4 1\ne 4 1 1\n"); }

/// Path tree 1-2-3-4 of C4.
inline RootedTree c4_path(const WeightedGraph& g) { return parse_tree(g, "t 4 1\nb 2 1\nb 3 2\nb 4 3\n"); }

inline WeightedGraph k4() {
    return parse_graph("p 4 6\ne 1 2 1\ne 1 3 1\ne 1 4 1\ne 2 3 1\ne 2 4 1\ne 3 4 1\n");
}

/// Uniformly random legal swap (requires a non-tree edge).
inline SwapMove random_move(const WeightedGraph& g, const RootedTree& t, CounterRng& rng) {
    std::vector<EdgeId> outside;
    for (EdgeId id = 0; id < g.m(); ++id) {
        if (!t.contains_edge(id)) outside.push_back(id);
    }
    const EdgeId f = outside[rng.below(outside.size())];
    const FundamentalCycle cycle = fundamental_cycle(g, t, f);
    return {f, cycle.tree_edges[rng.below(cycle.tree_edges.size())]};
}

inline std::string describe(const Instance& inst) {
    return "seed=" + std::to_string(inst.seed) + " n=" + std::to_string(inst.g.n()) + " m=" + std::to_string(inst.g.m());
}

}  // namespace kthin::test
