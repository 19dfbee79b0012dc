#pragma once

#include <cstdint>
#include <vector>

#include "kthin/graph.hpp"
#include "kthin/rational.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// Brute-force ground truth by direct edge scans. Nothing here touches the
/// Euler indices, the LCA structure or the pair tables: descendant sets are
/// rebuilt by walking parent pointers.
namespace oracle {

/// Hard limit on exhaustive enumeration; `allow_large` raises it to 30.
inline constexpr Vertex kMaxVertices = 20;

/// Shores are bitmasks over vertices; canonical shores never contain vertex 0.
using ShoreMask = std::uint64_t;

std::vector<bool> descendants(const RootedTree& t, Vertex u);

Weight tau(const WeightedGraph& g, const RootedTree& t, Vertex u);
Weight pi(const WeightedGraph& g, const RootedTree& t, Vertex u, Vertex v);
Weight sigma(const WeightedGraph& g, const RootedTree& t, Vertex u, Vertex v);

Weight cut_weight(const WeightedGraph& g, ShoreMask shore);
/// Child endpoints of the tree edges crossing the shore, ascending.
std::vector<Vertex> crossed_endpoints(const RootedTree& t, ShoreMask shore);
ShoreMask mask_of(const CutShore& shore);

struct ThetaResult {
    Rational theta{0};
    std::int64_t crossings = 0;
    Weight weight = 0;
    ShoreMask shore = 0;
    std::vector<Vertex> endpoints;  ///< ascending vertex ids
    bool unbounded = false;         ///< some admissible cut has weight 0
};

/// Max of |T cap delta(A)| / w(delta(A)) over canonical shores crossing at
/// most k tree edges. Ties: fewer crossings, then lexicographically smaller
/// endpoint ids.
ThetaResult theta(const WeightedGraph& g, const RootedTree& t, int k, bool allow_large = false);

/// Unrestricted maximum (full thinness of t).
ThetaResult thinness(const WeightedGraph& g, const RootedTree& t, bool allow_large = false);

/// All canonical shores with w(delta(A)) <= alpha * lambda, ascending.
std::vector<ShoreMask> near_min_cuts(const WeightedGraph& g, double alpha, bool allow_large = false);

/// Every canonical shore (2^{n-1} - 1 of them).
std::vector<ShoreMask> all_cuts(Vertex n, bool allow_large = false);

/// Minimum over all canonical shores.
Weight lambda(const WeightedGraph& g, bool allow_large = false);

void check_guard(Vertex n, bool allow_large);

}  // namespace oracle
}  // namespace kthin
