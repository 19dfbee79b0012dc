#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kthin/graph.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// A t-respecting cut named by the child endpoints of its crossed tree
/// edges: A = D(v_1) xor ... xor D(v_t). Endpoints are distinct non-root
/// vertices stored in preorder (tin) order.
class CutSpec {
public:
    /// Endpoints in any order; throws InvalidSpec on an empty list, a
    /// duplicate, the root, or an out-of-range vertex.
    CutSpec(const RootedTree& t, std::vector<Vertex> endpoints);

    std::span<const Vertex> endpoints() const noexcept { return endpoints_; }
    std::size_t size() const noexcept { return endpoints_.size(); }
    /// Endpoints sorted by vertex id.
    std::vector<Vertex> sorted_ids() const;

    /// Shore as a membership vector (used by tests and certificate checks).
    CutShore shore(const RootedTree& t) const;

private:
    std::vector<Vertex> endpoints_;
};

/// Pairwise laminar structure of a set of endpoints. ancestors[i] has bit j
/// set iff endpoint j is a strict ancestor of endpoint i. Supports t <= 64.
struct LaminarProfile {
    std::vector<Vertex> endpoints;
    std::vector<std::uint64_t> ancestors;

    static LaminarProfile build(const RootedTree& t, std::span<const Vertex> endpoints);

    bool below(std::size_t i, std::size_t j) const { return (ancestors[i] >> j) & 1U; }  ///< j strict ancestor of i
    bool disjoint(std::size_t i, std::size_t j) const { return !below(i, j) && !below(j, i) && i != j; }
};

/// w(intersection over x in S of delta(D(x))) by laminar case analysis:
/// pairwise disjoint (|S| >= 3) -> 0; a single chain -> pi(deepest,
/// shallowest); a common top with branching -> 0; otherwise eliminate the
/// shallowest ancestor that has a descendant in S and is disjoint from some
/// other member, and repeat. |S| = 2 reads pi directly. Throws InvalidSpec
/// if |S| < 2 or the root is in S.
Weight kwise_boundary_intersection(const RootedTree& t, const PairTable& table, std::span<const Vertex> s);

/// w(delta(A)) for A = xor of D(v_i), in O(t^2) from tau and pi:
///   sum_i tau(v_i) - 2 sum_{p below q} (-1)^{c(p,q)} pi(p,q)
///                  - 2 sum_{p disjoint q} (-1)^{a(p,q)} pi(p,q)
/// where c counts endpoints strictly between p and q, and a counts endpoints
/// that are strict ancestors of exactly one of p, q.
Weight evaluate_cut(const RootedTree& t, const PairTable& table, const CutSpec& spec);

/// evaluate_cut without building a CutSpec: endpoints in any order, assumed
/// distinct and non-root (unchecked), at most 64.
Weight evaluate_endpoints(const RootedTree& t, const PairTable& table, std::span<const Vertex> endpoints);

/// Same value through the full inclusion-exclusion expansion
///   sum_{nonempty I} (-2)^{|I|-1} w(intersection of delta(D(v_i)), i in I),
/// each term from kwise_boundary_intersection. Exponential in t.
Weight evaluate_cut_inclusion_exclusion(const RootedTree& t, const PairTable& table, const CutSpec& spec);

/// Number of tree edges crossed (= spec.size()) and, when requested, the
/// crossed tree edges as graph edge ids.
std::size_t tree_crossings(const RootedTree& t, const CutSpec& spec, std::vector<EdgeId>* edges = nullptr);

}  // namespace kthin
