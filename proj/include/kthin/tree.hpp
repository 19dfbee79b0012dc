#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kthin/graph.hpp"

namespace kthin {

/// Spanning tree of a WeightedGraph rooted at vertex 0, with preorder
/// (Euler) intervals and a constant-time LCA index.
///
/// tin(v) is the preorder index of v and tout(v) = tin(v) + subtree_size(v) - 1,
/// so D(v) is exactly the set of vertices whose tin lies in [tin(v), tout(v)].
/// Children are visited in increasing vertex id, which makes the indices a
/// pure function of the edge set.
class RootedTree {
public:
    RootedTree() = default;
    /// Throws InvalidTree unless `tree_edges` are n-1 distinct edge ids of g
    /// forming a spanning tree.
    RootedTree(const WeightedGraph& g, std::vector<EdgeId> tree_edges);

    Vertex n() const noexcept { return static_cast<Vertex>(parent_.size()); }
    Vertex root() const noexcept { return 0; }

    Vertex parent(Vertex v) const { return parent_[idx(v)]; }
    EdgeId parent_edge(Vertex v) const { return parent_edge_[idx(v)]; }
    std::int32_t depth(Vertex v) const { return depth_[idx(v)]; }
    std::int32_t tin(Vertex v) const { return tin_[idx(v)]; }
    std::int32_t tout(Vertex v) const { return tin_[idx(v)] + size_[idx(v)] - 1; }
    Vertex subtree_size(Vertex v) const { return size_[idx(v)]; }
    std::span<const Vertex> children(Vertex v) const {
        return {child_list_.data() + child_offset_[idx(v)], child_list_.data() + child_offset_[idx(v) + 1]};
    }
    /// preorder()[tin(v)] == v
    const std::vector<Vertex>& preorder() const noexcept { return preorder_; }

    /// Sorted tree edge ids.
    const std::vector<EdgeId>& edge_ids() const noexcept { return edge_ids_; }
    bool contains_edge(EdgeId id) const {
        return id >= 0 && static_cast<std::size_t>(id) < in_tree_.size() && in_tree_[static_cast<std::size_t>(id)];
    }

    /// True iff u is an ancestor of v or u == v (v in D(u)).
    bool is_ancestor(Vertex u, Vertex v) const { return tin(u) <= tin(v) && tout(v) <= tout(u); }
    Vertex lca(Vertex u, Vertex v) const;

    /// Hash of the edge set; equal trees share it.
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }

    /// (child, parent) pairs for every non-root vertex, ordered by child.
    std::vector<std::pair<Vertex, Vertex>> child_parent_pairs() const;

    friend bool operator==(const RootedTree& a, const RootedTree& b) { return a.edge_ids_ == b.edge_ids_; }

private:
    static std::size_t idx(Vertex v) { return static_cast<std::size_t>(v); }

    std::vector<Vertex> parent_;
    std::vector<EdgeId> parent_edge_;
    std::vector<std::int32_t> depth_;
    std::vector<std::int32_t> tin_;
    std::vector<Vertex> size_;
    std::vector<std::size_t> child_offset_;
    std::vector<Vertex> child_list_;
    std::vector<Vertex> preorder_;
    std::vector<EdgeId> edge_ids_;
    std::vector<bool> in_tree_;
    std::uint64_t fingerprint_ = 0;

    // Euler tour of length 2n-1 and a sparse table of the shallowest entry.
    std::vector<Vertex> euler_;
    std::vector<std::int32_t> first_;
    std::vector<std::vector<Vertex>> sparse_;
};

/// Tree given by explicit vertex pairs; each pair must be an edge of g.
RootedTree tree_from_pairs(const WeightedGraph& g, std::span<const std::pair<Vertex, Vertex>> pairs);

/// Kruskal on (weight, edge id).
RootedTree minimum_spanning_tree(const WeightedGraph& g);

/// Kruskal on edge id alone (all weights treated as 1).
RootedTree unit_spanning_tree(const WeightedGraph& g);

/// Kruskal on (key, edge id); keys.size() == m.
RootedTree spanning_tree_by_keys(const WeightedGraph& g, std::span<const double> keys);

/// MST under i.i.d. uniform random edge keys.
RootedTree random_spanning_tree(const WeightedGraph& g, std::uint64_t seed);

enum class TreePolicy { mst, random };
TreePolicy parse_tree_policy(std::string_view name);
RootedTree build_tree(const WeightedGraph& g, TreePolicy policy, std::uint64_t seed = 0);

/// "t <n> <root>" then n-1 lines "b <child> <parent>" (1-indexed). Any root
/// is accepted; the resulting tree is always rooted at vertex 1 (index 0).
RootedTree parse_tree(const WeightedGraph& g, std::string_view text);
RootedTree read_tree_file(const WeightedGraph& g, const std::string& path);
std::string serialize_tree(const RootedTree& t);

/// Tree path between the endpoints of a non-tree edge f, and the tree
/// edges on it (each a legal swap partner).
struct FundamentalCycle {
    EdgeId f = -1;
    std::vector<Vertex> path;         ///< from edge(f).u to edge(f).v
    std::vector<EdgeId> tree_edges;   ///< path[i] -- path[i+1]
};

/// Throws IllegalSwap if f is a tree edge.
FundamentalCycle fundamental_cycle(const WeightedGraph& g, const RootedTree& t, EdgeId f);

struct SwapMove {
    EdgeId f = -1;  ///< entering non-tree edge
    EdgeId e = -1;  ///< leaving tree edge on the fundamental cycle of f
};

struct SwapResult {
    RootedTree tree;
    /// Superset of the vertices whose descendant set changed: the cycle
    /// vertices other than the lca of f's endpoints (in the old tree).
    std::vector<Vertex> affected;
    /// Number of vertices on the fundamental cycle.
    std::size_t cycle_size = 0;
};

/// T - e + f. Throws IllegalSwap if the move is not legal for t.
SwapResult apply_swap(const WeightedGraph& g, const RootedTree& t, SwapMove move);

}  // namespace kthin
