#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kthin {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;
using Weight = std::int64_t;

struct Edge {
    Vertex u;  ///< u < v
    Vertex v;
    Weight w;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Incidence entry of the adjacency index.
struct Incidence {
    Vertex to;
    EdgeId edge;
};

/// Undirected graph on vertices 0..n-1 with exact nonnegative integer
/// weights. Parallel edges are merged (weights summed) at construction and
/// keep the id of their first occurrence; self-loops are rejected. Text
/// formats are 1-indexed, the in-memory representation is 0-indexed.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(Vertex n, std::span<const Edge> edges);

    Vertex n() const noexcept { return n_; }
    EdgeId m() const noexcept { return static_cast<EdgeId>(edges_.size()); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_.at(static_cast<std::size_t>(id)); }

    std::span<const Incidence> incident(Vertex v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }

    /// Id of the edge {u, v}, or -1.
    EdgeId find_edge(Vertex u, Vertex v) const;

    Weight total_weight() const noexcept;
    bool is_connected() const;

    /// Same vertex count and the same set of weighted edges (ids ignored).
    friend bool operator==(const WeightedGraph& a, const WeightedGraph& b);

private:
    Vertex n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Incidence> adjacency_;
};

/// Parses "p <n> <m>" followed by "e <u> <v> <w>" lines; '#' starts a
/// comment. With decimal_scale = d, weights may carry up to d fractional
/// digits and are stored multiplied by 10^d.
WeightedGraph parse_graph(std::string_view text, int decimal_scale = 0);
WeightedGraph read_graph_file(const std::string& path, int decimal_scale = 0);

/// Emits the header and edges sorted by (u, v).
std::string serialize_graph(const WeightedGraph& g);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view text);

/// SHA-256 of serialize_graph(g), lowercase hex.
std::string graph_sha256(const WeightedGraph& g);

/// Shore of a cut as a membership vector. The canonical form never contains
/// vertex 0 (the anchor), so A and V \ A share one representation.
class CutShore {
public:
    CutShore() = default;
    explicit CutShore(std::vector<bool> members);
    static CutShore from_vertices(Vertex n, std::span<const Vertex> vertices);
    /// Bits of `mask` name the members; n <= 64.
    static CutShore from_mask(Vertex n, std::uint64_t mask);

    Vertex n() const noexcept { return static_cast<Vertex>(members_.size()); }
    bool contains(Vertex v) const { return members_[static_cast<std::size_t>(v)]; }
    std::size_t size() const;
    bool is_proper() const;

    CutShore complement() const;
    CutShore canonical() const;
    std::vector<Vertex> vertices() const;

    friend bool operator==(const CutShore&, const CutShore&) = default;

private:
    std::vector<bool> members_;
};

/// Sum of the weights of edges with exactly one endpoint in `a`.
Weight cut_weight(const WeightedGraph& g, const CutShore& a);

/// Global minimum cut value. Returns 0 iff g is disconnected.
Weight min_cut_lambda(const WeightedGraph& g);

/// Same as min_cut_lambda but throws DisconnectedGraph on 0.
Weight require_positive_lambda(const WeightedGraph& g);

enum class GraphKind { cycle, grid, complete, random_regular, wheel };

GraphKind parse_graph_kind(std::string_view name);

/// Deterministic unit-weight generators; every result is connected.
WeightedGraph generate(GraphKind kind, Vertex n, std::uint64_t seed = 0);

/// rows x cols grid; vertex r*cols+c sits at row r, column c.
WeightedGraph grid_graph(Vertex rows, Vertex cols);

/// Random connected graph: a random spanning tree plus random extra pairs
/// until `m` distinct edges exist (capped at n(n-1)/2), weights uniform in
/// [1, max_weight].
WeightedGraph random_connected(Vertex n, EdgeId m, Weight max_weight, std::uint64_t seed);

}  // namespace kthin
