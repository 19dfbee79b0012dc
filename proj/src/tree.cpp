#include "kthin/tree.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "kthin/error.hpp"
#include "kthin/rng.hpp"

namespace kthin {

RootedTree::RootedTree(const WeightedGraph& g, std::vector<EdgeId> tree_edges) {
    const Vertex n = g.n();
    if (n < 1) throw InvalidTree("empty graph");
    if (static_cast<Vertex>(tree_edges.size()) != n - 1) {
        throw InvalidTree("a spanning tree needs exactly n-1 = " + std::to_string(n - 1) + " edges, got " +
                          std::to_string(tree_edges.size()));
    }
    std::sort(tree_edges.begin(), tree_edges.end());
    if (std::adjacent_find(tree_edges.begin(), tree_edges.end()) != tree_edges.end()) {
        throw InvalidTree("duplicate tree edge");
    }
    in_tree_.assign(static_cast<std::size_t>(g.m()), false);
    std::vector<std::vector<std::pair<Vertex, EdgeId>>> adj(static_cast<std::size_t>(n));
    for (EdgeId id : tree_edges) {
        if (id < 0 || id >= g.m()) throw InvalidTree("tree edge id out of range");
        in_tree_[static_cast<std::size_t>(id)] = true;
        const Edge& e = g.edge(id);
        adj[idx(e.u)].push_back({e.v, id});
        adj[idx(e.v)].push_back({e.u, id});
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    edge_ids_ = std::move(tree_edges);

    const auto un = static_cast<std::size_t>(n);
    parent_.assign(un, -1);
    parent_edge_.assign(un, -1);
    depth_.assign(un, 0);
    tin_.assign(un, -1);
    size_.assign(un, 1);
    first_.assign(un, -1);
    preorder_.clear();
    preorder_.reserve(un);
    euler_.clear();
    euler_.reserve(2 * un);

    // Iterative DFS: (vertex, next adjacency position).
    std::vector<std::pair<Vertex, std::size_t>> stack;
    stack.push_back({0, 0});
    tin_[0] = 0;
    preorder_.push_back(0);
    first_[0] = 0;
    euler_.push_back(0);
    while (!stack.empty()) {
        auto& [v, pos] = stack.back();
        const auto& list = adj[idx(v)];
        while (pos < list.size() && list[pos].first == parent_[idx(v)]) ++pos;
        if (pos == list.size()) {
            const Vertex done = v;
            stack.pop_back();
            if (!stack.empty()) {
                size_[idx(stack.back().first)] += size_[idx(done)];
                euler_.push_back(stack.back().first);
            }
            continue;
        }
        const auto [child, edge] = list[pos++];
        if (tin_[idx(child)] != -1) throw InvalidTree("tree edges contain a cycle");
        parent_[idx(child)] = v;
        parent_edge_[idx(child)] = edge;
        depth_[idx(child)] = depth_[idx(v)] + 1;
        tin_[idx(child)] = static_cast<std::int32_t>(preorder_.size());
        preorder_.push_back(child);
        first_[idx(child)] = static_cast<std::int32_t>(euler_.size());
        euler_.push_back(child);
        stack.push_back({child, 0});
    }
    if (static_cast<Vertex>(preorder_.size()) != n) throw InvalidTree("tree edges do not span the graph");

    child_offset_.assign(un + 1, 0);
    for (Vertex v = 1; v < n; ++v) ++child_offset_[idx(parent_[idx(v)]) + 1];
    std::partial_sum(child_offset_.begin(), child_offset_.end(), child_offset_.begin());
    child_list_.assign(un > 0 ? un - 1 : 0, 0);
    std::vector<std::size_t> fill(child_offset_.begin(), child_offset_.end() - 1);
    for (Vertex v = 1; v < n; ++v) child_list_[fill[idx(parent_[idx(v)])]++] = v;

    const std::size_t len = euler_.size();
    sparse_.clear();
    sparse_.push_back(euler_);
    for (std::size_t span = 2; span <= len; span *= 2) {
        const auto& prev = sparse_.back();
        std::vector<Vertex> level(len - span + 1);
        for (std::size_t i = 0; i + span <= len; ++i) {
            const Vertex a = prev[i];
            const Vertex b = prev[i + span / 2];
            level[i] = depth_[idx(a)] <= depth_[idx(b)] ? a : b;
        }
        sparse_.push_back(std::move(level));
    }

    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(n));
    for (EdgeId id : edge_ids_) h = splitmix64(h ^ static_cast<std::uint64_t>(id));
    fingerprint_ = h;
}

Vertex RootedTree::lca(Vertex u, Vertex v) const {
    std::size_t a = static_cast<std::size_t>(first_[idx(u)]);
    std::size_t b = static_cast<std::size_t>(first_[idx(v)]);
    if (a > b) std::swap(a, b);
    const std::size_t span = b - a + 1;
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= span) ++level;
    const Vertex x = sparse_[level][a];
    const Vertex y = sparse_[level][b + 1 - (std::size_t{1} << level)];
    return depth_[idx(x)] <= depth_[idx(y)] ? x : y;
}

std::vector<std::pair<Vertex, Vertex>> RootedTree::child_parent_pairs() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex v = 1; v < n(); ++v) out.push_back({v, parent(v)});
    return out;
}

RootedTree tree_from_pairs(const WeightedGraph& g, std::span<const std::pair<Vertex, Vertex>> pairs) {
    std::vector<EdgeId> ids;
    for (const auto& [u, v] : pairs) {
        const EdgeId id = g.find_edge(u, v);
        if (id < 0) {
            throw InvalidTree("(" + std::to_string(u + 1) + "," + std::to_string(v + 1) + ") is not an edge of the graph");
        }
        ids.push_back(id);
    }
    return RootedTree(g, std::move(ids));
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(Vertex n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    Vertex find(Vertex v) {
        while (parent_[static_cast<std::size_t>(v)] != v) {
            auto& p = parent_[static_cast<std::size_t>(v)];
            p = parent_[static_cast<std::size_t>(p)];
            v = p;
        }
        return v;
    }
    bool unite(Vertex a, Vertex b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[static_cast<std::size_t>(b)] = a;
        return true;
    }

private:
    std::vector<Vertex> parent_;
};

template <class Less>
RootedTree kruskal(const WeightedGraph& g, Less less) {
    std::vector<EdgeId> order(static_cast<std::size_t>(g.m()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), less);
    DisjointSets sets(g.n());
    std::vector<EdgeId> chosen;
    for (EdgeId id : order) {
        const Edge& e = g.edge(id);
        if (sets.unite(e.u, e.v)) chosen.push_back(id);
    }
    if (static_cast<Vertex>(chosen.size()) + 1 != g.n()) throw DisconnectedGraph();
    return RootedTree(g, std::move(chosen));
}

}  // namespace

RootedTree minimum_spanning_tree(const WeightedGraph& g) {
    return kruskal(g, [&](EdgeId a, EdgeId b) { return g.edge(a).w < g.edge(b).w; });
}

RootedTree unit_spanning_tree(const WeightedGraph& g) {
    return kruskal(g, [](EdgeId, EdgeId) { return false; });
}

RootedTree spanning_tree_by_keys(const WeightedGraph& g, std::span<const double> keys) {
    if (static_cast<EdgeId>(keys.size()) != g.m()) throw Error("one key per edge required");
    return kruskal(g, [&](EdgeId a, EdgeId b) {
        return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
    });
}

RootedTree random_spanning_tree(const WeightedGraph& g, std::uint64_t seed) {
    CounterRng rng(seed, 0x7472656573ULL);
    std::vector<double> keys(static_cast<std::size_t>(g.m()));
    for (double& key : keys) key = rng.uniform();
    return spanning_tree_by_keys(g, keys);
}

TreePolicy parse_tree_policy(std::string_view name) {
    if (name == "mst") return TreePolicy::mst;
    if (name == "random") return TreePolicy::random;
    throw Error("unknown tree policy: " + std::string(name));
}

RootedTree build_tree(const WeightedGraph& g, TreePolicy policy, std::uint64_t seed) {
    switch (policy) {
        case TreePolicy::mst:
            return minimum_spanning_tree(g);
        case TreePolicy::random:
            return random_spanning_tree(g, seed);
    }
    throw Error("unknown tree policy");
}

RootedTree parse_tree(const WeightedGraph& g, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    long long n = -1;
    std::vector<std::pair<Vertex, Vertex>> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string tag;
        if (!(tokens >> tag)) continue;
        std::string extra;
        if (tag == "t") {
            long long root = 0;
            if (n >= 0) throw ParseError(line_no, "duplicate header");
            if (!(tokens >> n >> root) || (tokens >> extra)) throw ParseError(line_no, "malformed line");
            if (n != g.n()) throw ParseError(line_no, "tree vertex count does not match the graph");
            if (root < 1 || root > n) throw ParseError(line_no, "vertex id out of range");
        } else if (tag == "b") {
            long long child = 0;
            long long parent = 0;
            if (n < 0) throw ParseError(line_no, "tree edge before header");
            if (!(tokens >> child >> parent) || (tokens >> extra)) throw ParseError(line_no, "malformed line");
            if (child < 1 || child > n || parent < 1 || parent > n) throw ParseError(line_no, "vertex id out of range");
            pairs.push_back({static_cast<Vertex>(child - 1), static_cast<Vertex>(parent - 1)});
        } else {
            throw ParseError(line_no, "malformed line");
        }
    }
    if (n < 0) throw ParseError(0, "missing header");
    return tree_from_pairs(g, pairs);
}

RootedTree read_tree_file(const WeightedGraph& g, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open tree file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_tree(g, buffer.str());
}

std::string serialize_tree(const RootedTree& t) {
    std::ostringstream out;
    out << "t " << t.n() << " 1\n";
    for (const auto& [child, parent] : t.child_parent_pairs()) out << "b " << child + 1 << ' ' << parent + 1 << '\n';
    return out.str();
}

FundamentalCycle fundamental_cycle(const WeightedGraph& g, const RootedTree& t, EdgeId f) {
    if (f < 0 || f >= g.m()) throw IllegalSwap("edge id out of range");
    if (t.contains_edge(f)) throw IllegalSwap("edge is already a tree edge");
    const Edge& edge = g.edge(f);
    const Vertex top = t.lca(edge.u, edge.v);
    FundamentalCycle cycle;
    cycle.f = f;
    for (Vertex x = edge.u; x != top; x = t.parent(x)) {
        cycle.path.push_back(x);
        cycle.tree_edges.push_back(t.parent_edge(x));
    }
    cycle.path.push_back(top);
    std::vector<Vertex> tail;
    std::vector<EdgeId> tail_edges;
    for (Vertex y = edge.v; y != top; y = t.parent(y)) {
        tail.push_back(y);
        tail_edges.push_back(t.parent_edge(y));
    }
    cycle.path.insert(cycle.path.end(), tail.rbegin(), tail.rend());
    cycle.tree_edges.insert(cycle.tree_edges.end(), tail_edges.rbegin(), tail_edges.rend());
    return cycle;
}

SwapResult apply_swap(const WeightedGraph& g, const RootedTree& t, SwapMove move) {
    if (!t.contains_edge(move.e)) throw IllegalSwap("leaving edge is not a tree edge");
    const FundamentalCycle cycle = fundamental_cycle(g, t, move.f);
    if (std::find(cycle.tree_edges.begin(), cycle.tree_edges.end(), move.e) == cycle.tree_edges.end()) {
        throw IllegalSwap("leaving edge is not on the fundamental cycle of the entering edge");
    }
    std::vector<EdgeId> edges = t.edge_ids();
    std::replace(edges.begin(), edges.end(), move.e, move.f);

    SwapResult result{RootedTree(g, std::move(edges)), {}, cycle.path.size()};
    const Edge& f = g.edge(move.f);
    const Vertex top = t.lca(f.u, f.v);
    for (Vertex v : cycle.path) {
        if (v != top) result.affected.push_back(v);
    }
    std::sort(result.affected.begin(), result.affected.end());
    return result;
}

}  // namespace kthin
