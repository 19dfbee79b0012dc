#include "kthin/pair_stats.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <tuple>

#include "kthin/error.hpp"

namespace kthin {

namespace {

std::size_t sz(Vertex v) { return static_cast<std::size_t>(v); }

// Offline path accumulation over a subset of edges: for each edge {a,b},
// +w at a and b, -2w at lca(a,b), then subtree sums. Result[v] is the
// weight of the chosen edges with exactly one endpoint in D(v).
template <class EdgeFilter>
void accumulate_paths(const WeightedGraph& g, const RootedTree& t, EdgeFilter&& keep, std::vector<Weight>& out) {
    out.assign(sz(t.n()), 0);
    for (const Edge& e : g.edges()) {
        if (!keep(e)) continue;
        out[sz(e.u)] += e.w;
        out[sz(e.v)] += e.w;
        out[sz(t.lca(e.u, e.v))] -= 2 * e.w;
    }
    const auto& order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (*it != t.root()) out[sz(t.parent(*it))] += out[sz(*it)];
    }
}

}  // namespace

Weight SparseBeta::at(Vertex x, Vertex y) const {
    const auto& row = rows[sz(x)];
    auto it = std::lower_bound(row.begin(), row.end(), std::pair<Vertex, Weight>{y, INT64_MIN});
    return it != row.end() && it->first == y ? it->second : 0;
}

Weight SparseBeta::total() const {
    Weight sum = 0;
    for (const auto& row : rows) {
        for (const auto& [col, value] : row) sum += value;
    }
    return sum;
}

std::size_t SparseBeta::nonzeros() const {
    std::size_t count = 0;
    for (const auto& row : rows) count += row.size();
    return count;
}

std::vector<Weight> build_tau(const WeightedGraph& g, const RootedTree& t) {
    std::vector<Weight> tau;
    accumulate_paths(g, t, [](const Edge&) { return true; }, tau);
    return tau;
}

SparseBeta build_beta(const WeightedGraph& g, const RootedTree& t) {
    std::vector<std::tuple<Vertex, Vertex, Weight>> updates;
    updates.reserve(9 * static_cast<std::size_t>(g.m()));
    for (const Edge& e : g.edges()) {
        const Vertex a = e.u;
        const Vertex b = e.v;
        const Vertex l = t.lca(a, b);
        const Weight w = e.w;
        updates.emplace_back(a, a, w);
        updates.emplace_back(b, b, w);
        updates.emplace_back(a, b, w);
        updates.emplace_back(b, a, w);
        updates.emplace_back(a, l, -2 * w);
        updates.emplace_back(l, a, -2 * w);
        updates.emplace_back(b, l, -2 * w);
        updates.emplace_back(l, b, -2 * w);
        updates.emplace_back(l, l, 4 * w);
    }
    std::sort(updates.begin(), updates.end());

    SparseBeta beta;
    beta.n = t.n();
    beta.rows.resize(sz(t.n()));
    for (std::size_t i = 0; i < updates.size();) {
        const auto [x, y, first] = updates[i];
        Weight value = first;
        std::size_t j = i + 1;
        for (; j < updates.size() && std::get<0>(updates[j]) == x && std::get<1>(updates[j]) == y; ++j) {
            value += std::get<2>(updates[j]);
        }
        if (value != 0) beta.rows[sz(x)].push_back({y, value});
        i = j;
    }
    return beta;
}

std::vector<Weight> build_pi(const RootedTree& t, const SparseBeta& beta) {
    const std::size_t n = sz(t.n());
    const auto& order = t.preorder();

    // RowSum(u, .) = beta[u, .] + sum of children's RowSum rows.
    std::vector<Weight> row_sum(n * n, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Vertex u = *it;
        Weight* row = row_sum.data() + sz(u) * n;
        for (const auto& [col, value] : beta.rows[sz(u)]) row[sz(col)] += value;
        for (Vertex p : t.children(u)) {
            const Weight* child = row_sum.data() + sz(p) * n;
            for (std::size_t v = 0; v < n; ++v) row[v] += child[v];
        }
    }

    std::vector<Weight> f(n * n, 0);
    std::vector<Weight> col_sum(n);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Vertex u = *it;
        // ColSum(u, v) = sum_{y in Sub(v)} beta[u, y], one bottom-up pass over v.
        std::fill(col_sum.begin(), col_sum.end(), 0);
        for (const auto& [col, value] : beta.rows[sz(u)]) col_sum[sz(col)] = value;
        for (auto jt = order.rbegin(); jt != order.rend(); ++jt) {
            if (*jt != t.root()) col_sum[sz(t.parent(*jt))] += col_sum[sz(*jt)];
        }

        Weight* out = f.data() + sz(u) * n;
        for (const auto& [col, value] : beta.rows[sz(u)]) out[sz(col)] += value;
        for (Vertex p : t.children(u)) {
            const Weight* rs = row_sum.data() + sz(p) * n;
            for (std::size_t v = 0; v < n; ++v) out[v] += rs[v];
        }
        for (Vertex q = 0; q < t.n(); ++q) {
            if (q != t.root()) out[sz(t.parent(q))] += col_sum[sz(q)];
        }
        for (Vertex p : t.children(u)) {
            const Weight* fp = f.data() + sz(p) * n;
            for (Vertex q = 0; q < t.n(); ++q) {
                if (q != t.root()) out[sz(t.parent(q))] += fp[sz(q)];
            }
        }
    }
    return f;
}

std::vector<Weight> assemble_sigma(std::span<const Weight> tau, std::span<const Weight> pi) {
    const std::size_t n = tau.size();
    if (pi.size() != n * n) throw ConsistencyFault("pi table has the wrong shape");
    std::vector<Weight> sigma(n * n);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            const Weight value = tau[u] + tau[v] - 2 * pi[u * n + v];
            if (value < 0) {
                throw ConsistencyFault("negative sigma(" + std::to_string(u + 1) + "," + std::to_string(v + 1) + ")");
            }
            sigma[u * n + v] = value;
        }
    }
    return sigma;
}

PairStats build_pair_stats(const WeightedGraph& g, const RootedTree& t) {
    PairStats stats;
    stats.n = t.n();
    stats.tau = build_tau(g, t);
    stats.pi = build_pi(t, build_beta(g, t));
    stats.sigma = assemble_sigma(stats.tau, stats.pi);
    stats.tree_fingerprint = t.fingerprint();
    return stats;
}

UpdateReport update_after_swap(PairStats& stats, const WeightedGraph& g, const RootedTree& old_t,
                               const RootedTree& new_t, const SwapResult& swap) {
    if (stats.tree_fingerprint != old_t.fingerprint() || stats.n != old_t.n()) {
        throw VersionMismatch("pair statistics were not built for the pre-swap tree");
    }
    if (new_t.n() != old_t.n() || !(new_t == swap.tree)) throw VersionMismatch("swap result does not match new tree");
    const std::size_t n = sz(stats.n);
    UpdateReport report;
    if (4 * swap.cycle_size > n) {
        stats = build_pair_stats(g, new_t);
        report.touched = n * n;
        report.full_rebuild = true;
        return report;
    }

    std::vector<Weight> row;
    for (Vertex u : swap.affected) {
        accumulate_paths(
            g, new_t, [&](const Edge& e) { return new_t.is_ancestor(u, e.u) != new_t.is_ancestor(u, e.v); }, row);
        for (std::size_t v = 0; v < n; ++v) {
            stats.pi[stats.cell(u, static_cast<Vertex>(v))] = row[v];
            stats.pi[stats.cell(static_cast<Vertex>(v), u)] = row[v];
        }
        report.touched += 2 * n - 1;
    }
    for (Vertex u : swap.affected) stats.tau[sz(u)] = stats.pi_at(u, u);
    for (Vertex u : swap.affected) {
        for (std::size_t v = 0; v < n; ++v) {
            const Weight value = stats.tau[sz(u)] + stats.tau[v] - 2 * stats.pi[stats.cell(u, static_cast<Vertex>(v))];
            if (value < 0) throw ConsistencyFault("negative sigma after swap update");
            stats.sigma[stats.cell(u, static_cast<Vertex>(v))] = value;
            stats.sigma[stats.cell(static_cast<Vertex>(v), u)] = value;
        }
    }
    stats.tree_fingerprint = new_t.fingerprint();
    return report;
}

namespace {

constexpr std::array<char, 8> kMagic = {'K', 'T', 'H', 'N', 'S', 'I', 'G', '1'};

void put_u64(std::ostream& out, std::uint64_t x) {
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((x >> (8 * i)) & 0xff);
    out.write(bytes.data(), 8);
}

void put_u32(std::ostream& out, std::uint32_t x) {
    std::array<char, 4> bytes{};
    for (std::size_t i = 0; i < 4; ++i) bytes[i] = static_cast<char>((x >> (8 * i)) & 0xff);
    out.write(bytes.data(), 4);
}

std::uint64_t get_u(std::istream& in, std::size_t width) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(width));
    if (!in) throw Error("truncated pair statistics dump");
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < width; ++i) x |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return x;
}

}  // namespace

void write_pair_stats(std::ostream& out, const PairStats& stats) {
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(stats.n));
    for (Weight x : stats.tau) put_u64(out, static_cast<std::uint64_t>(x));
    for (Weight x : stats.pi) put_u64(out, static_cast<std::uint64_t>(x));
    for (Weight x : stats.sigma) put_u64(out, static_cast<std::uint64_t>(x));
}

PairStats read_pair_stats(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw Error("not a pair statistics dump");
    if (get_u(in, 4) != 1) throw Error("unsupported pair statistics version");
    PairStats stats;
    stats.n = static_cast<Vertex>(get_u(in, 4));
    const std::size_t n = sz(stats.n);
    stats.tau.resize(n);
    stats.pi.resize(n * n);
    stats.sigma.resize(n * n);
    for (Weight& x : stats.tau) x = static_cast<Weight>(get_u(in, 8));
    for (Weight& x : stats.pi) x = static_cast<Weight>(get_u(in, 8));
    for (Weight& x : stats.sigma) x = static_cast<Weight>(get_u(in, 8));
    return stats;
}

}  // namespace kthin
