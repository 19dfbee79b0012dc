#include "kthin/oracle.hpp"

#include <limits>

#include "kthin/error.hpp"

namespace kthin::oracle {

void check_guard(Vertex n, bool allow_large) {
    const Vertex limit = allow_large ? 30 : kMaxVertices;
    if (n > limit) {
        throw GuardExceeded("exhaustive enumeration limited to n <= " + std::to_string(limit) + " (n = " +
                            std::to_string(n) + ")");
    }
}

std::vector<bool> descendants(const RootedTree& t, Vertex u) {
    std::vector<bool> in(static_cast<std::size_t>(t.n()), false);
    for (Vertex x = 0; x < t.n(); ++x) {
        for (Vertex y = x;; y = t.parent(y)) {
            if (y == u) {
                in[static_cast<std::size_t>(x)] = true;
                break;
            }
            if (y == t.root()) break;
        }
    }
    return in;
}

namespace {

bool crosses(const std::vector<bool>& set, const Edge& e) {
    return set[static_cast<std::size_t>(e.u)] != set[static_cast<std::size_t>(e.v)];
}

}  // namespace

Weight tau(const WeightedGraph& g, const RootedTree& t, Vertex u) {
    const auto d = descendants(t, u);
    Weight total = 0;
    for (const Edge& e : g.edges()) {
        if (crosses(d, e)) total += e.w;
    }
    return total;
}

Weight pi(const WeightedGraph& g, const RootedTree& t, Vertex u, Vertex v) {
    const auto du = descendants(t, u);
    const auto dv = descendants(t, v);
    Weight total = 0;
    for (const Edge& e : g.edges()) {
        if (crosses(du, e) && crosses(dv, e)) total += e.w;
    }
    return total;
}

Weight sigma(const WeightedGraph& g, const RootedTree& t, Vertex u, Vertex v) {
    const auto du = descendants(t, u);
    const auto dv = descendants(t, v);
    std::vector<bool> sym(du.size());
    for (std::size_t i = 0; i < du.size(); ++i) sym[i] = du[i] != dv[i];
    Weight total = 0;
    for (const Edge& e : g.edges()) {
        if (crosses(sym, e)) total += e.w;
    }
    return total;
}

Weight cut_weight(const WeightedGraph& g, ShoreMask shore) {
    Weight total = 0;
    for (const Edge& e : g.edges()) {
        if (((shore >> e.u) ^ (shore >> e.v)) & 1U) total += e.w;
    }
    return total;
}

std::vector<Vertex> crossed_endpoints(const RootedTree& t, ShoreMask shore) {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < t.n(); ++v) {
        if (v == t.root()) continue;
        if (((shore >> v) ^ (shore >> t.parent(v))) & 1U) out.push_back(v);
    }
    return out;
}

ShoreMask mask_of(const CutShore& shore) {
    ShoreMask mask = 0;
    for (Vertex v = 0; v < shore.n(); ++v) {
        if (shore.contains(v)) mask |= ShoreMask{1} << v;
    }
    return mask;
}

std::vector<ShoreMask> all_cuts(Vertex n, bool allow_large) {
    check_guard(n, allow_large);
    std::vector<ShoreMask> out;
    if (n < 2) return out;
    const ShoreMask count = (ShoreMask{1} << (n - 1)) - 1;
    out.reserve(static_cast<std::size_t>(count));
    for (ShoreMask i = 1; i <= count; ++i) out.push_back(i << 1);
    return out;
}

namespace {

ThetaResult restricted_max(const WeightedGraph& g, const RootedTree& t, std::int64_t k, bool allow_large) {
    ThetaResult best;
    bool found = false;
    for (ShoreMask shore : all_cuts(g.n(), allow_large)) {
        std::vector<Vertex> endpoints = crossed_endpoints(t, shore);
        const auto crossings = static_cast<std::int64_t>(endpoints.size());
        if (crossings > k) continue;
        const Weight w = cut_weight(g, shore);
        if (w == 0) {
            best.unbounded = true;
            continue;
        }
        const Rational ratio(crossings, w);
        bool better = !found || ratio > best.theta;
        if (found && ratio == best.theta) {
            better = crossings < best.crossings || (crossings == best.crossings && endpoints < best.endpoints);
        }
        if (better) {
            found = true;
            best.theta = ratio;
            best.crossings = crossings;
            best.weight = w;
            best.shore = shore;
            best.endpoints = std::move(endpoints);
        }
    }
    return best;
}

}  // namespace

ThetaResult theta(const WeightedGraph& g, const RootedTree& t, int k, bool allow_large) {
    return restricted_max(g, t, k, allow_large);
}

ThetaResult thinness(const WeightedGraph& g, const RootedTree& t, bool allow_large) {
    return restricted_max(g, t, std::numeric_limits<std::int64_t>::max(), allow_large);
}

Weight lambda(const WeightedGraph& g, bool allow_large) {
    Weight best = std::numeric_limits<Weight>::max();
    for (ShoreMask shore : all_cuts(g.n(), allow_large)) best = std::min(best, cut_weight(g, shore));
    return best == std::numeric_limits<Weight>::max() ? 0 : best;
}

std::vector<ShoreMask> near_min_cuts(const WeightedGraph& g, double alpha, bool allow_large) {
    const Weight lam = lambda(g, allow_large);
    const long double bound = static_cast<long double>(alpha) * static_cast<long double>(lam);
    std::vector<ShoreMask> out;
    for (ShoreMask shore : all_cuts(g.n(), allow_large)) {
        if (static_cast<long double>(cut_weight(g, shore)) <= bound) out.push_back(shore);
    }
    return out;
}

}  // namespace kthin::oracle
