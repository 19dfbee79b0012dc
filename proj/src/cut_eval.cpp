#include "kthin/cut_eval.hpp"

#include <algorithm>
#include <bit>

#include "kthin/error.hpp"

namespace kthin {

namespace {

void check_endpoints(const RootedTree& t, std::span<const Vertex> endpoints) {
    if (endpoints.size() > 64) throw InvalidSpec("at most 64 endpoints are supported");
    std::vector<Vertex> sorted(endpoints.begin(), endpoints.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InvalidSpec("duplicate endpoint");
    for (Vertex v : sorted) {
        if (v < 0 || v >= t.n()) throw InvalidSpec("endpoint out of range");
        if (v == t.root()) throw InvalidSpec("endpoint is the root");
    }
}

}  // namespace

CutSpec::CutSpec(const RootedTree& t, std::vector<Vertex> endpoints) : endpoints_(std::move(endpoints)) {
    if (endpoints_.empty()) throw InvalidSpec("a cut spec needs at least one endpoint");
    check_endpoints(t, endpoints_);
    std::sort(endpoints_.begin(), endpoints_.end(), [&](Vertex a, Vertex b) { return t.tin(a) < t.tin(b); });
}

std::vector<Vertex> CutSpec::sorted_ids() const {
    std::vector<Vertex> ids = endpoints_;
    std::sort(ids.begin(), ids.end());
    return ids;
}

CutShore CutSpec::shore(const RootedTree& t) const {
    std::vector<bool> members(static_cast<std::size_t>(t.n()), false);
    for (Vertex v : endpoints_) {
        for (std::int32_t i = t.tin(v); i <= t.tout(v); ++i) {
            const auto x = static_cast<std::size_t>(t.preorder()[static_cast<std::size_t>(i)]);
            members[x] = !members[x];
        }
    }
    return CutShore(std::move(members));
}

LaminarProfile LaminarProfile::build(const RootedTree& t, std::span<const Vertex> endpoints) {
    LaminarProfile profile;
    profile.endpoints.assign(endpoints.begin(), endpoints.end());
    profile.ancestors.assign(endpoints.size(), 0);
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        for (std::size_t j = 0; j < endpoints.size(); ++j) {
            if (i != j && t.is_ancestor(endpoints[j], endpoints[i])) profile.ancestors[i] |= std::uint64_t{1} << j;
        }
    }
    return profile;
}

Weight kwise_boundary_intersection(const RootedTree& t, const PairTable& table, std::span<const Vertex> s) {
    if (s.size() < 2) throw InvalidSpec("k-wise intersection needs at least two endpoints");
    check_endpoints(t, s);
    std::vector<Vertex> set(s.begin(), s.end());
    while (true) {
        if (set.size() == 2) return table.pi_at(set[0], set[1]);
        const LaminarProfile profile = LaminarProfile::build(t, set);
        const std::size_t k = set.size();

        bool all_disjoint = true;
        bool chain = true;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (profile.disjoint(i, j)) {
                    chain = false;
                } else {
                    all_disjoint = false;
                }
            }
        }
        if (all_disjoint) return 0;
        if (chain) {
            const auto [lo, hi] = std::minmax_element(set.begin(), set.end(), [&](Vertex a, Vertex b) {
                return t.depth(a) < t.depth(b);
            });
            return table.pi_at(*hi, *lo);
        }
        for (std::size_t i = 0; i < k; ++i) {
            // i is a common top: every other member lies below it.
            bool top = true;
            for (std::size_t j = 0; j < k && top; ++j) top = j == i || profile.below(j, i);
            if (top) return 0;
        }

        // Eliminable ancestor: has a member strictly below it and a member
        // disjoint from it. The shallowest one goes first.
        std::size_t victim = k;
        for (std::size_t a = 0; a < k; ++a) {
            bool has_below = false;
            bool has_disjoint = false;
            for (std::size_t j = 0; j < k; ++j) {
                has_below = has_below || profile.below(j, a);
                has_disjoint = has_disjoint || profile.disjoint(a, j);
            }
            if (!has_below || !has_disjoint) continue;
            if (victim == k || t.depth(set[a]) < t.depth(set[victim]) ||
                (t.depth(set[a]) == t.depth(set[victim]) && t.tin(set[a]) < t.tin(set[victim]))) {
                victim = a;
            }
        }
        if (victim == k) throw ConsistencyFault("laminar case analysis found no applicable case");
        set.erase(set.begin() + static_cast<std::ptrdiff_t>(victim));
    }
}

Weight evaluate_endpoints(const RootedTree& t, const PairTable& table, std::span<const Vertex> v) {
    const std::size_t k = v.size();
    std::uint64_t anc[64];
    for (std::size_t i = 0; i < k; ++i) {
        anc[i] = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j && t.is_ancestor(v[j], v[i])) anc[i] |= std::uint64_t{1} << j;
        }
    }
    Weight total = 0;
    for (std::size_t i = 0; i < k; ++i) total += table.tau_at(v[i]);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const bool related = ((anc[i] >> j) & 1U) || ((anc[j] >> i) & 1U);
            const int between = std::popcount(anc[i] ^ anc[j]) - (related ? 1 : 0);
            const Weight term = 2 * table.pi_at(v[i], v[j]);
            total += (between % 2 == 0) ? -term : term;
        }
    }
    return total;
}

Weight evaluate_cut(const RootedTree& t, const PairTable& table, const CutSpec& spec) {
    return evaluate_endpoints(t, table, spec.endpoints());
}

Weight evaluate_cut_inclusion_exclusion(const RootedTree& t, const PairTable& table, const CutSpec& spec) {
    const auto endpoints = spec.endpoints();
    const std::size_t k = endpoints.size();
    if (k > 20) throw InvalidSpec("inclusion-exclusion limited to 20 endpoints");
    Weight total = 0;
    std::vector<Vertex> subset;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < k; ++i) {
            if ((mask >> i) & 1U) subset.push_back(endpoints[i]);
        }
        const Weight term = subset.size() == 1 ? table.tau_at(subset[0])
                                               : kwise_boundary_intersection(t, table, subset);
        const Weight coefficient = Weight{1} << (subset.size() - 1);
        total += (subset.size() % 2 == 1) ? coefficient * term : -coefficient * term;
    }
    return total;
}

std::size_t tree_crossings(const RootedTree& t, const CutSpec& spec, std::vector<EdgeId>* edges) {
    if (edges != nullptr) {
        edges->clear();
        for (Vertex v : spec.endpoints()) edges->push_back(t.parent_edge(v));
    }
    return spec.size();
}

}  // namespace kthin
