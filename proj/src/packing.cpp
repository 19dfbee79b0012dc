#include "kthin/packing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kthin/error.hpp"
#include "kthin/parallel.hpp"

namespace kthin {

namespace {

struct UnionFind {
    std::vector<Vertex> parent;
    explicit UnionFind(Vertex n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    Vertex find(Vertex x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(Vertex a, Vertex b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

Rational decimal_rational(double x) {
    return Rational(static_cast<std::int64_t>(std::llround(x * 1e9)), 1'000'000'000);
}

TreePacking garg_koenemann(const WeightedGraph& g, double eps) {
    const auto m = static_cast<std::size_t>(g.m());
    const double delta = (1 + eps) / std::pow((1 + eps) * static_cast<double>(m), 1 / eps);
    std::vector<double> length(m);
    for (std::size_t e = 0; e < m; ++e) {
        const Weight w = g.edges()[e].w;
        length[e] = w > 0 ? delta / static_cast<double>(w) : HUGE_VAL;
    }
    std::vector<EdgeId> order(m);
    std::map<std::vector<EdgeId>, std::size_t> index;
    TreePacking packing;
    packing.eps = eps;

    auto potential = [&] {
        double d = 0;
        for (std::size_t e = 0; e < m; ++e) {
            if (g.edges()[e].w > 0) d += static_cast<double>(g.edges()[e].w) * length[e];
        }
        return d;
    };
    while (potential() < 1) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
            return length[static_cast<std::size_t>(a)] < length[static_cast<std::size_t>(b)];
        });
        UnionFind uf(g.n());
        std::vector<EdgeId> tree;
        for (EdgeId id : order) {
            const Edge& e = g.edge(id);
            if (e.w > 0 && uf.unite(e.u, e.v)) tree.push_back(id);
        }
        if (static_cast<Vertex>(tree.size()) + 1 != g.n()) throw DisconnectedGraph();
        std::sort(tree.begin(), tree.end());
        Weight amount = std::numeric_limits<Weight>::max();
        for (EdgeId id : tree) amount = std::min(amount, g.edge(id).w);
        for (EdgeId id : tree) {
            length[static_cast<std::size_t>(id)] *=
                1 + eps * static_cast<double>(amount) / static_cast<double>(g.edge(id).w);
        }
        auto [it, inserted] = index.try_emplace(tree, packing.entries.size());
        if (inserted) packing.entries.push_back({tree, 0});
        packing.entries[it->second].amount += amount;
        ++packing.iterations;
    }

    std::vector<std::int64_t> load(m, 0);
    for (const auto& entry : packing.entries) {
        for (EdgeId id : entry.edges) load[static_cast<std::size_t>(id)] += entry.amount;
    }
    bool first = true;
    for (std::size_t e = 0; e < m; ++e) {
        if (load[e] == 0) continue;
        const Rational ratio(g.edges()[e].w, load[e]);
        if (first || ratio < packing.scale) packing.scale = ratio;
        first = false;
    }
    return packing;
}

}  // namespace

std::int64_t TreePacking::total_amount() const {
    std::int64_t total = 0;
    for (const auto& entry : entries) total += entry.amount;
    return total;
}

std::vector<Rational> TreePacking::load(const WeightedGraph& g) const {
    std::vector<std::int64_t> raw(static_cast<std::size_t>(g.m()), 0);
    for (const auto& entry : entries) {
        for (EdgeId id : entry.edges) raw[static_cast<std::size_t>(id)] += entry.amount;
    }
    std::vector<Rational> out;
    out.reserve(raw.size());
    for (std::int64_t x : raw) out.push_back(Rational(x) * scale);
    return out;
}

bool TreePacking::feasible(const WeightedGraph& g) const {
    const auto loads = load(g);
    for (EdgeId id = 0; id < g.m(); ++id) {
        if (loads[static_cast<std::size_t>(id)] > Rational(g.edge(id).w)) return false;
    }
    return true;
}

TreePacking build_packing(const WeightedGraph& g, double eps) {
    if (!(eps > 0 && eps <= 0.5)) throw Error("packing eps must lie in (0, 1/2]");
    const Weight lambda = require_positive_lambda(g);
    const Rational target = (Rational(1) - decimal_rational(eps)) * Rational(lambda, 2);
    double used = eps;
    for (int attempt = 0; attempt < 5; ++attempt, used /= 2) {
        TreePacking packing = garg_koenemann(g, used);
        if (packing.total() >= target) return packing;
    }
    throw ConsistencyFault("packing stayed below (1 - eps) lambda / 2 after refinement");
}

std::size_t sample_index(const TreePacking& packing, CounterRng& rng) {
    const std::int64_t total = packing.total_amount();
    if (packing.entries.empty() || total <= 0) throw Error("cannot sample from an empty packing");
    auto draw = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
    for (std::size_t j = 0; j < packing.entries.size(); ++j) {
        draw -= packing.entries[j].amount;
        if (draw < 0) return j;
    }
    return packing.entries.size() - 1;
}

RootedTree sample_tree(const WeightedGraph& g, const TreePacking& packing, CounterRng& rng) {
    return RootedTree(g, packing.entries[sample_index(packing, rng)].edges);
}

std::int64_t crossings(const WeightedGraph& g, const std::vector<EdgeId>& edges, oracle::ShoreMask shore) {
    std::int64_t count = 0;
    for (EdgeId id : edges) {
        const Edge& e = g.edge(id);
        if (((shore >> e.u) ^ (shore >> e.v)) & 1U) ++count;
    }
    return count;
}

Rational expected_crossings(const WeightedGraph& g, const TreePacking& packing, oracle::ShoreMask shore) {
    std::int64_t weighted = 0;
    for (const auto& entry : packing.entries) weighted += entry.amount * crossings(g, entry.edges, shore);
    return Rational(weighted, packing.total_amount());
}

Rational crossing_tail(const WeightedGraph& g, const TreePacking& packing, oracle::ShoreMask shore, std::int64_t k) {
    std::int64_t mass = 0;
    for (const auto& entry : packing.entries) {
        if (crossings(g, entry.edges, shore) > k) mass += entry.amount;
    }
    return Rational(mass, packing.total_amount());
}

LogBase parse_log_base(std::string_view name) {
    if (name == "e" || name == "natural" || name == "ln") return LogBase::natural;
    if (name == "2" || name == "two" || name == "log2") return LogBase::two;
    throw Error("unknown log base: " + std::string(name));
}

CoverageParams coverage_params(Vertex n, double alpha, double eta, LogBase base) {
    if (!(alpha >= 1)) throw Error("alpha must be at least 1");
    if (!(eta > 0 && eta < 1)) throw Error("eta must lie in (0, 1)");
    if (n < 2) throw Error("coverage parameters need n >= 2");
    auto log = [&](double x) { return base == LogBase::natural ? std::log(x) : std::log2(x); };
    auto ceil = [](double x) { return static_cast<int>(std::ceil(x - 1e-9)); };
    CoverageParams params;
    params.alpha = alpha;
    params.eta = eta;
    params.base = base;
    params.k = ceil(4 * alpha * log(n));
    params.s = ceil(3 * (alpha * log(n) + log(1 / eta)));
    return params;
}

EnsembleCertificate run_ensemble(const WeightedGraph& g, double alpha, double eta, std::uint64_t seed,
                                 const EnsembleOptions& options) {
    EnsembleCertificate out;
    out.params = coverage_params(g.n(), alpha, eta, options.base);
    if (options.k_override) {
        if (*options.k_override < 1) throw Error("k must be at least 1");
        out.heuristic = *options.k_override != out.params.k;
        out.params.k = *options.k_override;
    }
    if (options.s_override) {
        if (*options.s_override < 0) throw Error("s must be nonnegative");
        out.params.s = *options.s_override;
    }
    out.seed = seed;
    out.lambda = require_positive_lambda(g);
    const TreePacking packing = build_packing(g, options.packing_eps);
    out.packing_total = packing.total();
    out.packing_entries = packing.entries.size();

    const auto s = static_cast<std::size_t>(out.params.s);
    out.sampled.resize(s);
    out.trees.resize(s);
    const CounterRng root(seed, 0x656e73656d626c65);
    ThetaOptions theta;
    theta.budget = options.budget;
    theta.workers = 1;
    theta.lambda = out.lambda;
    theta.graph_sha = graph_sha256(g);
    parallel_tasks(s, options.workers, [&](std::size_t i, unsigned) {
        CounterRng rng = root.split(i);
        out.sampled[i] = sample_index(packing, rng);
        const RootedTree t(g, packing.entries[out.sampled[i]].edges);
        out.trees[i] = theta_exact(g, t, build_pair_stats(g, t), out.params.k, theta);
    });
    return out;
}

CoverageReport check_coverage(const WeightedGraph& g, const EnsembleCertificate& ensemble,
                              const std::vector<oracle::ShoreMask>& shores) {
    std::vector<RootedTree> trees;
    for (const auto& cert : ensemble.trees) trees.push_back(tree_from_pairs(g, cert.tree));
    CoverageReport report;
    for (oracle::ShoreMask shore : shores) {
        CoverageReport::Cut cut;
        cut.shore = shore;
        cut.weight = oracle::cut_weight(g, shore);
        for (std::size_t i = 0; i < trees.size(); ++i) {
            const auto crossed = static_cast<std::int64_t>(oracle::crossed_endpoints(trees[i], shore).size());
            if (crossed > ensemble.params.k) continue;
            cut.tree = static_cast<int>(i);
            cut.crossings = crossed;
            const Certificate& cert = ensemble.trees[i];
            cut.certified = cut.weight > 0 && Rational(crossed, cut.weight) <= cert.theta &&
                            (ensemble.lambda <= 0 || cert.theta <= ensemble.bound());
            break;
        }
        if (cut.tree < 0) ++report.uncovered;
        else if (!cut.certified) ++report.uncertified;
        report.cuts.push_back(cut);
    }
    return report;
}

CoverageReport check_coverage(const WeightedGraph& g, const EnsembleCertificate& ensemble, double alpha) {
    return check_coverage(g, ensemble, oracle::near_min_cuts(g, alpha));
}

namespace {

nlohmann::json rational_json(const Rational& r) { return {{"num", r.numerator()}, {"den", r.denominator()}}; }

}  // namespace

nlohmann::json ensemble_to_json(const EnsembleCertificate& ensemble) {
    nlohmann::json j;
    j["params"] = {{"alpha", ensemble.params.alpha},
                   {"eta", ensemble.params.eta},
                   {"k", ensemble.params.k},
                   {"s", ensemble.params.s},
                   {"log_base", ensemble.params.base == LogBase::natural ? "e" : "2"}};
    j["seed"] = ensemble.seed;
    j["lambda"] = ensemble.lambda;
    j["k_over_lambda"] = rational_json(ensemble.bound());
    j["coverage_heuristic"] = ensemble.heuristic;
    j["packing"] = {{"entries", ensemble.packing_entries}, {"total", rational_json(ensemble.packing_total)}};
    nlohmann::json trees = nlohmann::json::array();
    for (std::size_t i = 0; i < ensemble.trees.size(); ++i) {
        nlohmann::json entry = certificate_to_json(ensemble.trees[i]);
        entry["packing_entry"] = ensemble.sampled[i];
        trees.push_back(std::move(entry));
    }
    j["trees"] = std::move(trees);
    return j;
}

nlohmann::json coverage_to_json(const CoverageReport& report) {
    nlohmann::json cuts = nlohmann::json::array();
    for (const auto& cut : report.cuts) {
        nlohmann::json shore = nlohmann::json::array();
        for (Vertex v = 0; v < 64; ++v) {
            if ((cut.shore >> v) & 1U) shore.push_back(v + 1);
        }
        cuts.push_back({{"shore", shore},
                        {"weight", cut.weight},
                        {"tree", cut.tree},
                        {"crossings", cut.crossings},
                        {"certified", cut.certified}});
    }
    return {{"cuts", cuts},
            {"total", report.cuts.size()},
            {"uncovered", report.uncovered},
            {"uncertified", report.uncertified},
            {"covered", report.covered()}};
}

nlohmann::json packing_to_json(const WeightedGraph& g, const TreePacking& packing) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t j = 0; j < packing.entries.size(); ++j) {
        nlohmann::json edges = nlohmann::json::array();
        for (EdgeId id : packing.entries[j].edges) edges.push_back({g.edge(id).u + 1, g.edge(id).v + 1});
        entries.push_back({{"edges", edges}, {"weight", rational_json(packing.weight(j))}});
    }
    return {{"entries", entries},
            {"total", rational_json(packing.total())},
            {"total_decimal", to_double(packing.total())},
            {"eps", packing.eps},
            {"iterations", packing.iterations},
            {"feasible", packing.feasible(g)}};
}

}  // namespace kthin
