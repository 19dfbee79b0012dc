#include "kthin/search.hpp"

#include <algorithm>
#include <optional>

#include "kthin/error.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/parallel.hpp"
#include "kthin/rng.hpp"

namespace kthin {

SearchMode parse_search_mode(std::string_view name) {
    if (name == "exact") return SearchMode::exact;
    if (name == "screened") return SearchMode::screened;
    throw Error("unknown search mode: " + std::string(name));
}

std::string_view to_string(SearchMode mode) { return mode == SearchMode::exact ? "exact" : "screened"; }

namespace {

// Candidates of one cycle are scored in fixed-size batches so the trace does
// not depend on the worker count.
constexpr std::size_t kBatch = 8;

// A tree with its exactly maintained tables. Each worker owns one replica,
// kept in step with the committed tree.
struct Replica {
    RootedTree tree;
    PairStats stats;
    ThetaTracker tracker;

    const Rational& score() const { return tracker.certificate().theta; }

    void apply(const WeightedGraph& g, SwapMove move) {
        const SwapResult swap = apply_swap(g, tree, move);
        update_after_swap(stats, g, tree, swap.tree, swap);
        tracker.apply_swap(tree, swap.tree, stats, swap);
        tree = swap.tree;
    }

    // Score of T - e + f, leaving the replica unchanged.
    Rational probe(const WeightedGraph& g, SwapMove move) {
        const RootedTree previous = tree;
        apply(g, move);
        Rational out = score();
        apply(g, {move.e, move.f});
        if (!(tree == previous)) throw ConsistencyFault("swap revert did not restore the tree");
        return out;
    }
};

enum class Outcome { screened_out, not_improving, improving };

struct Probe {
    Outcome outcome = Outcome::not_improving;
    Rational score{0};
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(seed ^ splitmix64(a * 0x9e3779b97f4a7c15ULL + b));
}

}  // namespace

SearchResult thin_search(const WeightedGraph& g, const SearchOptions& options) {
    if (options.k < 1) throw InvalidSpec("k must be at least 1");
    ThetaOptions theta;
    theta.budget = options.budget;
    theta.workers = options.workers;
    theta.lambda = require_positive_lambda(g);
    theta.graph_sha = graph_sha256(g);

    const RootedTree start = options.random_start ? random_spanning_tree(g, options.seed) : unit_spanning_tree(g);
    PairStats stats = build_pair_stats(g, start);
    ThetaTracker tracker(g, start, stats, options.k, theta);
    const unsigned pool = std::min<unsigned>(resolve_workers(options.workers), static_cast<unsigned>(kBatch));
    std::vector<Replica> replicas(pool, Replica{start, std::move(stats), std::move(tracker)});
    Replica& main = replicas.front();

    SearchTrace trace;
    trace.k = options.k;
    trace.mode = options.mode;
    trace.seed = options.seed;
    trace.iterations = options.iterations;
    trace.initial_tree = start.edge_ids();
    trace.initial_score = main.score();

    CounterRng rng(options.seed, 0x736561726368);
    const bool screened = options.mode == SearchMode::screened;
    auto envelope_of = [&](const RootedTree& t, std::uint64_t salt, unsigned workers) {
        const ApproxStats approx =
            build_approx_stats(g, t, options.approx, mix(options.seed, salt, t.fingerprint()), workers);
        return theta_envelope(g, t, approx, options.k, options.budget, workers);
    };
    ThetaEnvelope current_env;
    if (screened) current_env = envelope_of(main.tree, 0, options.workers);

    std::vector<EdgeId> outside;
    std::vector<Probe> probes(kBatch);
    for (std::size_t iter = 0; iter < options.iterations; ++iter) {
        outside.clear();
        for (EdgeId id = 0; id < g.m(); ++id) {
            if (!main.tree.contains_edge(id)) outside.push_back(id);
        }
        if (outside.empty()) break;
        const EdgeId f = outside[rng.below(outside.size())];
        std::vector<EdgeId> partners = fundamental_cycle(g, main.tree, f).tree_edges;
        std::sort(partners.begin(), partners.end());

        const Rational before = main.score();
        std::optional<SwapMove> commit;
        for (std::size_t lo = 0; lo < partners.size() && !commit; lo += kBatch) {
            const std::size_t count = std::min(kBatch, partners.size() - lo);
            parallel_tasks(count, pool, [&](std::size_t i, unsigned worker) {
                const SwapMove move{f, partners[lo + i]};
                Probe& out = probes[i];
                if (screened) {
                    const RootedTree candidate = apply_swap(g, main.tree, move).tree;
                    if (screen_swap(current_env, envelope_of(candidate, iter + 1, 1)) == ScreenDecision::reject) {
                        out = {Outcome::screened_out, Rational(0)};
                        return;
                    }
                }
                out.score = replicas[worker].probe(g, move);
                out.outcome = out.score < before ? Outcome::improving : Outcome::not_improving;
            });
            for (std::size_t i = 0; i < count; ++i) {
                const Probe& p = probes[i];
                if (p.outcome == Outcome::screened_out) {
                    ++trace.screened_out;
                    continue;
                }
                ++trace.evaluated;
                if (p.outcome == Outcome::improving) {
                    commit = SwapMove{f, partners[lo + i]};
                    break;
                }
                if (screened) ++trace.screen_false_accepts;
            }
        }
        if (!commit) continue;

        parallel_tasks(replicas.size(), pool, [&](std::size_t r, unsigned) { replicas[r].apply(g, *commit); });
        trace.accepts.push_back({iter, *commit, before, main.score()});
        if (options.check_tables) {
            if (!(main.stats == build_pair_stats(g, main.tree))) {
                throw ConsistencyFault("incremental pair statistics diverged from a fresh build");
            }
            if (!(main.tracker.certificate() == theta_exact(g, main.tree, main.stats, options.k, theta))) {
                throw ConsistencyFault("incremental certificate diverged from a fresh computation");
            }
        }
        if (screened) current_env = envelope_of(main.tree, 0, options.workers);
    }

    SearchResult result;
    result.tree = main.tree;
    result.certificate = theta_exact(g, main.tree, build_pair_stats(g, main.tree), options.k, theta);
    trace.final_score = result.certificate.theta;
    if (trace.final_score != main.score()) throw ConsistencyFault("final certificate disagrees with maintained score");
    result.trace = std::move(trace);
    return result;
}

ReplayReport replay_trace(const WeightedGraph& g, const SearchTrace& trace, std::uint64_t budget) {
    ReplayReport report;
    auto fail = [&](std::string what) {
        report.ok = false;
        report.failures.push_back(std::move(what));
    };
    ThetaOptions theta;
    theta.budget = budget;
    theta.lambda = min_cut_lambda(g);
    theta.graph_sha = graph_sha256(g);
    auto score = [&](const RootedTree& t) { return theta_exact(g, t, build_pair_stats(g, t), trace.k, theta).theta; };

    RootedTree tree;
    try {
        tree = RootedTree(g, trace.initial_tree);
    } catch (const Error& e) {
        fail(std::string("initial tree invalid: ") + e.what());
        return report;
    }
    Rational current = score(tree);
    if (current != trace.initial_score) {
        fail("initial score mismatch: recorded " + to_string(trace.initial_score) + ", recomputed " + to_string(current));
    }
    for (std::size_t i = 0; i < trace.accepts.size(); ++i) {
        const TraceStep& step = trace.accepts[i];
        const std::string where = "accept " + std::to_string(i + 1) + ": ";
        if (step.before != current) {
            fail(where + "recorded score before " + to_string(step.before) + " but current score is " + to_string(current));
        }
        try {
            tree = apply_swap(g, tree, step.move).tree;
        } catch (const Error& e) {
            fail(where + "illegal swap: " + e.what());
            return report;
        }
        const Rational after = score(tree);
        if (after != step.after) {
            fail(where + "recorded score after " + to_string(step.after) + ", recomputed " + to_string(after));
        }
        if (!(after < current)) fail(where + "score did not strictly decrease");
        current = after;
    }
    if (current != trace.final_score) {
        fail("final score mismatch: recorded " + to_string(trace.final_score) + ", recomputed " + to_string(current));
    }
    return report;
}

namespace {

nlohmann::json rational_json(const Rational& r) { return {{"num", r.numerator()}, {"den", r.denominator()}}; }

Rational rational_from(const nlohmann::json& j) {
    return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

nlohmann::json edge_json(const WeightedGraph& g, EdgeId id) {
    return {{"id", id + 1}, {"ends", {g.edge(id).u + 1, g.edge(id).v + 1}}};
}

}  // namespace

nlohmann::json trace_to_json(const WeightedGraph& g, const SearchTrace& trace) {
    nlohmann::json initial = nlohmann::json::array();
    for (EdgeId id : trace.initial_tree) initial.push_back(id + 1);
    nlohmann::json accepts = nlohmann::json::array();
    for (const auto& step : trace.accepts) {
        accepts.push_back({{"iteration", step.iteration},
                           {"f", edge_json(g, step.move.f)},
                           {"e", edge_json(g, step.move.e)},
                           {"before", rational_json(step.before)},
                           {"after", rational_json(step.after)}});
    }
    return {{"k", trace.k},
            {"mode", to_string(trace.mode)},
            {"seed", trace.seed},
            {"iterations", trace.iterations},
            {"initial_tree", initial},
            {"initial_score", rational_json(trace.initial_score)},
            {"accepts", accepts},
            {"final_score", rational_json(trace.final_score)},
            {"seeding", trace.seeding},
            {"evaluated", trace.evaluated},
            {"screened_out", trace.screened_out},
            {"screen_false_accepts", trace.screen_false_accepts}};
}

SearchTrace trace_from_json(const nlohmann::json& j) {
    try {
        SearchTrace trace;
        trace.k = j.at("k").get<int>();
        trace.mode = parse_search_mode(j.at("mode").get<std::string>());
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.iterations = j.at("iterations").get<std::size_t>();
        for (const auto& id : j.at("initial_tree")) trace.initial_tree.push_back(id.get<EdgeId>() - 1);
        trace.initial_score = rational_from(j.at("initial_score"));
        for (const auto& step : j.at("accepts")) {
            trace.accepts.push_back({step.at("iteration").get<std::size_t>(),
                                     {step.at("f").at("id").get<EdgeId>() - 1, step.at("e").at("id").get<EdgeId>() - 1},
                                     rational_from(step.at("before")),
                                     rational_from(step.at("after"))});
        }
        trace.final_score = rational_from(j.at("final_score"));
        trace.seeding = j.value("seeding", std::string("full"));
        return trace;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed trace JSON: ") + e.what());
    }
}

}  // namespace kthin
