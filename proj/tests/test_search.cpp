#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kthin/error.hpp"
#include "kthin/oracle.hpp"
#include "kthin/search.hpp"
#include "support.hpp"

using namespace kthin;

namespace {

// Rebuilds every tree of the trace from its moves and scores it with the
// edge-scan oracle, independent of the incremental tables.
std::vector<Rational> oracle_scores(const WeightedGraph& g, const SearchTrace& trace) {
    RootedTree t(g, trace.initial_tree);
    std::vector<Rational> out{oracle::theta(g, t, trace.k).theta};
    for (const auto& step : trace.accepts) {
        t = apply_swap(g, t, step.move).tree;
        out.push_back(oracle::theta(g, t, trace.k).theta);
    }
    return out;
}

bool has_failure(const ReplayReport& report, const std::string& needle) {
    for (const auto& f : report.failures) {
        if (f.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("c4: every spanning tree is a path with score 1") {
    const auto g = test::c4();
    SearchOptions options;
    options.k = 2;
    options.iterations = 25;
    const auto result = thin_search(g, options);
    CHECK(result.trace.initial_score == Rational(1));
    CHECK(result.certificate.theta == Rational(1));
    CHECK(result.trace.accepts.empty());
    CHECK(result.trace.evaluated > 0);
}

TEST_CASE("zero iterations returns the starting tree's certificate") {
    const auto inst = test::random_instance(7, 8, 10);
    SearchOptions options;
    options.iterations = 0;
    const auto result = thin_search(inst.g, options);
    const RootedTree start = unit_spanning_tree(inst.g);
    CHECK(result.tree == start);
    CHECK(result.certificate == theta_exact(inst.g, start, build_pair_stats(inst.g, start), options.k,
                                            ThetaOptions{.lambda = min_cut_lambda(inst.g),
                                                         .graph_sha = graph_sha256(inst.g)}));
    CHECK(result.trace.accepts.empty());
}

TEST_CASE("a tree graph has no swaps") {
    const auto g = parse_graph("p 4 3\ne 1 2 3\ne 2 3 1\ne 2 4 2\n");
    const auto result = thin_search(g, SearchOptions{.iterations = 10});
    CHECK(result.trace.accepts.empty());
    CHECK(result.trace.evaluated == 0);
}

TEST_CASE("disconnected input is rejected") {
    const auto g = parse_graph("p 4 2\ne 1 2 1\ne 3 4 1\n");
    CHECK_THROWS_AS(thin_search(g, SearchOptions{}), DisconnectedGraph);
}

TEST_CASE("exact descent: strictly decreasing, oracle-confirmed, replayable") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto inst = test::random_instance(seed, 6, 10);
        for (int k : {1, 2, 3}) {
            CAPTURE(test::describe(inst));
            CAPTURE(k);
            SearchOptions options;
            options.k = k;
            options.iterations = 60;
            options.seed = seed;
            const auto result = thin_search(inst.g, options);
            const auto& trace = result.trace;
            CHECK(trace.final_score <= trace.initial_score);
            Rational prev = trace.initial_score;
            for (const auto& step : trace.accepts) {
                CHECK(step.before == prev);
                CHECK(step.after < step.before);
                prev = step.after;
            }
            CHECK(prev == trace.final_score);
            const auto scores = oracle_scores(inst.g, trace);
            CHECK(scores.front() == trace.initial_score);
            for (std::size_t i = 0; i < trace.accepts.size(); ++i) CHECK(scores[i + 1] == trace.accepts[i].after);
            const auto final_oracle = oracle::theta(inst.g, result.tree, k);
            CHECK(result.certificate.theta == final_oracle.theta);
            CHECK(result.certificate.theta <= Rational(k, min_cut_lambda(inst.g)));
            CHECK(verify_certificate(inst.g, result.tree, result.certificate).ok);
            const auto report = replay_trace(inst.g, trace);
            CHECK_MESSAGE(report.ok, (report.failures.empty() ? "" : report.failures.front()));
        }
    }
}

TEST_CASE("search is deterministic in the seed and independent of worker count") {
    const auto inst = test::random_instance(31, 9, 11);
    SearchOptions options;
    options.iterations = 40;
    options.seed = 5;
    options.workers = 1;
    const auto a = thin_search(inst.g, options);
    options.workers = 4;
    const auto b = thin_search(inst.g, options);
    CHECK(a.tree == b.tree);
    CHECK(a.certificate == b.certificate);
    CHECK(trace_to_json(inst.g, a.trace) == trace_to_json(inst.g, b.trace));
}

TEST_CASE("replay detects tampering") {
    // First corpus instance whose run commits at least two swaps.
    SearchOptions options;
    options.iterations = 200;
    options.seed = 11;
    options.random_start = true;
    test::Instance inst = test::random_instance(1, 10, 12);
    SearchResult result;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        inst = test::random_instance(seed, 10, 12);
        result = thin_search(inst.g, options);
        if (result.trace.accepts.size() >= 2) break;
    }
    REQUIRE(result.trace.accepts.size() >= 2);

    SUBCASE("valid trace passes") { CHECK(replay_trace(inst.g, result.trace).ok); }
    SUBCASE("removing a swap is reported") {
        SearchTrace cut = result.trace;
        cut.accepts.erase(cut.accepts.begin());
        const auto report = replay_trace(inst.g, cut);
        CHECK_FALSE(report.ok);
        CHECK_FALSE(report.failures.empty());
    }
    SUBCASE("a wrong recorded score is reported") {
        SearchTrace bad = result.trace;
        bad.accepts.back().after += Rational(1, 1000);
        const auto report = replay_trace(inst.g, bad);
        CHECK_FALSE(report.ok);
        CHECK(has_failure(report, "recorded score after"));
    }
    SUBCASE("a wrong final score is reported") {
        SearchTrace bad = result.trace;
        bad.final_score = bad.initial_score;
        CHECK(has_failure(replay_trace(inst.g, bad), "final score mismatch"));
    }
    SUBCASE("the seed does not influence replay") {
        SearchTrace other = result.trace;
        other.seed = 999;
        CHECK(replay_trace(inst.g, other).ok);
    }
    SUBCASE("json round trip preserves the trace") {
        const SearchTrace back = trace_from_json(trace_to_json(inst.g, result.trace));
        CHECK(back.initial_tree == result.trace.initial_tree);
        REQUIRE(back.accepts.size() == result.trace.accepts.size());
        for (std::size_t i = 0; i < back.accepts.size(); ++i) {
            CHECK(back.accepts[i].move.f == result.trace.accepts[i].move.f);
            CHECK(back.accepts[i].move.e == result.trace.accepts[i].move.e);
            CHECK(back.accepts[i].after == result.trace.accepts[i].after);
        }
        CHECK(replay_trace(inst.g, back).ok);
    }
}

TEST_CASE("screened mode only commits exactly validated improvements") {
    std::size_t committed = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto inst = test::random_instance(seed + 100, 10, 12);
        CAPTURE(test::describe(inst));
        SearchOptions options;
        options.mode = SearchMode::screened;
        options.iterations = 40;
        options.seed = seed;
        options.random_start = true;
        // A loose envelope would reject everything; a small eps lets some
        // candidates through at p = 1.
        options.approx.eps = 0.01;
        const auto result = thin_search(inst.g, options);
        const auto& trace = result.trace;
        for (const auto& step : trace.accepts) CHECK(step.after < step.before);
        const auto scores = oracle_scores(inst.g, trace);
        for (std::size_t i = 0; i < trace.accepts.size(); ++i) CHECK(scores[i + 1] < scores[i]);
        CHECK(replay_trace(inst.g, trace).ok);
        CHECK(trace.final_score <= trace.initial_score);
        committed += trace.accepts.size();
    }
    CHECK(committed > 0);
}

TEST_CASE("malformed trace json") {
    CHECK_THROWS_AS(trace_from_json(nlohmann::json{{"k", 2}}), Error);
    CHECK_THROWS_AS(parse_search_mode("greedy"), Error);
}
