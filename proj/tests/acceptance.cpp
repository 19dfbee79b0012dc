// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kthin/approx.hpp"
#include "kthin/certificate.hpp"
#include "kthin/cut_eval.hpp"
#include "kthin/oracle.hpp"
#include "kthin/packing.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/planar.hpp"
#include "kthin/search.hpp"
#include "kthin/tuples.hpp"
#include "support.hpp"

using namespace kthin;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (pass) detail << "first failure: " << why << "; ";
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::vector<test::Instance>& corpus() {
    static const std::vector<test::Instance> instances = test::corpus(200, 1, 4, 12);
    return instances;
}

ThetaOptions theta_options(const WeightedGraph& g) {
    ThetaOptions options;
    options.lambda = min_cut_lambda(g);
    options.graph_sha = graph_sha256(g);
    return options;
}

// 1. Every tau / pi / sigma entry against the edge-scan oracle.
void tables(Outcome& out) {
    const auto start = Clock::now();
    std::size_t entries = 0;
    for (const auto& inst : corpus()) {
        const PairStats stats = build_pair_stats(inst.g, inst.t);
        for (Vertex u = 0; u < inst.g.n(); ++u) {
            ++entries;
            if (stats.tau[static_cast<std::size_t>(u)] != oracle::tau(inst.g, inst.t, u)) out.fail("tau " + test::describe(inst));
            for (Vertex v = 0; v < inst.g.n(); ++v) {
                entries += 2;
                if (stats.pi_at(u, v) != oracle::pi(inst.g, inst.t, u, v)) out.fail("pi " + test::describe(inst));
                if (stats.sigma_at(u, v) != oracle::sigma(inst.g, inst.t, u, v)) out.fail("sigma " + test::describe(inst));
            }
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 60) out.fail("took " + std::to_string(elapsed) + " s");
    out.detail << entries << " entries on " << corpus().size() << " instances in " << elapsed << " s";
}

// 2. O(t^2) cut evaluation against the oracle and the inclusion-exclusion sum, t <= 4.
void cut_evaluation(Outcome& out) {
    std::size_t specs = 0;
    for (const auto& inst : corpus()) {
        const PairStats stats = build_pair_stats(inst.g, inst.t);
        enumerate_tuples(inst.t, 4, 1, [&](std::span<const Vertex> endpoints, unsigned) {
            ++specs;
            const CutSpec spec(inst.t, std::vector<Vertex>(endpoints.begin(), endpoints.end()));
            const Weight expect = oracle::cut_weight(inst.g, oracle::mask_of(spec.shore(inst.t)));
            if (evaluate_cut(inst.t, stats.view(), spec) != expect) out.fail("fast route " + test::describe(inst));
            if (evaluate_cut_inclusion_exclusion(inst.t, stats.view(), spec) != expect) {
                out.fail("inclusion-exclusion " + test::describe(inst));
            }
        });
    }
    out.detail << specs << " cut specs, exact match";
}

// 3. theta_exact against the oracle for k = 1, 2, 3, and the k / lambda bound.
void theta_exactness(Outcome& out) {
    std::size_t runs = 0;
    for (const auto& inst : corpus()) {
        const PairStats stats = build_pair_stats(inst.g, inst.t);
        for (int k = 1; k <= 3; ++k) {
            ++runs;
            const Certificate cert = theta_exact(inst.g, inst.t, stats, k, theta_options(inst.g));
            const auto expect = oracle::theta(inst.g, inst.t, k);
            if (cert.theta != expect.theta) out.fail("theta k=" + std::to_string(k) + " " + test::describe(inst));
            if (Rational(cert.crossings, cert.cut_weight) != expect.theta) out.fail("witness ratio " + test::describe(inst));
            if (cert.theta > cert.bound()) out.fail("k/lambda " + test::describe(inst));
        }
    }
    out.detail << runs << " certificates equal the oracle; all within k/lambda";
}

// 4. 50-swap walks: incremental tables and tracker equal fresh rebuilds.
void swap_maintenance(Outcome& out) {
    constexpr std::size_t kTouchConstant = 4;
    std::size_t steps = 0, max_touched = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        test::Instance inst = test::random_instance(seed + 5000, 10, 10);
        while (inst.g.m() == inst.g.n() - 1) inst = test::random_instance(inst.seed + 1000, 10, 10);
        CounterRng rng(seed, 0x77616c6b);
        RootedTree t = inst.t;
        PairStats stats = build_pair_stats(inst.g, t);
        ThetaTracker tracker(inst.g, t, stats, 2, theta_options(inst.g));
        for (int step = 0; step < 50; ++step) {
            ++steps;
            const SwapResult swap = apply_swap(inst.g, t, test::random_move(inst.g, t, rng));
            const UpdateReport report = update_after_swap(stats, inst.g, t, swap.tree, swap);
            tracker.apply_swap(t, swap.tree, stats, swap);
            t = swap.tree;
            if (!(stats == build_pair_stats(inst.g, t))) out.fail("tables diverged " + test::describe(inst));
            if (!(tracker.certificate() == theta_exact(inst.g, t, stats, 2, theta_options(inst.g)))) {
                out.fail("certificate diverged " + test::describe(inst));
            }
            const std::size_t limit = kTouchConstant * swap.cycle_size * static_cast<std::size_t>(inst.g.n());
            if (report.touched > limit) out.fail("touched " + std::to_string(report.touched) + " > " + std::to_string(limit));
            max_touched = std::max(max_touched, report.touched);
        }
    }
    out.detail << steps << " swaps bit-identical; touched <= 4 |C| n (max " << max_touched << ")";
}

// Fractional packing optimum min over partitions of w(cross) / (parts - 1).
Rational packing_optimum(const WeightedGraph& g) {
    std::vector<int> block(static_cast<std::size_t>(g.n()), 0);
    Rational best(-1);
    std::function<void(Vertex, int)> assign = [&](Vertex v, int used) {
        if (v == g.n()) {
            if (used < 2) return;
            Weight cross = 0;
            for (const Edge& e : g.edges()) {
                if (block[static_cast<std::size_t>(e.u)] != block[static_cast<std::size_t>(e.v)]) cross += e.w;
            }
            const Rational value(cross, used - 1);
            if (best < Rational(0) || value < best) best = value;
            return;
        }
        for (int b = 0; b <= used; ++b) {
            block[static_cast<std::size_t>(v)] = b;
            assign(v + 1, std::max(used, b + 1));
        }
    };
    assign(0, 0);
    return best;
}

// 5. Packing feasibility and P >= (1 - eps) lambda / 2; C4 optimum 4/3.
void packing_contract(Outcome& out) {
    for (const auto& inst : corpus()) {
        const TreePacking packing = build_packing(inst.g, 0.1);
        if (!packing.feasible(inst.g)) out.fail("infeasible " + test::describe(inst));
        if (packing.total() < Rational(9, 10) * Rational(min_cut_lambda(inst.g), 2)) out.fail("short " + test::describe(inst));
    }
    const WeightedGraph c4 = test::c4();
    const TreePacking packing = build_packing(c4, 0.1);
    const Rational optimum = packing_optimum(c4);
    if (optimum != Rational(4, 3)) out.fail("c4 optimum " + to_string(optimum));
    if (packing.total() < Rational(9, 10) || packing.total() > optimum) out.fail("c4 packing " + to_string(packing.total()));
    out.detail << corpus().size() << " packings feasible and >= 0.9 lambda/2; C4 P = " << to_string(packing.total())
               << " (optimum " << to_string(optimum) << ")";
}

// 6. E[crossings] <= w(delta(A)) / P for every cut, n <= 10.
void expected_crossing_bound(Outcome& out) {
    std::size_t cuts = 0;
    for (const auto& inst : corpus()) {
        if (inst.g.n() > 10) continue;
        const TreePacking packing = build_packing(inst.g, 0.1);
        for (oracle::ShoreMask mask : oracle::all_cuts(inst.g.n())) {
            ++cuts;
            const Rational bound = Rational(oracle::cut_weight(inst.g, mask)) / packing.total();
            if (expected_crossings(inst.g, packing, mask) > bound) out.fail("cut bound " + test::describe(inst));
        }
    }
    out.detail << cuts << " cuts, exact rational comparison";
}

// 7 and 8. Ensemble coverage at n = 10 and per-cut certificates.
struct EnsembleRuns {
    std::size_t runs = 0;
    std::size_t uncovered_runs = 0;
    std::size_t certified_cuts = 0;
    std::vector<std::string> certificate_failures;
    double elapsed = 0;
    int k = 0, s = 0;
};

const EnsembleRuns& ensemble_runs() {
    static const EnsembleRuns result = [] {
        EnsembleRuns r;
        const auto start = Clock::now();
        for (std::uint64_t run = 0; run < 100; ++run) {
            const test::Instance inst = test::random_instance(9000 + run / 10, 10, 10);
            const EnsembleCertificate ensemble = run_ensemble(inst.g, 1.0, 0.1, 77 + run);
            r.k = ensemble.params.k;
            r.s = ensemble.params.s;
            ++r.runs;
            const CoverageReport report = check_coverage(inst.g, ensemble, 1.0);
            if (!report.covered()) {
                ++r.uncovered_runs;
                continue;
            }
            // Independent check: some tree crosses the cut at most k times
            // with crossings / weight <= Theta_k(T_i) <= k / lambda.
            std::vector<RootedTree> trees;
            for (const auto& cert : ensemble.trees) trees.push_back(tree_from_pairs(inst.g, cert.tree));
            for (oracle::ShoreMask mask : oracle::near_min_cuts(inst.g, 1.0)) {
                const Weight w = oracle::cut_weight(inst.g, mask);
                bool found = false;
                for (std::size_t i = 0; i < trees.size() && !found; ++i) {
                    const auto crossed = static_cast<std::int64_t>(oracle::crossed_endpoints(trees[i], mask).size());
                    const Certificate& cert = ensemble.trees[i];
                    found = crossed <= ensemble.params.k && Rational(crossed, w) <= cert.theta &&
                            cert.theta <= Rational(ensemble.params.k, ensemble.lambda);
                }
                if (found) {
                    ++r.certified_cuts;
                } else {
                    r.certificate_failures.push_back(test::describe(inst) + " run " + std::to_string(run));
                }
            }
            if (report.uncertified != 0) r.certificate_failures.push_back("coverage report uncertified, run " + std::to_string(run));
        }
        r.elapsed = seconds_since(start);
        return r;
    }();
    return result;
}

void coverage(Outcome& out) {
    const EnsembleRuns& r = ensemble_runs();
    const double fraction = static_cast<double>(r.uncovered_runs) / static_cast<double>(r.runs);
    if (fraction > 0.15) out.fail("uncovered fraction " + std::to_string(fraction));
    if (r.elapsed >= 600) out.fail("took " + std::to_string(r.elapsed) + " s");
    out.detail << r.uncovered_runs << "/" << r.runs << " runs with an uncovered near-min cut (k=" << r.k << ", s=" << r.s
               << ") in " << r.elapsed << " s";
}

void ensemble_certificates(Outcome& out) {
    const EnsembleRuns& r = ensemble_runs();
    for (const auto& f : r.certificate_failures) out.fail(f);
    out.detail << r.certified_cuts << " near-min cuts certified across " << (r.runs - r.uncovered_runs) << " covered runs";
}

// 9. C_k values and envelope containment.
void envelope(Outcome& out) {
    if (c_k(2) != 4 || c_k(3) != 13) out.fail("c_k values");

    // Conditional: sampled tables (p < 1), restricted to trials where every
    // pairwise estimate is within (1 +- eps).
    ApproxParams sampled;
    sampled.eps = 0.3;
    sampled.c = 0.4;
    std::size_t conditioned = 0, sampled_trials = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const WeightedGraph g = random_connected(8, 28, 3, 12 + seed / 20);
        const RootedTree t = random_spanning_tree(g, seed);
        const PairStats exact = build_pair_stats(g, t);
        const ApproxStats approx = build_approx_stats(g, t, sampled, seed);
        ++sampled_trials;
        if (approx.p >= Rational(1)) out.fail("conditional trials need p < 1");
        if (!sigma_within(exact, approx, eps_rational(sampled.eps))) continue;
        ++conditioned;
        for (int k = 1; k <= 2; ++k) {
            const ThetaEnvelope env = theta_envelope(g, t, approx, k);
            const Rational theta = theta_exact(g, t, exact, k).theta;
            if (theta < env.lower || theta > env.upper) out.fail("conditional containment k=" + std::to_string(k));
        }
    }
    if (conditioned == 0) out.fail("no trial met the pairwise event");

    // Unconditional at eps = delta = 0.1 with the default constant.
    std::size_t contained = 0;
    Rational p_seen(0);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const test::Instance inst = test::random_instance(7000 + trial, 10, 10);
        const ApproxStats approx = build_approx_stats(inst.g, inst.t, ApproxParams{}, trial);
        p_seen = std::max(p_seen, approx.p);
        const ThetaEnvelope env = theta_envelope(inst.g, inst.t, approx, 2);
        const Rational theta = oracle::theta(inst.g, inst.t, 2).theta;
        if (env.lower <= theta && theta <= env.upper) ++contained;
    }
    if (contained < 90) out.fail("unconditional containment " + std::to_string(contained) + "/100");
    out.detail << "C_2=4, C_3=13; conditional " << conditioned << "/" << sampled_trials
               << " sampled trials all contained; unconditional " << contained << "/100 (max p " << to_string(p_seen) << ")";
}

// 10. Search: strict descent, exact replay, screened commits validated.
void search(Outcome& out) {
    std::size_t accepts = 0, screened_accepts = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const test::Instance inst = test::random_instance(3000 + seed, 12, 12);
        for (SearchMode mode : {SearchMode::exact, SearchMode::screened}) {
            SearchOptions options;
            options.k = 2;
            options.iterations = 60;
            options.mode = mode;
            options.seed = seed;
            options.random_start = true;
            if (mode == SearchMode::screened) options.approx.eps = 0.01;
            const SearchResult result = thin_search(inst.g, options);
            const SearchTrace& trace = result.trace;
            Rational previous = trace.initial_score;
            RootedTree t(inst.g, trace.initial_tree);
            for (const auto& step : trace.accepts) {
                if (!(step.after < step.before) || step.before != previous) out.fail("descent " + test::describe(inst));
                t = apply_swap(inst.g, t, step.move).tree;
                if (oracle::theta(inst.g, t, 2).theta != step.after) out.fail("recorded score " + test::describe(inst));
                previous = step.after;
            }
            if (!replay_trace(inst.g, trace).ok) out.fail("replay " + test::describe(inst));
            if (result.certificate.theta != oracle::theta(inst.g, result.tree, 2).theta) out.fail("final certificate");
            (mode == SearchMode::exact ? accepts : screened_accepts) += trace.accepts.size();
        }
    }
    out.detail << accepts << " exact and " << screened_accepts << " screened commits, all strictly improving and replayed";
}

// 11. Planar: g* = lambda and Theta_k(T) <= k / g*.
void planar(Outcome& out) {
    struct Item {
        std::string name;
        WeightedGraph g;
        RotationSystem rot;
    };
    const WeightedGraph c4 = test::c4();
    const WeightedGraph k4 = test::k4();
    std::vector<Item> items;
    items.push_back({"C4", c4, parse_rotation(c4, "r 1 1 4\nr 2 1 2\nr 3 2 3\nr 4 3 4\n")});
    items.push_back({"K4", k4, parse_rotation(k4, "r 1 1 2 3\nr 2 4 1 5\nr 3 6 2 4\nr 4 5 3 6\n")});
    items.push_back({"grid3x3", grid_graph(3, 3), grid_rotation(3, 3)});
    items.push_back({"grid4x4", grid_graph(4, 4), grid_rotation(4, 4)});
    std::size_t checks = 0;
    for (const auto& item : items) {
        const DualGraph dual = build_dual(item.g, item.rot);
        const Weight girth = dual_girth(dual, false);
        if (girth != oracle::lambda(item.g)) out.fail(item.name + " girth");
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const RootedTree t = random_spanning_tree(item.g, seed);
            for (int k = 1; k <= 3; ++k) {
                ++checks;
                if (oracle::theta(item.g, t, k).theta > Rational(k, girth)) out.fail(item.name + " bound");
                const PlanarReport report = planar_certified_bound(item.g, item.rot, t, k, build_pair_stats(item.g, t));
                if (!report.holds) out.fail(item.name + " report");
            }
        }
        out.detail << item.name << " g*=" << girth << " ";
    }
    out.detail << "; " << checks << " tree bounds hold";
}

// 12. sigma-table build time and scaling.
void performance(Outcome& out) {
    std::vector<double> times;
    for (Vertex n : {500, 1000, 2000}) {
        const WeightedGraph g = random_connected(n, 5 * n, 10, 7);
        const RootedTree t = random_spanning_tree(g, 3);
        double best = 1e300;
        for (int repeat = 0; repeat < 5; ++repeat) {
            const auto start = Clock::now();
            const PairStats stats = build_pair_stats(g, t);
            best = std::min(best, seconds_since(start));
            if (stats.n != n) out.fail("size");
        }
        times.push_back(best);
    }
    if (times[2] >= 30) out.fail("n=2000 took " + std::to_string(times[2]) + " s");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double ratio = times[i] / times[i - 1];
        if (ratio < 3 || ratio > 6) out.fail("ratio " + std::to_string(ratio));
    }
    out.detail << "n=500/1000/2000 (m=5n): " << times[0] << " / " << times[1] << " / " << times[2] << " s, ratios "
               << times[1] / times[0] << ", " << times[2] / times[1];
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"tables match oracle", tables},
        {"cut evaluation", cut_evaluation},
        {"theta exactness", theta_exactness},
        {"swap maintenance", swap_maintenance},
        {"packing contract", packing_contract},
        {"expected crossings", expected_crossing_bound},
        {"ensemble coverage", coverage},
        {"ensemble certificates", ensemble_certificates},
        {"approximation envelope", envelope},
        {"thin search", search},
        {"planar bounds", planar},
        {"sigma build performance", performance},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            criteria[i].second(outcome);
        } catch (const std::exception& e) {
            outcome.fail(std::string("exception: ") + e.what());
        }
        failures += outcome.pass ? 0 : 1;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": "
                  << outcome.detail.str() << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
