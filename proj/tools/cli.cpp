#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kthin/approx.hpp"
#include "kthin/certificate.hpp"
#include "kthin/cut_eval.hpp"
#include "kthin/error.hpp"
#include "kthin/graph.hpp"
#include "kthin/oracle.hpp"
#include "kthin/packing.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/planar.hpp"
#include "kthin/search.hpp"
#include "kthin/tree.hpp"

#ifndef KTHIN_VERSION
#define KTHIN_VERSION "0.0.0"
#endif

namespace kthin::cli {

namespace {

using nlohmann::json;

json rational_json(const Rational& r) { return {{"num", r.numerator()}, {"den", r.denominator()}}; }

// Options shared by the commands that read a graph.
struct GraphInput {
    std::string path;
    int decimal_scale = 0;

    void add(CLI::App* app) {
        app->add_option("graph", path, "graph file")->required();
        app->add_option("--decimal-scale", decimal_scale, "weights carry this many fractional digits")
            ->check(CLI::Range(0, 9));
    }
    WeightedGraph load() const { return read_graph_file(path, decimal_scale); }
    void echo(json& config) const {
        config["graph"] = path;
        config["decimal_scale"] = decimal_scale;
    }
};

struct TreeInput {
    std::string path;
    std::string policy = "mst";

    void add(CLI::App* app) {
        app->add_option("--tree", path, "tree file (default: --policy)");
        app->add_option("--policy", policy, "mst | unit | random")->check(CLI::IsMember({"mst", "unit", "random"}));
    }
    RootedTree load(const WeightedGraph& g, std::uint64_t seed) const {
        if (!path.empty()) return read_tree_file(g, path);
        if (policy == "unit") return unit_spanning_tree(g);
        return build_tree(g, parse_tree_policy(policy), seed);
    }
    void echo(json& config) const {
        if (!path.empty()) {
            config["tree"] = path;
        } else {
            config["policy"] = policy;
        }
    }
};

struct Common {
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string json_out;

    void add(CLI::App* app) {
        app->add_option("--seed", seed, "random seed");
        app->add_option("--workers", workers, "worker threads (0 = available parallelism)");
        app->add_option("--json-out", json_out, "write the JSON result here instead of stdout");
    }
};

json envelope(std::string_view command, const json& config, std::uint64_t seed, const WeightedGraph& g,
              json result) {
    return {{"tool", "kthin"},
            {"version", KTHIN_VERSION},
            {"command", command},
            {"config", config},
            {"seed", seed},
            {"graph_sha", graph_sha256(g)},
            {"result", std::move(result)}};
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write " + path);
    file << text;
}

void emit(const json& j, const std::string& path, std::ostream& out) { write_text(path, j.dump(2) + "\n", out); }

json tree_json(const RootedTree& t) {
    json pairs = json::array();
    for (const auto& [child, parent] : t.child_parent_pairs()) pairs.push_back({child + 1, parent + 1});
    return pairs;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(0, path + ": " + e.what());
    }
}

// ---------------------------------------------------------------- certify

struct CertifyCmd {
    GraphInput graph;
    TreeInput tree;
    Common common;
    int k = 2;
    std::uint64_t budget = 50'000'000;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("certify", "exact Theta_k certificate for one spanning tree");
        graph.add(sub);
        tree.add(sub);
        common.add(sub);
        sub->add_option("--k", k, "cut respect order")->check(CLI::PositiveNumber);
        sub->add_option("--budget", budget, "maximum endpoint sets to enumerate");
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        const RootedTree t = tree.load(g, common.seed);
        ThetaOptions options;
        options.budget = budget;
        options.workers = common.workers;
        const Certificate cert = theta_exact(g, t, build_pair_stats(g, t), k, options);
        json config{{"k", k}, {"budget", budget}, {"workers", common.workers}};
        graph.echo(config);
        tree.echo(config);
        emit(envelope("certify", config, common.seed, g, certificate_to_json(cert)), common.json_out, out);
        return Exit::ok;
    }
};

// --------------------------------------------------------------- ensemble

struct EnsembleCmd {
    GraphInput graph;
    Common common;
    double alpha = 1;
    double eta = 0.1;
    std::optional<int> k;
    std::optional<int> s;
    double packing_eps = 0.1;
    std::string log_base = "e";
    std::string regime = "general";
    double gamma = 0;
    std::uint64_t budget = 50'000'000;
    std::string coverage = "auto";

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("ensemble", "packing-sampled tree ensemble with per-tree certificates");
        graph.add(sub);
        common.add(sub);
        sub->add_option("--alpha", alpha, "near-min cut factor (>= 1)")->check(CLI::Range(1.0, 1e9));
        sub->add_option("--eta", eta, "failure probability in (0, 1)")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--k", k, "override k")->check(CLI::PositiveNumber);
        sub->add_option("--s", s, "override the number of trees")->check(CLI::NonNegativeNumber);
        sub->add_option("--packing-eps", packing_eps, "packing accuracy in (0, 0.5]");
        sub->add_option("--log-base", log_base, "e | 2")->check(CLI::IsMember({"e", "2"}));
        sub->add_option("--regime", regime, "general | planar | genus | tradeoff")
            ->check(CLI::IsMember({"general", "planar", "genus", "tradeoff"}));
        sub->add_option("--gamma", gamma, "genus for --regime genus")->check(CLI::NonNegativeNumber);
        sub->add_option("--budget", budget, "maximum endpoint sets per tree");
        sub->add_option("--check-coverage", coverage, "auto | yes | no (exhaustive; n <= 20)")
            ->check(CLI::IsMember({"auto", "yes", "no"}));
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        const SurfaceRegime surface = parse_surface_regime(regime);
        const LogBase base = parse_log_base(log_base);
        EnsembleOptions options;
        options.packing_eps = packing_eps;
        options.base = base;
        options.budget = budget;
        options.workers = common.workers;
        if (surface != SurfaceRegime::general) {
            const CoverageParams params = surface_params(g.n(), alpha, eta, gamma, surface, base);
            options.k_override = params.k;
            options.s_override = params.s;
        }
        if (k) options.k_override = *k;
        if (s) options.s_override = *s;
        const EnsembleCertificate ensemble = run_ensemble(g, alpha, eta, common.seed, options);
        json result = ensemble_to_json(ensemble);
        // Surface regimes fix k themselves; only an explicit --k is a heuristic override.
        result["heuristic"] = k.has_value() && *k != coverage_params(g.n(), alpha, eta, base).k;
        result["regime"] = regime;
        if (surface == SurfaceRegime::tradeoff) {
            result["tradeoff_constants"] = {{"c", kTradeoffC}, {"c_prime", kTradeoffCPrime}};
        }
        const bool check = coverage == "yes" || (coverage == "auto" && g.n() <= oracle::kMaxVertices);
        if (check) result["coverage"] = coverage_to_json(check_coverage(g, ensemble, alpha));

        json config{{"alpha", alpha},       {"eta", eta},       {"packing_eps", packing_eps},
                    {"log_base", log_base}, {"regime", regime}, {"gamma", gamma},
                    {"budget", budget},     {"workers", common.workers}, {"check_coverage", coverage}};
        if (k) config["k"] = *k;
        if (s) config["s"] = *s;
        graph.echo(config);
        emit(envelope("ensemble", config, common.seed, g, result), common.json_out, out);
        return Exit::ok;
    }
};

// ----------------------------------------------------------------- search

struct SearchCmd {
    GraphInput graph;
    Common common;
    int k = 2;
    std::size_t iterations = 100;
    std::string mode = "exact";
    double eps = 0.1;
    double delta = 0.1;
    double c = 3;
    int rounds = 5;
    std::uint64_t enum_budget = 50'000'000;
    bool random_start = false;
    std::string trace_out;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("search", "local search over single-edge swaps");
        graph.add(sub);
        common.add(sub);
        sub->add_option("--k", k, "cut respect order")->check(CLI::PositiveNumber);
        sub->add_option("--budget", iterations, "iterations B");
        sub->add_option("--mode", mode, "exact | screened")->check(CLI::IsMember({"exact", "screened"}));
        sub->add_option("--eps", eps, "screening accuracy")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--delta", delta, "screening failure probability")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--c", c, "sampling constant")->check(CLI::PositiveNumber);
        sub->add_option("--rounds", rounds, "sampling rounds (median)")->check(CLI::PositiveNumber);
        sub->add_option("--enum-budget", enum_budget, "maximum endpoint sets per evaluation");
        sub->add_flag("--random-start", random_start, "start from a random spanning tree");
        sub->add_option("--trace-out", trace_out, "write the accepted-swap trace here");
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        SearchOptions options;
        options.k = k;
        options.iterations = iterations;
        options.mode = parse_search_mode(mode);
        options.approx = {eps, delta, c, rounds};
        options.seed = common.seed;
        options.budget = enum_budget;
        options.workers = common.workers;
        options.random_start = random_start;
        const SearchResult found = thin_search(g, options);

        json config{{"k", k},         {"budget", iterations}, {"mode", mode},           {"eps", eps},
                    {"delta", delta}, {"c", c},               {"rounds", rounds},       {"enum_budget", enum_budget},
                    {"random_start", random_start},           {"workers", common.workers}};
        graph.echo(config);
        const json trace = trace_to_json(g, found.trace);
        json result{{"certificate", certificate_to_json(found.certificate)},
                    {"initial_score", rational_json(found.trace.initial_score)},
                    {"final_score", rational_json(found.trace.final_score)},
                    {"accepts", found.trace.accepts.size()},
                    {"evaluated", found.trace.evaluated},
                    {"screened_out", found.trace.screened_out},
                    {"screen_false_accepts", found.trace.screen_false_accepts},
                    {"seeding", found.trace.seeding}};
        if (!trace_out.empty()) emit(envelope("search-trace", config, common.seed, g, trace), trace_out, out);
        emit(envelope("search", config, common.seed, g, result), common.json_out, out);
        return Exit::ok;
    }
};

// ---------------------------------------------------------------- packing

struct PackingCmd {
    GraphInput graph;
    Common common;
    double eps = 0.1;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("packing", "fractional spanning tree packing");
        graph.add(sub);
        common.add(sub);
        sub->add_option("--eps", eps, "accuracy in (0, 0.5]");
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        const TreePacking packing = build_packing(g, eps);
        json config{{"eps", eps}};
        graph.echo(config);
        emit(envelope("packing", config, common.seed, g, packing_to_json(g, packing)), common.json_out, out);
        return packing.feasible(g) ? Exit::ok : Exit::verification_failure;
    }
};

// ------------------------------------------------------------- dual-girth

struct DualGirthCmd {
    GraphInput graph;
    TreeInput tree;
    Common common;
    std::string rotation;
    std::optional<int> k;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("dual-girth", "dual girth of an embedded planar graph");
        graph.add(sub);
        tree.add(sub);
        common.add(sub);
        sub->add_option("--rotation", rotation, "rotation system file")->required();
        sub->add_option("--k", k, "also certify Theta_k(T) <= k / g* for the given tree")->check(CLI::PositiveNumber);
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        const RotationSystem rot = read_rotation_file(g, rotation);
        const DualGraph dual = build_dual(g, rot);
        json result{{"faces", dual.faces},
                    {"dual_edges", dual.edges.size()},
                    {"girth", dual_girth(dual, false, common.workers)},
                    {"weighted_girth", dual_girth(dual, true, common.workers)}};
        json config{{"rotation", rotation}, {"workers", common.workers}};
        graph.echo(config);
        int code = Exit::ok;
        if (k) {
            config["k"] = *k;
            tree.echo(config);
            const RootedTree t = tree.load(g, common.seed);
            ThetaOptions options;
            options.workers = common.workers;
            const PlanarReport report = planar_certified_bound(g, rot, t, *k, build_pair_stats(g, t), options);
            result["lambda"] = report.lambda;
            result["certificate"] = certificate_to_json(report.certificate);
            result["bound"] = rational_json(report.bound);
            result["weighted_bound"] = rational_json(report.weighted_bound);
            result["bound_applies"] = report.positive_weights;
            result["holds"] = report.holds;
            if (!report.holds) code = Exit::verification_failure;
        }
        emit(envelope("dual-girth", config, common.seed, g, result), common.json_out, out);
        return code;
    }
};

// ------------------------------------------------------------------ sigma

struct SigmaCmd {
    GraphInput graph;
    TreeInput tree;
    Common common;
    std::string dump;
    bool tables = false;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("sigma", "build the tau / pi / sigma tables");
        graph.add(sub);
        tree.add(sub);
        common.add(sub);
        sub->add_option("--out", dump, "binary dump of the tables");
        sub->add_flag("--tables", tables, "include the full tables in the JSON");
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        const RootedTree t = tree.load(g, common.seed);
        const PairStats stats = build_pair_stats(g, t);
        std::ostringstream bytes;
        write_pair_stats(bytes, stats);
        if (!dump.empty()) write_text(dump, bytes.str(), out);

        json result{{"n", stats.n}, {"dump_sha", sha256_hex(bytes.str())}, {"tree", tree_json(t)}};
        if (tables) {
            json pi = json::array(), sigma = json::array();
            for (Vertex u = 0; u < stats.n; ++u) {
                json pi_row = json::array(), sigma_row = json::array();
                for (Vertex v = 0; v < stats.n; ++v) {
                    pi_row.push_back(stats.pi_at(u, v));
                    sigma_row.push_back(stats.sigma_at(u, v));
                }
                pi.push_back(std::move(pi_row));
                sigma.push_back(std::move(sigma_row));
            }
            result["tau"] = stats.tau;
            result["pi"] = std::move(pi);
            result["sigma"] = std::move(sigma);
        }
        json config{{"tables", tables}};
        if (!dump.empty()) config["out"] = dump;
        graph.echo(config);
        tree.echo(config);
        emit(envelope("sigma", config, common.seed, g, result), common.json_out, out);
        return Exit::ok;
    }
};

// ----------------------------------------------------------------- verify

struct VerifyCmd {
    GraphInput graph;
    TreeInput tree;
    Common common;
    int k = 2;
    std::string mode = "all";
    std::string certificate;
    std::string trace;
    bool allow_large = false;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("verify", "check the fast routes against exhaustive oracles");
        graph.add(sub);
        tree.add(sub);
        common.add(sub);
        sub->add_option("--k", k, "cut respect order")->check(CLI::PositiveNumber);
        sub->add_option("--mode", mode, "all | tau | pi | sigma | cut-eval | theta")
            ->check(CLI::IsMember({"all", "tau", "pi", "sigma", "cut-eval", "theta"}));
        sub->add_option("--certificate", certificate, "also verify this certificate JSON");
        sub->add_option("--trace", trace, "also replay this search trace JSON");
        sub->add_flag("--allow-large", allow_large, "lift the oracle size guard");
        return sub;
    }

    int run(std::ostream& out) const {
        const WeightedGraph g = graph.load();
        const RootedTree t = tree.load(g, common.seed);
        oracle::check_guard(g.n(), allow_large);
        const PairStats stats = build_pair_stats(g, t);
        json checks = json::object();
        json details = json::object();
        bool ok = true;
        auto record = [&](const std::string& name, bool pass, const std::string& detail = {}) {
            checks[name] = pass ? "PASS" : "FAIL";
            if (!detail.empty()) details[name] = detail;
            ok = ok && pass;
        };
        auto wants = [&](std::string_view name) { return mode == "all" || mode == name; };

        if (wants("tau")) {
            bool pass = true;
            for (Vertex u = 0; u < g.n(); ++u) pass = pass && stats.tau[static_cast<std::size_t>(u)] == oracle::tau(g, t, u);
            record("tau", pass);
        }
        if (wants("pi") || wants("sigma")) {
            bool pi_pass = true, sigma_pass = true;
            for (Vertex u = 0; u < g.n(); ++u) {
                for (Vertex v = 0; v < g.n(); ++v) {
                    pi_pass = pi_pass && stats.pi_at(u, v) == oracle::pi(g, t, u, v);
                    sigma_pass = sigma_pass && stats.sigma_at(u, v) == oracle::sigma(g, t, u, v);
                }
            }
            if (wants("pi")) record("pi", pi_pass);
            if (wants("sigma")) record("sigma", sigma_pass);
        }
        if (wants("cut-eval")) {
            bool pass = true;
            for (oracle::ShoreMask mask : oracle::all_cuts(g.n(), allow_large)) {
                const CutSpec spec(t, oracle::crossed_endpoints(t, mask));
                const Weight expect = oracle::cut_weight(g, mask);
                pass = pass && evaluate_cut(t, stats.view(), spec) == expect;
                if (spec.size() <= 4) pass = pass && evaluate_cut_inclusion_exclusion(t, stats.view(), spec) == expect;
            }
            record("cut-eval", pass);
        }
        if (wants("theta")) {
            ThetaOptions options;
            options.workers = common.workers;
            const Certificate cert = theta_exact(g, t, stats, k, options);
            const auto expect = oracle::theta(g, t, k, allow_large);
            record("theta", cert.theta == expect.theta,
                   "fast " + to_string(cert.theta) + ", oracle " + to_string(expect.theta));
        }
        if (!certificate.empty()) {
            const json j = load_json(certificate);
            const Certificate cert = certificate_from_json(j.contains("result") ? j.at("result") : j);
            const VerifyReport report = verify_certificate(g, t, cert);
            std::string detail;
            for (const auto& f : report.failures) detail += (detail.empty() ? "" : "; ") + f;
            record("certificate", report.ok, detail);
        }
        if (!trace.empty()) {
            const json j = load_json(trace);
            const SearchTrace loaded = trace_from_json(j.contains("result") ? j.at("result") : j);
            const ReplayReport report = replay_trace(g, loaded);
            std::string detail;
            for (const auto& f : report.failures) detail += (detail.empty() ? "" : "; ") + f;
            record("trace", report.ok, detail);
        }

        json config{{"k", k}, {"mode", mode}, {"allow_large", allow_large}, {"workers", common.workers}};
        if (!certificate.empty()) config["certificate"] = certificate;
        if (!trace.empty()) config["trace"] = trace;
        graph.echo(config);
        tree.echo(config);
        emit(envelope("verify", config, common.seed, g, {{"ok", ok}, {"checks", checks}, {"details", details}}),
             common.json_out, out);
        return ok ? Exit::ok : Exit::verification_failure;
    }
};

// -------------------------------------------------------------------- gen

struct GenCmd {
    std::string type = "cycle";
    Vertex n = 10;
    EdgeId m = 0;
    Weight max_weight = 10;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string rotation_out;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("gen", "write a generated graph file");
        sub->add_option("--type", type, "cycle | grid | complete | random_regular | wheel | random")
            ->check(CLI::IsMember({"cycle", "grid", "complete", "random_regular", "wheel", "random"}));
        sub->add_option("--n", n, "vertices")->check(CLI::Range(3, 1 << 24));
        sub->add_option("--m", m, "edges (random only; default 2n)");
        sub->add_option("--max-weight", max_weight, "largest weight (random only)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out_path, "graph file (default stdout)");
        sub->add_option("--rotation-out", rotation_out, "planar rotation system (cycle, grid, wheel)");
        return sub;
    }

    int run(std::ostream& out) const {
        WeightedGraph g;
        std::optional<RotationSystem> rot;
        if (type == "random") {
            g = random_connected(n, m > 0 ? m : 2 * n, max_weight, seed);
        } else {
            const GraphKind kind = parse_graph_kind(type);
            g = generate(kind, n, seed);
            rot = generated_rotation(kind, n);
        }
        if (!rotation_out.empty()) {
            if (!rot) throw Error("no embedding available for --type " + type);
            write_text(rotation_out, serialize_rotation(*rot), out);
        }
        // Edges keep generator order so rotation edge ids refer to the same lines.
        std::ostringstream text;
        text << "p " << g.n() << ' ' << g.m() << '\n';
        for (const Edge& e : g.edges()) text << "e " << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
        write_text(out_path, text.str(), out);
        return Exit::ok;
    }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-respecting thin tree certificates"};
    app.set_version_flag("--version", KTHIN_VERSION);
    app.require_subcommand(1);

    CertifyCmd certify;
    EnsembleCmd ensemble;
    SearchCmd search;
    PackingCmd packing;
    DualGirthCmd dual;
    SigmaCmd sigma;
    VerifyCmd verify;
    GenCmd gen;
    CLI::App* subs[] = {certify.add(app), ensemble.add(app), search.add(app), packing.add(app),
                        dual.add(app),    sigma.add(app),    verify.add(app), gen.add(app)};

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return Exit::ok;
        }
        err << "usage error: " << e.what() << '\n';
        return Exit::input_error;
    }

    try {
        if (subs[0]->parsed()) return certify.run(out);
        if (subs[1]->parsed()) return ensemble.run(out);
        if (subs[2]->parsed()) return search.run(out);
        if (subs[3]->parsed()) return packing.run(out);
        if (subs[4]->parsed()) return dual.run(out);
        if (subs[5]->parsed()) return sigma.run(out);
        if (subs[6]->parsed()) return verify.run(out);
        if (subs[7]->parsed()) return gen.run(out);
    } catch (const UnboundedCertificate& e) {
        err << "error: " << e.what() << " (endpoints";
        for (int v : e.endpoints()) err << ' ' << v + 1;
        err << ")\n";
        return Exit::unbounded;
    } catch (const BudgetExceeded& e) {
        err << "error: budget exceeded: " << e.what() << '\n';
        return Exit::budget;
    } catch (const GuardExceeded& e) {
        err << "error: " << e.what() << '\n';
        return Exit::budget;
    } catch (const ConsistencyFault& e) {
        err << "error: consistency fault: " << e.what() << '\n';
        return Exit::verification_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return Exit::input_error;
    }
    return Exit::input_error;
}

}  // namespace kthin::cli
