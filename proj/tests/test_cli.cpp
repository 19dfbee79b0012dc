#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "kthin/graph.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;

    json parsed() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = kthin::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Scratch directory holding the C4 fixtures, removed at scope exit.
struct Scratch {
    fs::path dir;

    Scratch() {
        static int counter = 0;
        dir = fs::temp_directory_path() / ("kthin_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(dir);
        write("c4.gr", "p 4 4\ne 1 2 1\ne 2 3 1\ne 3 4 1\ne 4 1 1\n");
        write("c4.tr", "t 4 1\nb 2 1\nb 3 2\nb 4 3\n");
        write("c4.rot", "r 1 1 4\nr 2 1 2\nr 3 2 3\nr 4 3 4\n");
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
    std::string read(const std::string& name) const {
        std::ifstream in(dir / name, std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }
};

json frac(std::int64_t num, std::int64_t den) { return {{"num", num}, {"den", den}}; }

}  // namespace

TEST_CASE("certify c4 path tree") {
    Scratch s;
    const auto r = run({"certify", s.path("c4.gr"), "--tree", s.path("c4.tr"), "--k", "2"});
    REQUIRE(r.code == 0);
    const json j = r.parsed();
    CHECK(j.at("result").at("theta") == frac(1, 1));
    CHECK(j.at("command") == "certify");
    CHECK(j.at("config").at("k") == 2);
    CHECK(j.at("config").at("tree") == s.path("c4.tr"));
    CHECK(j.at("graph_sha") == kthin::graph_sha256(kthin::read_graph_file(s.path("c4.gr"))));
    CHECK(j.contains("version"));
    CHECK(j.contains("seed"));
}

TEST_CASE("certify errors") {
    Scratch s;
    SUBCASE("missing tree file") {
        const auto r = run({"certify", s.path("c4.gr"), "--tree", s.path("missing.tr"), "--k", "2"});
        CHECK(r.code == 1);
        CHECK(r.err.find("missing.tr") != std::string::npos);
    }
    SUBCASE("k = 0 is a usage error") {
        const auto r = run({"certify", s.path("c4.gr"), "--k", "0"});
        CHECK(r.code == 1);
        CHECK(r.err.find("usage error") != std::string::npos);
    }
    SUBCASE("zero-weight cut is unbounded") {
        s.write("zero.gr", "p 4 4\ne 1 2 1\ne 2 3 0\ne 3 4 1\ne 4 1 0\n");
        const auto r = run({"certify", s.path("zero.gr"), "--k", "2"});
        CHECK(r.code == 2);
        CHECK(r.err.find("unbounded") != std::string::npos);
    }
    SUBCASE("enumeration budget") {
        const auto r = run({"certify", s.path("c4.gr"), "--k", "3", "--budget", "2"});
        CHECK(r.code == 3);
    }
    SUBCASE("unknown subcommand") { CHECK(run({"frobnicate"}).code == 1); }
    SUBCASE("malformed graph") {
        s.write("bad.gr", "p 3 1\ne 1 x 1\n");
        CHECK(run({"certify", s.path("bad.gr")}).code == 1);
    }
}

TEST_CASE("version and help exit cleanly") {
    CHECK(run({"--version"}).code == 0);
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("certify") != std::string::npos);
}

TEST_CASE("ensemble") {
    Scratch s;
    const std::vector<std::string> args{"ensemble", s.path("c4.gr"), "--k", "2", "--seed", "9"};
    const auto a = run(args);
    REQUIRE(a.code == 0);
    const json j = a.parsed();
    const auto& trees = j.at("result").at("trees");
    REQUIRE_FALSE(trees.empty());
    for (const auto& cert : trees) CHECK(cert.at("theta") == frac(1, 1));
    CHECK(j.at("result").contains("coverage"));
    CHECK(j.at("seed") == 9);

    SUBCASE("same seed, byte-identical output") { CHECK(run(args).out == a.out); }
    SUBCASE("worker count does not change the output") {
        auto more = args;
        more.insert(more.end(), {"--workers", "3"});
        auto fewer = args;
        fewer.insert(fewer.end(), {"--workers", "1"});
        json x = run(more).parsed(), y = run(fewer).parsed();
        x.at("config").erase("workers");
        y.at("config").erase("workers");
        CHECK(x == y);
    }
    SUBCASE("eta out of range") { CHECK(run({"ensemble", s.path("c4.gr"), "--eta", "1.5"}).code == 1); }
    SUBCASE("tradeoff regime records its constants") {
        const auto r = run({"ensemble", s.path("c4.gr"), "--regime", "tradeoff", "--s", "2"});
        REQUIRE(r.code == 0);
        const json t = r.parsed();
        CHECK(t.at("result").at("params").at("k") == 4);
        CHECK(t.at("result").contains("tradeoff_constants"));
    }
}

TEST_CASE("verify runs every oracle check") {
    Scratch s;
    const auto r = run({"verify", s.path("c4.gr"), "--tree", s.path("c4.tr"), "--k", "2", "--mode", "all"});
    REQUIRE(r.code == 0);
    const json checks = r.parsed().at("result").at("checks");
    for (const char* name : {"sigma", "pi", "tau", "theta", "cut-eval"}) CHECK(checks.at(name) == "PASS");

    SUBCASE("a certificate round-trips through verify") {
        const auto cert = run({"certify", s.path("c4.gr"), "--tree", s.path("c4.tr"), "--json-out", s.path("c.json")});
        REQUIRE(cert.code == 0);
        CHECK(cert.out.empty());
        const auto ok = run({"verify", s.path("c4.gr"), "--tree", s.path("c4.tr"), "--certificate", s.path("c.json")});
        CHECK(ok.code == 0);
        CHECK(ok.parsed().at("result").at("checks").at("certificate") == "PASS");

        json tampered = json::parse(s.read("c.json"));
        tampered["result"]["theta"] = frac(2, 1);
        s.write("t.json", tampered.dump());
        const auto bad = run({"verify", s.path("c4.gr"), "--tree", s.path("c4.tr"), "--certificate", s.path("t.json")});
        CHECK(bad.code == 4);
        CHECK(bad.parsed().at("result").at("checks").at("certificate") == "FAIL");
    }
    SUBCASE("oracle size guard") {
        CHECK(run({"gen", "--type", "cycle", "--n", "30", "--out", s.path("big.gr")}).code == 0);
        CHECK(run({"verify", s.path("big.gr"), "--mode", "tau"}).code == 3);
    }
}

TEST_CASE("dual-girth") {
    Scratch s;
    const auto r = run({"dual-girth", s.path("c4.gr"), "--rotation", s.path("c4.rot")});
    REQUIRE(r.code == 0);
    const json j = r.parsed();
    CHECK(j.at("result").at("girth") == 2);
    CHECK(j.at("result").at("faces") == 2);

    const auto bound = run({"dual-girth", s.path("c4.gr"), "--rotation", s.path("c4.rot"), "--tree", s.path("c4.tr"),
                            "--k", "2"});
    REQUIRE(bound.code == 0);
    CHECK(bound.parsed().at("result").at("holds") == true);
    CHECK(bound.parsed().at("result").at("bound") == frac(1, 1));

    s.write("bad.rot", "r 1 1\nr 2 1 2\nr 3 2 3\nr 4 3 4\n");
    const auto bad = run({"dual-girth", s.path("c4.gr"), "--rotation", s.path("bad.rot")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("dangling edge end") != std::string::npos);
}

TEST_CASE("gen then packing") {
    Scratch s;
    REQUIRE(run({"gen", "--type", "cycle", "--n", "4", "--out", s.path("g.gr")}).code == 0);
    const auto r = run({"packing", s.path("g.gr")});
    REQUIRE(r.code == 0);
    const json total = r.parsed().at("result").at("total");
    CHECK(total.at("num").get<double>() / total.at("den").get<double>() >= 0.9);

    SUBCASE("generated rotation is usable") {
        REQUIRE(run({"gen", "--type", "grid", "--n", "9", "--out", s.path("grid.gr"), "--rotation-out",
                     s.path("grid.rot")})
                    .code == 0);
        const auto d = run({"dual-girth", s.path("grid.gr"), "--rotation", s.path("grid.rot")});
        REQUIRE(d.code == 0);
        CHECK(d.parsed().at("result").at("girth") == 2);
    }
    SUBCASE("no embedding for complete graphs") {
        CHECK(run({"gen", "--type", "complete", "--n", "5", "--rotation-out", s.path("k5.rot")}).code == 1);
    }
    SUBCASE("random graphs are reproducible") {
        const auto a = run({"gen", "--type", "random", "--n", "12", "--m", "30", "--seed", "4"});
        const auto b = run({"gen", "--type", "random", "--n", "12", "--m", "30", "--seed", "4"});
        CHECK(a.out == b.out);
        CHECK(kthin::parse_graph(a.out).m() == 30);
    }
}

TEST_CASE("search with trace replay") {
    Scratch s;
    REQUIRE(run({"gen", "--type", "random", "--n", "10", "--m", "24", "--seed", "3", "--out", s.path("r.gr")}).code == 0);
    for (const char* mode : {"exact", "screened"}) {
        CAPTURE(mode);
        const auto r = run({"search", s.path("r.gr"), "--k", "2", "--budget", "50", "--mode", mode, "--random-start",
                            "--trace-out", s.path("trace.json")});
        REQUIRE(r.code == 0);
        const json j = r.parsed();
        const auto& res = j.at("result");
        const double initial = res.at("initial_score").at("num").get<double>() / res.at("initial_score").at("den").get<double>();
        const double final_score = res.at("final_score").at("num").get<double>() / res.at("final_score").at("den").get<double>();
        CHECK(final_score <= initial);
        const auto replay = run({"verify", s.path("r.gr"), "--mode", "tau", "--trace", s.path("trace.json")});
        CHECK(replay.code == 0);
        CHECK(replay.parsed().at("result").at("checks").at("trace") == "PASS");
    }
}

TEST_CASE("sigma dump") {
    Scratch s;
    const auto r = run({"sigma", s.path("c4.gr"), "--tree", s.path("c4.tr"), "--out", s.path("c4.sig"), "--tables"});
    REQUIRE(r.code == 0);
    const json res = r.parsed().at("result");
    CHECK(res.at("dump_sha") == kthin::sha256_hex(s.read("c4.sig")));
    // Path tree 1-2-3-4 on C4: D(1) = V has no boundary, the others have 2,
    // and D(2) xor D(4) = {2, 3} also has boundary 2.
    CHECK(res.at("tau") == json::array({0, 2, 2, 2}));
    CHECK(res.at("sigma")[1][3] == 2);
    CHECK(res.at("sigma")[1][1] == 0);
}
