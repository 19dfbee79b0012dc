#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kthin/error.hpp"
#include "kthin/graph.hpp"
#include "kthin/oracle.hpp"
#include "support.hpp"

using namespace kthin;

namespace {

std::size_t parse_error_line(std::string_view text) {
    try {
        parse_graph(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

std::string parse_error_text(std::string_view text, int scale = 0) {
    try {
        parse_graph(text, scale);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parse c4") {
    const auto g = test::c4();
    CHECK(g.n() == 4);
    CHECK(g.m() == 4);
    CHECK(g.edge(3) == Edge{0, 3, 1});
    CHECK(g.total_weight() == 4);
    CHECK(g.is_connected());
    CHECK(g.find_edge(3, 0) == 3);
    CHECK(g.find_edge(0, 2) == -1);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(parse_error_line("p 3 1\n# comment\ne 1 5 2\n") == 3);
    CHECK(parse_error_text("p 3 1\ne 1 5 2\n").find("out of range") != std::string::npos);
    CHECK(parse_error_text("p 3 1\ne 2 2 1\n").find("self-loop") != std::string::npos);
    CHECK(parse_error_text("p 3 1\ne 1 2 -4\n").find("negative weight") != std::string::npos);
    CHECK(parse_error_text("p 3 2\ne 1 2 1\n").find("header declares") != std::string::npos);
    CHECK(parse_error_text("p 3 1\nx 1 2 1\n").find("malformed") != std::string::npos);
    CHECK(parse_error_text("p 3 1\ne 1 2\n").find("malformed") != std::string::npos);
    CHECK(parse_error_text("e 1 2 1\n").find("before header") != std::string::npos);
    CHECK(parse_error_text("").find("missing header") != std::string::npos);
}

TEST_CASE("decimal weights are scaled exactly") {
    const auto g = parse_graph("p 2 1\ne 1 2 2.75\n", 2);
    CHECK(g.edge(0).w == 275);
    CHECK(parse_error_text("p 2 1\ne 1 2 2.755\n", 2).find("fractional") != std::string::npos);
    CHECK(parse_error_text("p 2 1\ne 1 2 2.5\n").find("fractional") != std::string::npos);
    CHECK(parse_graph("p 2 1\ne 1 2 3\n", 3).edge(0).w == 3000);
}

TEST_CASE("parallel edges merge") {
    const auto g = parse_graph("p 3 4\ne 1 2 1\ne 2 3 4\ne 2 1 2\ne 3 1 1\n");
    CHECK(g.m() == 3);
    CHECK(g.edge(0).w == 3);
    CHECK(g.edge(2) == Edge{0, 2, 1});
}

TEST_CASE("serialization round trip and hash") {
    for (const auto& inst : test::corpus(10, 40)) {
        const auto text = serialize_graph(inst.g);
        const auto back = parse_graph(text);
        CHECK(back == inst.g);
        CHECK(graph_sha256(back) == graph_sha256(inst.g));
        CHECK(graph_sha256(inst.g).size() == 64);
    }
    CHECK(graph_sha256(test::c4()) != graph_sha256(test::k4()));
}

TEST_CASE("constructor validation") {
    const std::vector<Edge> loop{{1, 1, 1}};
    CHECK_THROWS_AS(WeightedGraph(3, loop), Error);
    const std::vector<Edge> negative{{0, 1, -1}};
    CHECK_THROWS_AS(WeightedGraph(3, negative), Error);
    const std::vector<Edge> range{{0, 3, 1}};
    CHECK_THROWS_AS(WeightedGraph(3, range), Error);
}

TEST_CASE("cut shores") {
    const auto shore = CutShore::from_vertices(4, std::vector<Vertex>{0, 1});
    CHECK(shore.canonical().vertices() == std::vector<Vertex>{2, 3});
    CHECK(shore.is_proper());
    CHECK(!CutShore::from_mask(3, 0).is_proper());
    CHECK(!CutShore::from_mask(3, 7).is_proper());
    CHECK(cut_weight(test::c4(), shore) == cut_weight(test::c4(), shore.complement()));
    CHECK(cut_weight(test::c4(), shore) == 2);
}

TEST_CASE("min cut agrees with exhaustive enumeration") {
    CHECK(min_cut_lambda(test::c4()) == 2);
    CHECK(min_cut_lambda(test::k4()) == 3);
    for (const auto& inst : test::corpus(40, 60)) {
        INFO(test::describe(inst));
        CHECK(min_cut_lambda(inst.g) == oracle::lambda(inst.g));
    }
    const std::vector<Edge> split{{0, 1, 1}, {2, 3, 1}};
    const WeightedGraph apart(4, split);
    CHECK(min_cut_lambda(apart) == 0);
    CHECK_THROWS_AS(require_positive_lambda(apart), DisconnectedGraph);
}

TEST_CASE("generators") {
    CHECK(generate(GraphKind::cycle, 4) == test::c4());
    CHECK(generate(GraphKind::complete, 4) == test::k4());
    const auto grid = generate(GraphKind::grid, 9);
    CHECK(grid.m() == 12);
    CHECK(min_cut_lambda(grid) == 2);
    const auto wheel = generate(GraphKind::wheel, 6);
    CHECK(wheel.m() == 10);
    CHECK(min_cut_lambda(wheel) == 3);
    const auto rr = generate(parse_graph_kind("random-regular-like"), 20, 5);
    CHECK(rr.is_connected());
    CHECK(rr == generate(GraphKind::random_regular, 20, 5));
    CHECK_THROWS_AS(parse_graph_kind("petersen"), Error);
    CHECK_THROWS_AS(generate(GraphKind::cycle, 2), Error);
    const auto rc = random_connected(30, 80, 7, 9);
    CHECK(rc.m() == 80);
    CHECK(rc.is_connected());
    for (const Edge& e : rc.edges()) CHECK((e.w >= 1 && e.w <= 7));
}
