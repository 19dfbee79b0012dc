#include "kthin/planar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "kthin/error.hpp"
#include "kthin/parallel.hpp"

namespace kthin {

namespace {

Vertex head_of(const WeightedGraph& g, std::int32_t dart) {
    const Edge& e = g.edge(dart / 2);
    return dart % 2 == 0 ? e.v : e.u;
}

// Dart of edge id leaving v.
std::int32_t dart_from(const WeightedGraph& g, EdgeId id, Vertex v) { return 2 * id + (g.edge(id).u == v ? 0 : 1); }

}  // namespace

RotationSystem parse_rotation(const WeightedGraph& g, std::string_view text) {
    RotationSystem rot;
    rot.order.resize(static_cast<std::size_t>(g.n()));
    std::vector<bool> seen(static_cast<std::size_t>(g.n()), false);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag)) continue;
        if (tag != "r") throw ParseError(line_no, "expected 'r'");
        long long v = 0;
        if (!(fields >> v) || v < 1 || v > g.n()) throw ParseError(line_no, "vertex out of range");
        const auto slot = static_cast<std::size_t>(v - 1);
        if (seen[slot]) throw ParseError(line_no, "vertex listed twice");
        seen[slot] = true;
        std::string token;
        while (fields >> token) {
            long long id = 0;
            try {
                std::size_t used = 0;
                id = std::stoll(token, &used);
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw ParseError(line_no, "bad edge id '" + token + "'");
            }
            if (id < 1 || id > g.m()) throw ParseError(line_no, "edge id out of range");
            rot.order[slot].push_back(static_cast<EdgeId>(id - 1));
        }
    }
    validate_rotation(g, rot);
    return rot;
}

RotationSystem read_rotation_file(const WeightedGraph& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open rotation file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_rotation(g, buffer.str());
}

std::string serialize_rotation(const RotationSystem& rot) {
    std::ostringstream out;
    for (Vertex v = 0; v < rot.n(); ++v) {
        out << "r " << v + 1;
        for (EdgeId id : rot.order[static_cast<std::size_t>(v)]) out << ' ' << id + 1;
        out << '\n';
    }
    return out.str();
}

RotationSystem rotation_from_positions(const WeightedGraph& g, std::span<const std::pair<double, double>> positions) {
    if (static_cast<Vertex>(positions.size()) != g.n()) throw Error("one position per vertex is required");
    RotationSystem rot;
    rot.order.resize(static_cast<std::size_t>(g.n()));
    for (Vertex v = 0; v < g.n(); ++v) {
        std::vector<std::pair<double, EdgeId>> around;
        const auto [x, y] = positions[static_cast<std::size_t>(v)];
        for (const Incidence& inc : g.incident(v)) {
            const auto [tx, ty] = positions[static_cast<std::size_t>(inc.to)];
            around.emplace_back(std::atan2(ty - y, tx - x), inc.edge);
        }
        std::sort(around.begin(), around.end());
        for (const auto& [angle, id] : around) rot.order[static_cast<std::size_t>(v)].push_back(id);
    }
    return rot;
}

RotationSystem grid_rotation(Vertex rows, Vertex cols) {
    const WeightedGraph g = grid_graph(rows, cols);
    std::vector<std::pair<double, double>> positions;
    for (Vertex r = 0; r < rows; ++r) {
        for (Vertex c = 0; c < cols; ++c) positions.emplace_back(c, -r);
    }
    return rotation_from_positions(g, positions);
}

std::optional<RotationSystem> generated_rotation(GraphKind kind, Vertex n) {
    const WeightedGraph g = generate(kind, n);
    std::vector<std::pair<double, double>> pos;
    auto on_circle = [&](Vertex i, Vertex count) {
        const double angle = 2 * std::numbers::pi * i / count;
        pos.emplace_back(std::cos(angle), std::sin(angle));
    };
    switch (kind) {
        case GraphKind::cycle:
            for (Vertex i = 0; i < n; ++i) on_circle(i, n);
            break;
        case GraphKind::wheel:
            pos.emplace_back(0, 0);
            for (Vertex i = 1; i < n; ++i) on_circle(i - 1, n - 1);
            break;
        case GraphKind::grid: {
            Vertex rows = 1;
            for (Vertex r = 1; r * r <= n; ++r) {
                if (n % r == 0) rows = r;
            }
            return grid_rotation(rows, n / rows);
        }
        default:
            return std::nullopt;
    }
    return rotation_from_positions(g, pos);
}

void validate_rotation(const WeightedGraph& g, const RotationSystem& rot) {
    if (rot.n() != g.n()) throw EmbeddingError("rotation system has the wrong vertex count");
    // ends[2e + side]: occurrences of the end of e at edge(e).u (side 0) or .v.
    std::vector<int> ends(2 * static_cast<std::size_t>(g.m()), 0);
    for (Vertex v = 0; v < g.n(); ++v) {
        for (EdgeId id : rot.order[static_cast<std::size_t>(v)]) {
            if (id < 0 || id >= g.m()) throw EmbeddingError("rotation names an unknown edge");
            const Edge& e = g.edge(id);
            if (e.u != v && e.v != v) {
                throw EmbeddingError("edge " + std::to_string(id + 1) + " does not touch vertex " + std::to_string(v + 1));
            }
            ++ends[2 * static_cast<std::size_t>(id) + (e.u == v ? 0 : 1)];
        }
    }
    for (EdgeId id = 0; id < g.m(); ++id) {
        for (int side = 0; side < 2; ++side) {
            const int count = ends[2 * static_cast<std::size_t>(id) + static_cast<std::size_t>(side)];
            const Vertex at = side == 0 ? g.edge(id).u : g.edge(id).v;
            const std::string what = "edge " + std::to_string(id + 1) + " at vertex " + std::to_string(at + 1);
            if (count == 0) throw EmbeddingError("dangling edge end: " + what);
            if (count > 1) throw EmbeddingError("edge end listed twice: " + what);
        }
    }
}

FaceTrace trace_faces(const WeightedGraph& g, const RotationSystem& rot) {
    validate_rotation(g, rot);
    // position of each dart in the rotation of its tail
    std::vector<std::size_t> position(2 * static_cast<std::size_t>(g.m()));
    for (Vertex v = 0; v < g.n(); ++v) {
        const auto& order = rot.order[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < order.size(); ++i) {
            position[static_cast<std::size_t>(dart_from(g, order[i], v))] = i;
        }
    }
    auto next = [&](std::int32_t dart) {
        const Vertex h = head_of(g, dart);
        const auto& order = rot.order[static_cast<std::size_t>(h)];
        const std::size_t i = position[static_cast<std::size_t>(dart ^ 1)];
        return dart_from(g, order[(i + 1) % order.size()], h);
    };

    FaceTrace out;
    out.face_of_dart.assign(2 * static_cast<std::size_t>(g.m()), -1);
    for (std::int32_t start = 0; start < 2 * g.m(); ++start) {
        if (out.face_of_dart[static_cast<std::size_t>(start)] >= 0) continue;
        std::int32_t d = start;
        do {
            out.face_of_dart[static_cast<std::size_t>(d)] = out.faces;
            d = next(d);
        } while (d != start);
        ++out.faces;
    }
    return out;
}

int embedding_genus(const WeightedGraph& g, const RotationSystem& rot) {
    if (!g.is_connected()) throw Error("embedding genus needs a connected graph");
    const FaceTrace faces = trace_faces(g, rot);
    const long long chi = static_cast<long long>(g.n()) - g.m() + faces.faces;
    if (chi > 2 || (2 - chi) % 2 != 0) throw EmbeddingError("face count is inconsistent with an orientable embedding");
    return static_cast<int>((2 - chi) / 2);
}

bool DualGraph::is_connected() const {
    if (faces == 0) return true;
    std::vector<std::int32_t> parent(static_cast<std::size_t>(faces));
    for (std::int32_t i = 0; i < faces; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](std::int32_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        }
        return x;
    };
    std::int32_t components = faces;
    for (const DualEdge& e : edges) {
        const auto a = find(e.a), b = find(e.b);
        if (a != b) {
            parent[static_cast<std::size_t>(a)] = b;
            --components;
        }
    }
    return components == 1;
}

DualGraph build_dual(const WeightedGraph& g, const RotationSystem& rot) {
    const FaceTrace faces = trace_faces(g, rot);
    if (!g.is_connected() || static_cast<long long>(g.n()) - g.m() + faces.faces != 2) {
        throw EmbeddingError("not a planar embedding");
    }
    DualGraph dual;
    dual.faces = faces.faces;
    dual.edges.reserve(static_cast<std::size_t>(g.m()));
    for (EdgeId id = 0; id < g.m(); ++id) {
        dual.edges.push_back({faces.face_of_dart[2 * static_cast<std::size_t>(id)],
                              faces.face_of_dart[2 * static_cast<std::size_t>(id) + 1], g.edge(id).w});
    }
    return dual;
}

Weight dual_girth(const DualGraph& dual, bool weighted, unsigned workers) {
    if (dual.edges.empty()) throw Error("dual graph has no cycle");
    struct Arc {
        std::int32_t to;
        std::int32_t edge;
    };
    std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(dual.faces));
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(dual.edges.size()); ++i) {
        const DualEdge& e = dual.edges[static_cast<std::size_t>(i)];
        adj[static_cast<std::size_t>(e.a)].push_back({e.b, i});
        if (e.a != e.b) adj[static_cast<std::size_t>(e.b)].push_back({e.a, i});
    }
    auto length = [&](std::int32_t i) { return weighted ? dual.edges[static_cast<std::size_t>(i)].w : Weight{1}; };
    constexpr Weight kInf = std::numeric_limits<Weight>::max();

    std::vector<Weight> best(dual.edges.size(), kInf);
    const unsigned pool = resolve_workers(workers);
    std::vector<std::vector<Weight>> dist(pool);
    parallel_tasks(dual.edges.size(), pool, [&](std::size_t idx, unsigned worker) {
        const auto skip = static_cast<std::int32_t>(idx);
        const DualEdge& e = dual.edges[idx];
        if (e.a == e.b) {
            best[idx] = length(skip);
            return;
        }
        auto& d = dist[worker];
        d.assign(static_cast<std::size_t>(dual.faces), kInf);
        using Item = std::pair<Weight, std::int32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        d[static_cast<std::size_t>(e.a)] = 0;
        heap.push({0, e.a});
        while (!heap.empty()) {
            const auto [du, u] = heap.top();
            heap.pop();
            if (du != d[static_cast<std::size_t>(u)]) continue;
            if (u == e.b) break;
            for (const Arc& arc : adj[static_cast<std::size_t>(u)]) {
                if (arc.edge == skip) continue;
                const Weight nd = du + length(arc.edge);
                if (nd < d[static_cast<std::size_t>(arc.to)]) {
                    d[static_cast<std::size_t>(arc.to)] = nd;
                    heap.push({nd, arc.to});
                }
            }
        }
        const Weight path = d[static_cast<std::size_t>(e.b)];
        if (path != kInf) best[idx] = path + length(skip);
    });
    const Weight girth = *std::min_element(best.begin(), best.end());
    if (girth == kInf) throw Error("dual graph has no cycle");
    return girth;
}

PlanarReport planar_certified_bound(const WeightedGraph& g, const RotationSystem& rot, const RootedTree& t, int k,
                                    const PairStats& stats, const ThetaOptions& options) {
    const DualGraph dual = build_dual(g, rot);
    PlanarReport report;
    report.k = k;
    report.faces = dual.faces;
    report.girth = dual_girth(dual, false, options.workers);
    report.weighted_girth = dual_girth(dual, true, options.workers);
    report.lambda = require_positive_lambda(g);
    report.certificate = theta_exact(g, t, stats, k, options);
    report.unit_weights = std::all_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.w == 1; });
    report.positive_weights = std::all_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.w >= 1; });
    report.bound = Rational(k, report.girth);
    report.weighted_bound = Rational(k, report.weighted_girth);
    // With integer weights >= 1 a cut weighs at least its edge count, which
    // is at least g*.
    report.holds = report.certificate.theta <= report.weighted_bound &&
                   (!report.positive_weights || report.certificate.theta <= report.bound);
    return report;
}

SurfaceRegime parse_surface_regime(std::string_view name) {
    if (name == "general") return SurfaceRegime::general;
    if (name == "planar") return SurfaceRegime::planar;
    if (name == "genus") return SurfaceRegime::genus;
    if (name == "tradeoff") return SurfaceRegime::tradeoff;
    throw Error("unknown regime: " + std::string(name));
}

std::string_view to_string(SurfaceRegime regime) {
    switch (regime) {
        case SurfaceRegime::general: return "general";
        case SurfaceRegime::planar: return "planar";
        case SurfaceRegime::genus: return "genus";
        case SurfaceRegime::tradeoff: return "tradeoff";
    }
    return "general";
}

CoverageParams surface_params(Vertex n, double alpha, double eta, double gamma, SurfaceRegime regime, LogBase base) {
    if (!(gamma >= 0)) throw Error("genus must be nonnegative");
    CoverageParams params = coverage_params(n, alpha, eta, base);
    auto log = [&](double x) { return base == LogBase::natural ? std::log(x) : std::log2(x); };
    auto ceil = [](double x) { return static_cast<int>(std::ceil(x - 1e-9)); };
    switch (regime) {
        case SurfaceRegime::general:
            break;
        case SurfaceRegime::planar:
            gamma = 0;
            [[fallthrough]];
        case SurfaceRegime::genus:
            params.s = ceil(3 * ((alpha + gamma) * log(n) + log(1 / eta)));
            break;
        case SurfaceRegime::tradeoff:
            params.k = ceil(kTradeoffC * alpha);
            params.s = ceil(kTradeoffCPrime * (log(n) + log(1 / eta)));
            break;
    }
    return params;
}

}  // namespace kthin
