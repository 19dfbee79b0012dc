#include "kthin/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/stoer_wagner_min_cut.hpp>
#include <openssl/evp.h>

#include "kthin/error.hpp"
#include "kthin/rng.hpp"

namespace kthin {

WeightedGraph::WeightedGraph(Vertex n, std::span<const Edge> edges) : n_(n) {
    if (n < 0) throw Error("negative vertex count");
    std::map<std::pair<Vertex, Vertex>, EdgeId> seen;
    for (const Edge& raw : edges) {
        if (raw.u < 0 || raw.u >= n || raw.v < 0 || raw.v >= n) throw Error("vertex id out of range");
        if (raw.u == raw.v) throw Error("self-loop");
        if (raw.w < 0) throw Error("negative weight");
        const Vertex a = std::min(raw.u, raw.v);
        const Vertex b = std::max(raw.u, raw.v);
        auto [it, inserted] = seen.try_emplace({a, b}, static_cast<EdgeId>(edges_.size()));
        if (inserted) {
            edges_.push_back({a, b, raw.w});
        } else {
            edges_[static_cast<std::size_t>(it->second)].w += raw.w;
        }
    }

    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : edges_) {
        ++offsets_[static_cast<std::size_t>(e.u) + 1];
        ++offsets_[static_cast<std::size_t>(e.v) + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < m(); ++id) {
        const Edge& e = edges_[static_cast<std::size_t>(id)];
        adjacency_[fill[static_cast<std::size_t>(e.u)]++] = {e.v, id};
        adjacency_[fill[static_cast<std::size_t>(e.v)]++] = {e.u, id};
    }
}

EdgeId WeightedGraph::find_edge(Vertex u, Vertex v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) return -1;
    for (const Incidence& inc : incident(u)) {
        if (inc.to == v) return inc.edge;
    }
    return -1;
}

Weight WeightedGraph::total_weight() const noexcept {
    Weight total = 0;
    for (const Edge& e : edges_) total += e.w;
    return total;
}

bool WeightedGraph::is_connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    Vertex reached = 1;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const Incidence& inc : incident(v)) {
            if (!seen[static_cast<std::size_t>(inc.to)]) {
                seen[static_cast<std::size_t>(inc.to)] = 1;
                ++reached;
                stack.push_back(inc.to);
            }
        }
    }
    return reached == n_;
}

namespace {

std::vector<Edge> sorted_edges(const WeightedGraph& g) {
    std::vector<Edge> out = g.edges();
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    return out;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

bool parse_int(std::string_view token, std::int64_t& out) {
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

// Exact decimal -> integer scaled by 10^scale.
Weight parse_weight(std::string_view token, int scale, std::size_t line) {
    if (token.empty()) throw ParseError(line, "malformed line");
    if (token.front() == '-') throw ParseError(line, "negative weight");
    if (token.front() == '+') token.remove_prefix(1);
    const std::size_t dot = token.find('.');
    std::string_view whole = token.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : token.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw ParseError(line, "malformed line");
    auto digits_only = [](std::string_view s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits_only(whole) || !digits_only(frac)) throw ParseError(line, "malformed line");
    while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
    if (static_cast<int>(frac.size()) > scale) {
        throw ParseError(line, "weight has more fractional digits than the declared scale");
    }
    __int128 value = 0;
    for (char c : whole) {
        value = value * 10 + (c - '0');
        if (value > INT64_MAX) throw ParseError(line, "weight overflow");
    }
    for (int i = 0; i < scale; ++i) {
        const int digit = i < static_cast<int>(frac.size()) ? frac[static_cast<std::size_t>(i)] - '0' : 0;
        value = value * 10 + digit;
        if (value > INT64_MAX) throw ParseError(line, "weight overflow");
    }
    return static_cast<Weight>(value);
}

}  // namespace

bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && sorted_edges(a) == sorted_edges(b);
}

WeightedGraph parse_graph(std::string_view text, int decimal_scale) {
    if (decimal_scale < 0 || decimal_scale > 18) throw Error("decimal scale must lie in [0, 18]");
    std::int64_t n = -1;
    std::int64_t declared_m = -1;
    std::size_t header_line = 0;
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        if (tokens[0] == "p") {
            if (n >= 0) throw ParseError(line_no, "duplicate header");
            if (tokens.size() != 3 || !parse_int(tokens[1], n) || !parse_int(tokens[2], declared_m) || n < 0 ||
                declared_m < 0) {
                throw ParseError(line_no, "malformed line");
            }
            header_line = line_no;
        } else if (tokens[0] == "e") {
            if (n < 0) throw ParseError(line_no, "edge before header");
            std::int64_t u = 0;
            std::int64_t v = 0;
            if (tokens.size() != 4 || !parse_int(tokens[1], u) || !parse_int(tokens[2], v)) {
                throw ParseError(line_no, "malformed line");
            }
            if (u < 1 || u > n || v < 1 || v > n) throw ParseError(line_no, "vertex id out of range");
            if (u == v) throw ParseError(line_no, "self-loop");
            const Weight w = parse_weight(tokens[3], decimal_scale, line_no);
            edges.push_back({static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1), w});
        } else {
            throw ParseError(line_no, "malformed line");
        }
        if (eol == text.size()) break;
    }
    if (n < 0) throw ParseError(0, "missing header");
    if (static_cast<std::int64_t>(edges.size()) != declared_m) {
        throw ParseError(header_line, "header declares " + std::to_string(declared_m) + " edges, found " +
                                          std::to_string(edges.size()));
    }
    return WeightedGraph(static_cast<Vertex>(n), edges);
}

WeightedGraph read_graph_file(const std::string& path, int decimal_scale) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open graph file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_graph(buffer.str(), decimal_scale);
}

std::string serialize_graph(const WeightedGraph& g) {
    std::ostringstream out;
    out << "p " << g.n() << ' ' << g.m() << '\n';
    for (const Edge& e : sorted_edges(g)) out << "e " << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
    return out.str();
}

std::string sha256_hex(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string graph_sha256(const WeightedGraph& g) { return sha256_hex(serialize_graph(g)); }

CutShore::CutShore(std::vector<bool> members) : members_(std::move(members)) {}

CutShore CutShore::from_vertices(Vertex n, std::span<const Vertex> vertices) {
    std::vector<bool> members(static_cast<std::size_t>(n), false);
    for (Vertex v : vertices) members.at(static_cast<std::size_t>(v)) = true;
    return CutShore(std::move(members));
}

CutShore CutShore::from_mask(Vertex n, std::uint64_t mask) {
    std::vector<bool> members(static_cast<std::size_t>(n), false);
    for (Vertex v = 0; v < n; ++v) members[static_cast<std::size_t>(v)] = (mask >> v) & 1U;
    return CutShore(std::move(members));
}

std::size_t CutShore::size() const {
    return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

bool CutShore::is_proper() const {
    const std::size_t k = size();
    return k > 0 && k < members_.size();
}

CutShore CutShore::complement() const {
    std::vector<bool> flipped(members_);
    flipped.flip();
    return CutShore(std::move(flipped));
}

CutShore CutShore::canonical() const {
    if (!members_.empty() && members_[0]) return complement();
    return *this;
}

std::vector<Vertex> CutShore::vertices() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < n(); ++v) {
        if (contains(v)) out.push_back(v);
    }
    return out;
}

Weight cut_weight(const WeightedGraph& g, const CutShore& a) {
    Weight total = 0;
    for (const Edge& e : g.edges()) {
        if (a.contains(e.u) != a.contains(e.v)) total += e.w;
    }
    return total;
}

Weight min_cut_lambda(const WeightedGraph& g) {
    if (g.n() < 2 || !g.is_connected()) return 0;
    using BoostGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                             boost::property<boost::edge_weight_t, Weight>>;
    BoostGraph bg(static_cast<std::size_t>(g.n()));
    for (const Edge& e : g.edges()) {
        boost::add_edge(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v), e.w, bg);
    }
    return boost::stoer_wagner_min_cut(bg, boost::get(boost::edge_weight, bg));
}

Weight require_positive_lambda(const WeightedGraph& g) {
    const Weight lambda = min_cut_lambda(g);
    if (lambda <= 0) throw DisconnectedGraph();
    return lambda;
}

GraphKind parse_graph_kind(std::string_view name) {
    if (name == "cycle") return GraphKind::cycle;
    if (name == "grid") return GraphKind::grid;
    if (name == "complete") return GraphKind::complete;
    if (name == "random-regular-like" || name == "random-regular") return GraphKind::random_regular;
    if (name == "wheel") return GraphKind::wheel;
    throw Error("unknown graph kind: " + std::string(name));
}

WeightedGraph grid_graph(Vertex rows, Vertex cols) {
    if (rows < 1 || cols < 1) throw Error("grid needs positive dimensions");
    std::vector<Edge> edges;
    for (Vertex r = 0; r < rows; ++r) {
        for (Vertex c = 0; c < cols; ++c) {
            const Vertex v = r * cols + c;
            if (c + 1 < cols) edges.push_back({v, v + 1, 1});
            if (r + 1 < rows) edges.push_back({v, v + cols, 1});
        }
    }
    return WeightedGraph(rows * cols, edges);
}

WeightedGraph generate(GraphKind kind, Vertex n, std::uint64_t seed) {
    if (n < 3) throw Error("generator needs n >= 3");
    std::vector<Edge> edges;
    switch (kind) {
        case GraphKind::cycle:
            for (Vertex i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1});
            break;
        case GraphKind::grid: {
            Vertex rows = 1;
            for (Vertex r = 1; r * r <= n; ++r) {
                if (n % r == 0) rows = r;
            }
            return grid_graph(rows, n / rows);
        }
        case GraphKind::complete:
            for (Vertex i = 0; i < n; ++i) {
                for (Vertex j = i + 1; j < n; ++j) edges.push_back({i, j, 1});
            }
            break;
        case GraphKind::random_regular: {
            // Union of two random Hamiltonian cycles, repeated pairs dropped.
            CounterRng rng(seed);
            std::set<std::pair<Vertex, Vertex>> seen;
            for (int round = 0; round < 2; ++round) {
                std::vector<Vertex> perm(static_cast<std::size_t>(n));
                std::iota(perm.begin(), perm.end(), 0);
                for (std::size_t i = perm.size() - 1; i > 0; --i) {
                    std::swap(perm[i], perm[rng.below(i + 1)]);
                }
                for (std::size_t i = 0; i < perm.size(); ++i) {
                    Vertex a = perm[i];
                    Vertex b = perm[(i + 1) % perm.size()];
                    if (a > b) std::swap(a, b);
                    if (seen.insert({a, b}).second) edges.push_back({a, b, 1});
                }
            }
            break;
        }
        case GraphKind::wheel:
            if (n < 4) throw Error("wheel needs n >= 4");
            for (Vertex i = 1; i < n; ++i) {
                edges.push_back({0, i, 1});
                edges.push_back({i, i + 1 < n ? i + 1 : 1, 1});
            }
            break;
    }
    return WeightedGraph(n, edges);
}

WeightedGraph random_connected(Vertex n, EdgeId m, Weight max_weight, std::uint64_t seed) {
    if (n < 2) throw Error("random_connected needs n >= 2");
    if (max_weight < 1) throw Error("max_weight must be positive");
    CounterRng rng(seed);
    const auto draw_weight = [&] { return 1 + static_cast<Weight>(rng.below(static_cast<std::uint64_t>(max_weight))); };
    std::vector<Vertex> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

    std::set<std::pair<Vertex, Vertex>> seen;
    std::vector<Edge> edges;
    auto add = [&](Vertex a, Vertex b) {
        if (a > b) std::swap(a, b);
        if (seen.insert({a, b}).second) edges.push_back({a, b, draw_weight()});
    };
    for (std::size_t i = 1; i < perm.size(); ++i) add(perm[rng.below(i)], perm[i]);
    const std::int64_t cap = static_cast<std::int64_t>(n) * (n - 1) / 2;
    const std::int64_t target = std::min<std::int64_t>(m, cap);
    while (static_cast<std::int64_t>(edges.size()) < target) {
        const auto a = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
        const auto b = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
        if (a != b) add(a, b);
    }
    return WeightedGraph(n, edges);
}

}  // namespace kthin
