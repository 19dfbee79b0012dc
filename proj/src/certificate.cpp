#include "kthin/certificate.hpp"

#include <algorithm>
#include <sstream>

#include "kthin/cut_eval.hpp"
#include "kthin/error.hpp"
#include "kthin/tuples.hpp"

namespace kthin {

namespace {

constexpr std::uint32_t kNoSlot = 0xffffffffU;

std::uint64_t binom(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    std::uint64_t out = 1;
    for (std::uint64_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

void check_k(int k) {
    if (k < 1) throw InvalidSpec("k must be at least 1");
}

void check_stats(const RootedTree& t, const PairStats& stats) {
    if (stats.n != t.n() || stats.tree_fingerprint != t.fingerprint()) {
        throw VersionMismatch("pair statistics belong to a different tree");
    }
}

Certificate make_certificate(const RootedTree& t, int k, const Candidate& best, Weight lambda, std::string sha) {
    Certificate cert;
    cert.k = k;
    cert.theta = Rational(best.t, best.w);
    cert.witness = best.ids;
    cert.crossings = best.t;
    cert.cut_weight = best.w;
    cert.lambda = lambda;
    cert.tree_fingerprint = t.fingerprint();
    cert.graph_sha = std::move(sha);
    cert.tree = t.child_parent_pairs();
    if (lambda > 0 && cert.theta > cert.bound()) {
        throw ConsistencyFault("theta " + to_string(cert.theta) + " exceeds k/lambda " + to_string(cert.bound()));
    }
    return cert;
}

std::vector<int> to_ints(std::span<const Vertex> ids) { return {ids.begin(), ids.end()}; }

}  // namespace

bool better_candidate(const Candidate& a, const Candidate& b) {
    if (b.empty()) return !a.empty();
    if (a.empty()) return false;
    if (!ratio_equal(a.t, a.w, b.t, b.w)) return ratio_less(b.t, b.w, a.t, a.w);
    if (a.t != b.t) return a.t < b.t;
    return a.ids < b.ids;
}

Certificate theta_exact(const WeightedGraph& g, const RootedTree& t, const PairStats& stats, int k,
                        const ThetaOptions& options) {
    check_k(k);
    check_stats(t, stats);
    if (t.n() < 2) throw InvalidSpec("a cut needs at least two vertices");
    const int kk = std::min<int>(k, t.n() - 1);
    const std::uint64_t count = tuple_count(t.n() - 1, kk);
    if (count > options.budget) {
        throw BudgetExceeded(std::to_string(count) + " endpoint sets exceed the budget of " +
                             std::to_string(options.budget));
    }

    const unsigned workers = resolve_workers(options.workers);
    std::vector<Candidate> best(workers);
    std::vector<std::vector<Vertex>> zero(workers);
    std::vector<std::vector<Vertex>> negative(workers);
    const PairTable table = stats.view();

    enumerate_tuples(t, kk, workers, [&](std::span<const Vertex> endpoints, unsigned worker) {
        const Weight w = evaluate_endpoints(t, table, endpoints);
        const auto size = static_cast<std::int64_t>(endpoints.size());
        if (w <= 0) {
            std::vector<Vertex> ids(endpoints.begin(), endpoints.end());
            std::sort(ids.begin(), ids.end());
            auto& slot = w == 0 ? zero[worker] : negative[worker];
            if (slot.empty() || ids < slot) slot = std::move(ids);
            return;
        }
        Candidate& b = best[worker];
        if (!b.empty()) {
            if (ratio_less(size, w, b.t, b.w)) return;
            if (ratio_equal(size, w, b.t, b.w) && size > b.t) return;
        }
        Candidate c{size, w, {endpoints.begin(), endpoints.end()}};
        std::sort(c.ids.begin(), c.ids.end());
        if (better_candidate(c, b)) b = std::move(c);
    });

    for (const auto& ids : negative) {
        if (!ids.empty()) throw ConsistencyFault("negative cut weight from pair statistics");
    }
    std::vector<Vertex> first_zero;
    for (const auto& ids : zero) {
        if (!ids.empty() && (first_zero.empty() || ids < first_zero)) first_zero = ids;
    }
    if (!first_zero.empty()) throw UnboundedCertificate(to_ints(first_zero));

    Candidate winner;
    for (auto& c : best) {
        if (better_candidate(c, winner)) winner = std::move(c);
    }
    const Weight lambda = options.lambda ? *options.lambda : min_cut_lambda(g);
    return make_certificate(t, k, winner, lambda, options.graph_sha ? *options.graph_sha : graph_sha256(g));
}

ThetaTracker::ThetaTracker(const WeightedGraph& g, const RootedTree& t, const PairStats& stats, int k,
                           const ThetaOptions& options)
    : g_(&g), k_(k), options_(options) {
    check_k(k);
    check_stats(t, stats);
    if (!options_.lambda) options_.lambda = min_cut_lambda(g);
    if (!options_.graph_sha) options_.graph_sha = graph_sha256(g);

    const int kk = std::min<int>(k, t.n() - 1);
    cached_ = k <= 3 && t.n() >= 2 && tuple_count(t.n() - 1, kk) <= options_.budget;
    if (!cached_) {
        cert_ = theta_exact(g, t, stats, k, options_);
        return;
    }

    const auto m = static_cast<std::uint64_t>(t.n() - 1);
    offset_.assign(static_cast<std::size_t>(kk) + 2, 0);
    for (int size = 1; size <= kk; ++size) {
        offset_[static_cast<std::size_t>(size) + 1] = offset_[static_cast<std::size_t>(size)] + binom(m, static_cast<std::uint64_t>(size));
    }
    const std::size_t slots = offset_.back();
    ids_.assign(slots, {0, 0, 0});
    size_.assign(slots, 0);
    weight_.assign(slots, 0);
    leaves_ = 1;
    while (leaves_ < slots) leaves_ *= 2;
    heap_.assign(2 * leaves_, kNoSlot);

    // Fill slots in rank order: ids are 1..n-1, rank uses id - 1.
    std::array<Vertex, 3> ids{};
    for (int size = 1; size <= kk; ++size) {
        std::vector<Vertex> c(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) c[static_cast<std::size_t>(i)] = i + 1;
        while (true) {
            for (int i = 0; i < size; ++i) ids[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
            const std::size_t slot = slot_of(std::span<const Vertex>(c));
            ids_[slot] = ids;
            size_[slot] = static_cast<std::uint8_t>(size);
            int i = 0;
            while (i < size - 1 && c[static_cast<std::size_t>(i)] + 1 == c[static_cast<std::size_t>(i) + 1]) ++i;
            if (i == size - 1 && c[static_cast<std::size_t>(i)] == t.n() - 1) break;
            ++c[static_cast<std::size_t>(i)];
            for (int j = 0; j < i; ++j) c[static_cast<std::size_t>(j)] = j + 1;
        }
    }
    for (std::size_t slot = 0; slot < slots; ++slot) evaluate_slot(t, stats, slot);
    for (std::size_t slot = 0; slot < slots; ++slot) heap_[leaves_ + slot] = static_cast<std::uint32_t>(slot);
    for (std::size_t node = leaves_ - 1; node >= 1; --node) pull(node);
    reevaluated_ = slots;
    rebuild_certificate(t);
}

std::size_t ThetaTracker::slot_of(std::span<const Vertex> sorted_ids) const {
    std::size_t rank = offset_[sorted_ids.size()];
    for (std::size_t i = 0; i < sorted_ids.size(); ++i) {
        rank += binom(static_cast<std::uint64_t>(sorted_ids[i] - 1), i + 1);
    }
    return rank;
}

void ThetaTracker::evaluate_slot(const RootedTree& t, const PairStats& stats, std::size_t slot) {
    const std::span<const Vertex> ids(ids_[slot].data(), size_[slot]);
    weight_[slot] = evaluate_endpoints(t, stats.view(), ids);
}

Candidate ThetaTracker::slot_candidate(std::uint32_t slot) const {
    // Empty leaves and zero weights never win; zero weights are reported
    // separately.
    if (slot == kNoSlot || weight_[slot] <= 0) return {};
    return {size_[slot], weight_[slot], {ids_[slot].begin(), ids_[slot].begin() + size_[slot]}};
}

void ThetaTracker::pull(std::size_t node) {
    const std::uint32_t a = heap_[2 * node];
    const std::uint32_t b = heap_[2 * node + 1];
    heap_[node] = better_candidate(slot_candidate(b), slot_candidate(a)) ? b : a;
}

void ThetaTracker::refresh_slot(std::size_t slot) {
    for (std::size_t node = (leaves_ + slot) / 2; node >= 1; node /= 2) pull(node);
}

void ThetaTracker::rebuild_certificate(const RootedTree& t) {
    for (std::size_t slot = 0; slot < weight_.size(); ++slot) {
        if (weight_[slot] < 0) throw ConsistencyFault("negative cut weight from pair statistics");
        if (weight_[slot] == 0) {
            throw UnboundedCertificate(to_ints(std::span<const Vertex>(ids_[slot].data(), size_[slot])));
        }
    }
    const std::uint32_t top = heap_[1];
    const Candidate best{size_[top], weight_[top], {ids_[top].begin(), ids_[top].begin() + size_[top]}};
    cert_ = make_certificate(t, k_, best, *options_.lambda, *options_.graph_sha);
}

const Certificate& ThetaTracker::apply_swap(const RootedTree& old_t, const RootedTree& new_t, const PairStats& stats,
                                            const SwapResult& swap) {
    if (old_t.fingerprint() != cert_.tree_fingerprint) throw VersionMismatch("tracker is not positioned at old tree");
    check_stats(new_t, stats);
    if (!(swap.tree == new_t)) throw VersionMismatch("swap result does not match new tree");
    if (!cached_) {
        cert_ = theta_exact(*g_, new_t, stats, k_, options_);
        reevaluated_ = tuple_count(new_t.n() - 1, std::min<int>(k_, new_t.n() - 1));
        return cert_;
    }

    const Vertex n = new_t.n();
    const auto kk = static_cast<int>(offset_.size()) - 2;
    std::vector<bool> affected(static_cast<std::size_t>(n), false);
    for (Vertex a : swap.affected) affected[static_cast<std::size_t>(a)] = true;
    // Each set containing an affected vertex is visited once, from its
    // smallest affected member a.
    auto allowed = [&](Vertex v, Vertex a) { return v != a && v != 0 && (!affected[static_cast<std::size_t>(v)] || v > a); };

    reevaluated_ = 0;
    std::array<Vertex, 3> buf{};
    auto touch = [&](std::size_t size) {
        std::sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(size));
        const std::size_t slot = slot_of(std::span<const Vertex>(buf.data(), size));
        evaluate_slot(new_t, stats, slot);
        refresh_slot(slot);
        ++reevaluated_;
    };
    for (Vertex a : swap.affected) {
        if (a == 0) continue;
        buf = {a, 0, 0};
        touch(1);
        if (kk < 2) continue;
        for (Vertex b = 1; b < n; ++b) {
            if (!allowed(b, a)) continue;
            buf = {a, b, 0};
            touch(2);
            if (kk < 3) continue;
            for (Vertex c = b + 1; c < n; ++c) {
                if (!allowed(c, a)) continue;
                buf = {a, b, c};
                touch(3);
            }
        }
    }
    rebuild_certificate(new_t);
    return cert_;
}

VerifyReport verify_certificate(const WeightedGraph& g, const RootedTree& t, const Certificate& cert) {
    VerifyReport report;
    auto fail = [&](std::string what) {
        report.ok = false;
        report.failures.push_back(std::move(what));
    };
    if (cert.k < 1) fail("invalid k");
    if (!cert.graph_sha.empty() && cert.graph_sha != graph_sha256(g)) fail("graph mismatch");
    if (!cert.tree.empty() && cert.tree != t.child_parent_pairs()) fail("tree mismatch");
    try {
        CutSpec spec(t, cert.witness);
    } catch (const InvalidSpec& e) {
        fail(std::string("invalid spec: ") + e.what());
        return report;
    }

    // x is on the shore iff an odd number of witness endpoints lie on the
    // path from x to the root.
    std::vector<bool> endpoint(static_cast<std::size_t>(t.n()), false);
    for (Vertex v : cert.witness) endpoint[static_cast<std::size_t>(v)] = true;
    std::vector<bool> members(static_cast<std::size_t>(t.n()), false);
    for (Vertex x = 0; x < t.n(); ++x) {
        bool odd = false;
        for (Vertex y = x; y != t.root(); y = t.parent(y)) odd = odd != endpoint[static_cast<std::size_t>(y)];
        members[static_cast<std::size_t>(x)] = odd;
    }
    Weight weight = 0;
    for (const Edge& e : g.edges()) {
        if (members[static_cast<std::size_t>(e.u)] != members[static_cast<std::size_t>(e.v)]) weight += e.w;
    }
    std::int64_t crossings = 0;
    for (const auto& [child, parent] : t.child_parent_pairs()) {
        if (members[static_cast<std::size_t>(child)] != members[static_cast<std::size_t>(parent)]) ++crossings;
    }

    if (weight != cert.cut_weight) {
        fail("weight mismatch: witness cut weighs " + std::to_string(weight) + ", certificate says " +
             std::to_string(cert.cut_weight));
    }
    if (crossings != cert.crossings) {
        fail("crossings mismatch: witness crosses " + std::to_string(crossings) + " tree edges, certificate says " +
             std::to_string(cert.crossings));
    }
    if (weight == 0) {
        fail("zero-weight witness");
    } else if (cert.theta != Rational(crossings, weight)) {
        fail("theta mismatch: " + to_string(cert.theta) + " != " + to_string(Rational(crossings, weight)));
    }
    if (crossings > cert.k) fail("k exceeded");
    if (cert.lambda > 0 && cert.k >= 1 && cert.theta > cert.bound()) fail("bound violated: theta > k/lambda");
    return report;
}

nlohmann::json certificate_to_json(const Certificate& cert) {
    nlohmann::json j;
    j["k"] = cert.k;
    j["theta"] = {{"num", cert.theta.numerator()}, {"den", cert.theta.denominator()}};
    nlohmann::json witness = nlohmann::json::array();
    for (Vertex v : cert.witness) witness.push_back(v + 1);
    j["witness"] = witness;
    j["crossings"] = cert.crossings;
    j["cut_weight"] = cert.cut_weight;
    j["lambda"] = cert.lambda;
    if (cert.lambda > 0) {
        const Rational bound = cert.bound();
        j["k_over_lambda"] = {{"num", bound.numerator()}, {"den", bound.denominator()}};
    } else {
        j["k_over_lambda"] = nullptr;
    }
    j["graph_sha"] = cert.graph_sha;
    std::ostringstream fp;
    fp << std::hex << cert.tree_fingerprint;
    j["tree_fingerprint"] = fp.str();
    nlohmann::json tree = nlohmann::json::array();
    for (const auto& [child, parent] : cert.tree) tree.push_back({child + 1, parent + 1});
    j["tree"] = tree;
    return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
    try {
        Certificate cert;
        cert.k = j.at("k").get<int>();
        cert.theta = Rational(j.at("theta").at("num").get<std::int64_t>(), j.at("theta").at("den").get<std::int64_t>());
        for (const auto& v : j.at("witness")) cert.witness.push_back(v.get<Vertex>() - 1);
        cert.crossings = j.at("crossings").get<std::int64_t>();
        cert.cut_weight = j.at("cut_weight").get<Weight>();
        cert.lambda = j.value("lambda", Weight{0});
        cert.graph_sha = j.value("graph_sha", std::string{});
        if (j.contains("tree_fingerprint")) {
            cert.tree_fingerprint = std::stoull(j.at("tree_fingerprint").get<std::string>(), nullptr, 16);
        }
        if (j.contains("tree")) {
            for (const auto& pair : j.at("tree")) {
                cert.tree.emplace_back(pair.at(0).get<Vertex>() - 1, pair.at(1).get<Vertex>() - 1);
            }
        }
        return cert;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed certificate JSON: ") + e.what());
    } catch (const boost::bad_rational&) {
        throw Error("malformed certificate JSON: zero denominator");
    }
}

}  // namespace kthin
