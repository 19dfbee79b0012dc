#include "kthin/approx.hpp"

#include <algorithm>
#include <cmath>

#include "kthin/certificate.hpp"
#include "kthin/cut_eval.hpp"
#include "kthin/error.hpp"
#include "kthin/rng.hpp"
#include "kthin/tuples.hpp"

namespace kthin {

namespace {

constexpr std::int64_t kProbabilityDen = std::int64_t{1} << 20;

void check_params(const ApproxParams& params) {
    if (!(params.eps > 0 && params.eps < 1)) throw Error("eps must lie in (0, 1)");
    if (!(params.delta > 0 && params.delta < 1)) throw Error("delta must lie in (0, 1)");
    if (!(params.c > 0)) throw Error("sampling constant c must be positive");
    if (params.rounds < 1) throw Error("at least one sampling round is required");
}

}  // namespace

std::int64_t c_k(int k) {
    if (k < 1 || k > 39) throw Error("c_k defined here for 1 <= k <= 39");
    std::int64_t power = 1;
    for (int i = 0; i < k; ++i) power *= 3;
    return (power - 1) / 2;
}

Rational eps_rational(double eps) { return Rational(static_cast<std::int64_t>(std::llround(eps * 1e4)), 10'000); }

Rational sampling_probability(const ApproxParams& params, Vertex n, EdgeId m) {
    check_params(params);
    if (m <= 0) return Rational(1);
    const double p = params.c * std::log(static_cast<double>(n) / params.delta) /
                     (params.eps * params.eps * static_cast<double>(m));
    if (p >= 1) return Rational(1);
    const auto num = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(p * static_cast<double>(kProbabilityDen))));
    return Rational(num, kProbabilityDen);
}

ApproxStats sample_round(const WeightedGraph& g, const RootedTree& t, const Rational& p, std::uint64_t seed) {
    CounterRng rng(seed, 0x73616d706c65);
    std::vector<Edge> kept;
    const std::int64_t threshold = (p * Rational(kProbabilityDen)).numerator();
    const bool exact_den = (p * Rational(kProbabilityDen)).denominator() == 1;
    if (!exact_den) throw Error("sampling probability must be a multiple of 2^-20");
    for (const Edge& e : g.edges()) {
        if (static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(kProbabilityDen))) < threshold) {
            kept.push_back(e);
        }
    }
    const WeightedGraph sampled(g.n(), kept);
    ApproxStats out;
    out.n = g.n();
    out.p = p;
    out.seed = seed;
    out.tau = build_tau(sampled, t);
    out.pi = build_pi(t, build_beta(sampled, t));
    out.tree_fingerprint = t.fingerprint();
    return out;
}

ApproxStats build_approx_stats(const WeightedGraph& g, const RootedTree& t, const ApproxParams& params,
                               std::uint64_t seed, unsigned workers) {
    const Rational p = sampling_probability(params, g.n(), g.m());
    std::vector<ApproxStats> rounds(static_cast<std::size_t>(params.rounds));
    const CounterRng root(seed, 0x726f756e6473);
    parallel_tasks(rounds.size(), workers, [&](std::size_t r, unsigned) {
        CounterRng stream = root.split(r);
        rounds[r] = sample_round(g, t, p, stream());
    });

    ApproxStats out;
    out.n = g.n();
    out.p = p;
    out.params = params;
    out.seed = seed;
    out.tree_fingerprint = t.fingerprint();
    std::vector<Weight> column(rounds.size());
    auto median = [&](auto&& pick) {
        for (std::size_t r = 0; r < rounds.size(); ++r) column[r] = pick(rounds[r]);
        const auto mid = column.begin() + static_cast<std::ptrdiff_t>((column.size() - 1) / 2);
        std::nth_element(column.begin(), mid, column.end());
        return *mid;
    };
    const auto n = static_cast<std::size_t>(g.n());
    out.tau.resize(n);
    out.pi.resize(n * n);
    for (std::size_t u = 0; u < n; ++u) out.tau[u] = median([&](const ApproxStats& s) { return s.tau[u]; });
    for (std::size_t c = 0; c < n * n; ++c) out.pi[c] = median([&](const ApproxStats& s) { return s.pi[c]; });
    return out;
}

bool sigma_within(const PairStats& exact, const ApproxStats& approx, const Rational& eps) {
    for (Vertex u = 0; u < exact.n; ++u) {
        for (Vertex v = 0; v < exact.n; ++v) {
            if (u == v) continue;
            const Rational sigma(exact.sigma_at(u, v));
            const Rational est = approx.sigma_hat(u, v);
            if (est < (Rational(1) - eps) * sigma || est > (Rational(1) + eps) * sigma) return false;
        }
    }
    return true;
}

ThetaEnvelope theta_envelope(const WeightedGraph& g, const RootedTree& t, const ApproxStats& approx, int k,
                             std::uint64_t budget, unsigned workers) {
    if (k < 1) throw InvalidSpec("k must be at least 1");
    if (approx.tree_fingerprint != t.fingerprint() || approx.n != t.n()) {
        throw VersionMismatch("approximate statistics belong to a different tree");
    }
    const int kk = std::min<int>(k, t.n() - 1);
    const std::uint64_t count = tuple_count(t.n() - 1, kk);
    if (count > budget) throw BudgetExceeded(std::to_string(count) + " endpoint sets exceed the budget");

    Weight min_weight = 0;
    for (const Edge& e : g.edges()) {
        if (e.w > 0 && (min_weight == 0 || e.w < min_weight)) min_weight = e.w;
    }
    // The estimate for a tuple is S / p with S its sampled sum. A clamped
    // tuple takes the floor p * min_weight instead, i.e. S = p^2 * min_weight.
    const Rational floor_sum = approx.p * approx.p * Rational(min_weight);

    const unsigned pool = resolve_workers(workers);
    std::vector<std::uint8_t> degraded(pool, 0);
    std::vector<Rational> best_value(pool, Rational(-1));
    std::vector<std::vector<Vertex>> best_ids(pool);
    enumerate_tuples(t, kk, pool, [&](std::span<const Vertex> endpoints, unsigned worker) {
        const Weight sum = evaluate_endpoints(t, approx.view(), endpoints);
        const auto size = static_cast<std::int64_t>(endpoints.size());
        Rational ratio;
        if (sum <= 0) {
            degraded[worker] = 1;
            ratio = Rational(size) * approx.p / floor_sum;
        } else {
            ratio = Rational(size) * approx.p / Rational(sum);
        }
        if (ratio < best_value[worker]) return;
        std::vector<Vertex> ids(endpoints.begin(), endpoints.end());
        std::sort(ids.begin(), ids.end());
        if (ratio == best_value[worker] && (size > static_cast<std::int64_t>(best_ids[worker].size()) ||
                                            (size == static_cast<std::int64_t>(best_ids[worker].size()) && ids >= best_ids[worker]))) {
            return;
        }
        best_value[worker] = ratio;
        best_ids[worker] = std::move(ids);
    });

    ThetaEnvelope env;
    env.k = k;
    env.c_k = c_k(kk);
    env.eps = eps_rational(approx.params.eps);
    std::size_t winner = 0;
    for (std::size_t w = 1; w < pool; ++w) {
        const bool better = best_value[w] > best_value[winner] ||
                            (best_value[w] == best_value[winner] &&
                             (best_ids[w].size() < best_ids[winner].size() ||
                              (best_ids[w].size() == best_ids[winner].size() && best_ids[w] < best_ids[winner])));
        if (better) winner = w;
    }
    env.theta_hat = best_value[winner];
    env.witness = best_ids[winner];
    env.degraded = std::any_of(degraded.begin(), degraded.end(), [](std::uint8_t d) { return d != 0; });
    const Rational spread = Rational(env.c_k) * env.eps;
    env.lower = std::max(Rational(0), env.theta_hat * (Rational(1) - spread));
    env.upper = env.theta_hat * (Rational(1) + spread);
    return env;
}

ScreenDecision screen_swap(const ThetaEnvelope& current, const ThetaEnvelope& candidate) {
    if (current.degraded || candidate.degraded) return ScreenDecision::reject;
    return candidate.upper < current.lower ? ScreenDecision::accept_and_validate : ScreenDecision::reject;
}

}  // namespace kthin
