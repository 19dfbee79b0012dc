#pragma once

#include <cstdint>
#include <vector>

#include "kthin/graph.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/rational.hpp"
#include "kthin/tree.hpp"

namespace kthin {

struct ApproxParams {
    double eps = 0.1;
    double delta = 0.1;
    double c = 3;
    int rounds = 5;
};

/// (3^k - 1) / 2 for 1 <= k <= 39.
std::int64_t c_k(int k);

/// p = min{1, c eps^-2 ln(n / delta) / m}, rounded down to a multiple of
/// 2^-20 (and at least 2^-20).
Rational sampling_probability(const ApproxParams& params, Vertex n, EdgeId m);

/// Tables of one edge-sampled reweighting, stored as sums of original weights
/// over the sampled edges; the estimate is the sum divided by p. Each cell
/// holds the lower median over the rounds for tau and pi, and sigma is
/// derived from those, so sigma = tau + tau - 2 pi holds exactly.
struct ApproxStats {
    Vertex n = 0;
    Rational p{1};
    ApproxParams params;
    std::uint64_t seed = 0;
    std::vector<Weight> tau;  ///< sampled sums
    std::vector<Weight> pi;   ///< sampled sums, n*n row-major
    std::uint64_t tree_fingerprint = 0;

    PairTable view() const { return {n, tau, pi}; }
    Rational tau_hat(Vertex u) const { return Rational(tau[static_cast<std::size_t>(u)]) / p; }
    Rational pi_hat(Vertex u, Vertex v) const { return Rational(pi[cell(u, v)]) / p; }
    Rational sigma_hat(Vertex u, Vertex v) const {
        return Rational(tau[static_cast<std::size_t>(u)] + tau[static_cast<std::size_t>(v)] - 2 * pi[cell(u, v)]) / p;
    }
    std::size_t cell(Vertex u, Vertex v) const {
        return static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
    }
};

/// Independent Bernoulli(p) edge sampling, `rounds` times (one rng stream per
/// round), entrywise median. p = 1 reproduces the exact tables.
ApproxStats build_approx_stats(const WeightedGraph& g, const RootedTree& t, const ApproxParams& params,
                               std::uint64_t seed, unsigned workers = 0);

/// One round with an explicit probability (used for unbiasedness checks).
ApproxStats sample_round(const WeightedGraph& g, const RootedTree& t, const Rational& p, std::uint64_t seed);

/// True iff every off-diagonal sigma_hat lies within (1 +- eps) sigma.
bool sigma_within(const PairStats& exact, const ApproxStats& approx, const Rational& eps);

struct ThetaEnvelope {
    int k = 0;
    Rational theta_hat{0};
    std::int64_t c_k = 0;
    Rational eps{0};
    Rational lower{0};  ///< theta_hat (1 - C_k eps), clamped at 0
    Rational upper{0};  ///< theta_hat (1 + C_k eps)
    bool degraded = false;  ///< some estimated cut weight was <= 0 and clamped
    std::vector<Vertex> witness;
};

/// Same enumeration as theta_exact over the sampled tables. An estimated
/// cut weight <= 0 is replaced by the floor p * (min positive edge weight)
/// and marks the envelope degraded.
ThetaEnvelope theta_envelope(const WeightedGraph& g, const RootedTree& t, const ApproxStats& approx, int k,
                             std::uint64_t budget = 50'000'000, unsigned workers = 0);

enum class ScreenDecision { accept_and_validate, reject };

/// Accept iff neither envelope is degraded and upper(T') < lower(T).
ScreenDecision screen_swap(const ThetaEnvelope& current, const ThetaEnvelope& candidate);

/// eps as an exact decimal fraction with denominator 10^4.
Rational eps_rational(double eps);

}  // namespace kthin
