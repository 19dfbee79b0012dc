#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kthin/graph.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/rational.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// Exact k-restricted thinness of a tree with a witnessing cut.
struct Certificate {
    int k = 0;
    Rational theta{0};
    std::vector<Vertex> witness;  ///< endpoints, ascending vertex ids
    std::int64_t crossings = 0;
    Weight cut_weight = 0;
    Weight lambda = 0;
    std::uint64_t tree_fingerprint = 0;
    std::string graph_sha;
    std::vector<std::pair<Vertex, Vertex>> tree;  ///< (child, parent)

    /// k / lambda; only meaningful when lambda > 0.
    Rational bound() const { return {k, lambda}; }

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct ThetaOptions {
    std::uint64_t budget = 50'000'000;  ///< max endpoint sets to evaluate
    unsigned workers = 0;               ///< 0 = available parallelism
    std::optional<Weight> lambda;       ///< skips the min-cut computation
    std::optional<std::string> graph_sha;
};

/// Ranking used everywhere a maximizer is chosen: larger ratio first, then
/// fewer crossings, then the lexicographically smaller sorted endpoint list.
struct Candidate {
    std::int64_t t = 0;
    Weight w = 0;
    std::vector<Vertex> ids;

    bool empty() const { return t == 0; }
};
bool better_candidate(const Candidate& a, const Candidate& b);

/// Max over all endpoint sets of size 1..min(k, n-1) of t / evaluate_cut.
/// Throws UnboundedCertificate on a zero-weight cut and BudgetExceeded when
/// the number of sets exceeds options.budget. Asserts theta <= k/lambda.
Certificate theta_exact(const WeightedGraph& g, const RootedTree& t, const PairStats& stats, int k,
                        const ThetaOptions& options = {});

/// Keeps Theta_k current across swaps. For k <= 3 every endpoint set's cut
/// weight is cached with a max-tree over the sets; after a swap only the sets
/// that contain an affected vertex are re-evaluated. Larger k recomputes.
class ThetaTracker {
public:
    ThetaTracker(const WeightedGraph& g, const RootedTree& t, const PairStats& stats, int k,
                 const ThetaOptions& options = {});

    const Certificate& certificate() const noexcept { return cert_; }
    bool cached() const noexcept { return cached_; }
    /// Endpoint sets re-evaluated by the last update.
    std::size_t reevaluated() const noexcept { return reevaluated_; }

    /// `stats` must already describe new_t (see update_after_swap). Throws
    /// VersionMismatch if the tracker was not positioned at old_t or the
    /// stats belong to another tree.
    const Certificate& apply_swap(const RootedTree& old_t, const RootedTree& new_t, const PairStats& stats,
                                  const SwapResult& swap);

private:
    void evaluate_slot(const RootedTree& t, const PairStats& stats, std::size_t slot);
    void refresh_slot(std::size_t slot);
    void pull(std::size_t node);
    Candidate slot_candidate(std::uint32_t slot) const;
    void rebuild_certificate(const RootedTree& t);
    std::size_t slot_of(std::span<const Vertex> sorted_ids) const;

    const WeightedGraph* g_;
    int k_;
    ThetaOptions options_;
    Certificate cert_;
    bool cached_ = false;
    std::size_t reevaluated_ = 0;

    // Cache (k <= 3): slot -> endpoint ids (ascending, padded) and cut weight.
    std::vector<std::array<Vertex, 3>> ids_;
    std::vector<std::uint8_t> size_;
    std::vector<Weight> weight_;
    std::vector<std::size_t> offset_;  ///< first slot of each size
    std::vector<std::uint32_t> heap_;  ///< max-tree over slots
    std::size_t leaves_ = 0;
};

struct VerifyReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Rebuilds the witness shore from parent pointers, its weight by edge scan
/// and its tree crossings, then checks theta = crossings / weight,
/// crossings <= k and theta <= k / lambda. Maximality is not checked.
VerifyReport verify_certificate(const WeightedGraph& g, const RootedTree& t, const Certificate& cert);

/// Vertex ids are 1-based in JSON.
nlohmann::json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);

}  // namespace kthin
