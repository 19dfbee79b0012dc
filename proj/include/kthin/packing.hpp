#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kthin/certificate.hpp"
#include "kthin/graph.hpp"
#include "kthin/oracle.hpp"
#include "kthin/rational.hpp"
#include "kthin/rng.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// Fractional spanning-tree packing. Entry j carries an integer amount a_j;
/// its packing weight is p_j = a_j * scale, so P = scale * sum a_j and the
/// sampling distribution is a_j / sum a_j.
struct TreePacking {
    struct Entry {
        std::vector<EdgeId> edges;  ///< ascending
        std::int64_t amount = 0;
    };

    std::vector<Entry> entries;
    Rational scale{0};
    double eps = 0;       ///< accuracy actually used (may be below the request)
    std::size_t iterations = 0;

    std::int64_t total_amount() const;
    Rational weight(std::size_t j) const { return Rational(entries[j].amount) * scale; }
    Rational total() const { return Rational(total_amount()) * scale; }
    /// load(e) = sum of p_j over entries containing e.
    std::vector<Rational> load(const WeightedGraph& g) const;
    bool feasible(const WeightedGraph& g) const;
};

/// Multiplicative-weights packing: repeatedly add the minimum spanning tree
/// under lengths that grow exponentially with relative load (ties by edge
/// id), then rescale exactly so that every load fits its capacity. If the
/// result misses P >= (1 - eps) lambda / 2 the construction is repeated
/// with eps halved (at most four times). Throws DisconnectedGraph.
TreePacking build_packing(const WeightedGraph& g, double eps = 0.1);

/// Draws entry j with probability a_j / sum a_j.
RootedTree sample_tree(const WeightedGraph& g, const TreePacking& packing, CounterRng& rng);
std::size_t sample_index(const TreePacking& packing, CounterRng& rng);

/// Number of edges of `edges` crossing the shore.
std::int64_t crossings(const WeightedGraph& g, const std::vector<EdgeId>& edges, oracle::ShoreMask shore);

/// Exact E[|T cap delta(A)|] under the packing distribution.
Rational expected_crossings(const WeightedGraph& g, const TreePacking& packing, oracle::ShoreMask shore);

/// Exact Pr[|T cap delta(A)| > k] under the packing distribution.
Rational crossing_tail(const WeightedGraph& g, const TreePacking& packing, oracle::ShoreMask shore, std::int64_t k);

enum class LogBase { natural, two };
LogBase parse_log_base(std::string_view name);

struct CoverageParams {
    double alpha = 1;
    double eta = 0.5;
    int k = 0;
    int s = 0;
    LogBase base = LogBase::natural;
};

/// k = ceil(4 alpha log n), s = ceil(3 (alpha log n + log(1/eta))).
/// Throws Error unless alpha >= 1 and 0 < eta < 1.
CoverageParams coverage_params(Vertex n, double alpha, double eta, LogBase base = LogBase::natural);

struct EnsembleOptions {
    std::optional<int> k_override;
    std::optional<int> s_override;
    double packing_eps = 0.1;
    LogBase base = LogBase::natural;
    std::uint64_t budget = 50'000'000;
    unsigned workers = 0;
};

struct EnsembleCertificate {
    CoverageParams params;
    std::uint64_t seed = 0;
    Weight lambda = 0;
    Rational packing_total{0};
    std::size_t packing_entries = 0;
    std::vector<std::size_t> sampled;  ///< packing entry drawn per tree
    std::vector<Certificate> trees;
    bool heuristic = false;  ///< k was overridden

    Rational bound() const { return {params.k, lambda}; }
};

/// Packing, s i.i.d. tree draws (one rng stream per tree index) and an exact
/// certificate per tree.
EnsembleCertificate run_ensemble(const WeightedGraph& g, double alpha, double eta, std::uint64_t seed,
                                 const EnsembleOptions& options = {});

struct CoverageReport {
    struct Cut {
        oracle::ShoreMask shore = 0;
        Weight weight = 0;
        int tree = -1;  ///< first tree in which the cut is k-respecting, -1 if none
        std::int64_t crossings = 0;
        bool certified = false;  ///< crossings / weight <= Theta_k(T) <= k / lambda
    };
    std::vector<Cut> cuts;
    std::size_t uncovered = 0;
    std::size_t uncertified = 0;

    bool covered() const { return uncovered == 0; }
};

/// Checks every cut of weight <= alpha * lambda (exhaustive, n <= 20).
CoverageReport check_coverage(const WeightedGraph& g, const EnsembleCertificate& ensemble, double alpha);
/// Same over an explicit shore list.
CoverageReport check_coverage(const WeightedGraph& g, const EnsembleCertificate& ensemble,
                              const std::vector<oracle::ShoreMask>& shores);

nlohmann::json ensemble_to_json(const EnsembleCertificate& ensemble);
nlohmann::json coverage_to_json(const CoverageReport& report);
nlohmann::json packing_to_json(const WeightedGraph& g, const TreePacking& packing);

}  // namespace kthin
