#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kthin/approx.hpp"
#include "kthin/certificate.hpp"
#include "kthin/graph.hpp"
#include "kthin/tree.hpp"

namespace kthin {

enum class SearchMode { exact, screened };
SearchMode parse_search_mode(std::string_view name);
std::string_view to_string(SearchMode mode);

struct SearchOptions {
    int k = 2;
    std::size_t iterations = 100;  ///< B
    SearchMode mode = SearchMode::exact;
    ApproxParams approx;           ///< screened mode only
    std::uint64_t seed = 1;
    std::uint64_t budget = 50'000'000;  ///< endpoint sets per evaluation
    unsigned workers = 0;
    bool random_start = false;     ///< random spanning tree instead of the unit-weight MST
    bool check_tables = true;      ///< compare incremental state with fresh rebuilds at each accept
};

struct TraceStep {
    std::size_t iteration = 0;
    SwapMove move;
    Rational before{0};
    Rational after{0};
};

struct SearchTrace {
    int k = 0;
    SearchMode mode = SearchMode::exact;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<EdgeId> initial_tree;
    Rational initial_score{0};
    std::vector<TraceStep> accepts;
    Rational final_score{0};
    std::string seeding = "full";  ///< candidate endpoint sets: every set of size <= k
    std::size_t evaluated = 0;          ///< candidate swaps scored exactly
    std::size_t screened_out = 0;       ///< rejected by the envelope rule
    std::size_t screen_false_accepts = 0;  ///< passed screening, failed exact validation
};

struct SearchResult {
    RootedTree tree;
    Certificate certificate;  ///< recomputed from scratch for the final tree
    SearchTrace trace;
};

/// Local search over single-edge swaps. Each iteration draws a non-tree edge
/// f, scans the tree edges e of its cycle in edge-id order and commits the
/// first T - e + f with strictly smaller Theta_k (exactly validated).
/// Screened mode first requires upper(T') < lower(T) on sampled envelopes.
SearchResult thin_search(const WeightedGraph& g, const SearchOptions& options);

struct ReplayReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Re-applies every recorded swap from the initial tree and recomputes
/// Theta_k from scratch at each step; checks recorded scores, strict
/// descent and the final score.
ReplayReport replay_trace(const WeightedGraph& g, const SearchTrace& trace,
                          std::uint64_t budget = 50'000'000);

/// Edge ids are written 1-based, with their endpoints for readability.
nlohmann::json trace_to_json(const WeightedGraph& g, const SearchTrace& trace);
SearchTrace trace_from_json(const nlohmann::json& j);

}  // namespace kthin
