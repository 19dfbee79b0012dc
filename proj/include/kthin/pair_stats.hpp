#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kthin/graph.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// Read-only view of a tau vector and a row-major n x n pi table. Cut
/// evaluation works against this view, so exact and sampled tables share
/// one code path.
struct PairTable {
    Vertex n = 0;
    std::span<const Weight> tau;
    std::span<const Weight> pi;

    Weight tau_at(Vertex u) const { return tau[static_cast<std::size_t>(u)]; }
    Weight pi_at(Vertex u, Vertex v) const {
        return pi[static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)];
    }
};

/// For a fixed (graph, tree):
///   tau(u)    = w(delta(D(u)))
///   pi(u,v)   = w(delta(D(u)) & delta(D(v)))
///   sigma(u,v)= w(delta(D(u) xor D(v))) = tau(u) + tau(v) - 2 pi(u,v)
struct PairStats {
    Vertex n = 0;
    std::vector<Weight> tau;
    std::vector<Weight> pi;     ///< n*n row-major
    std::vector<Weight> sigma;  ///< n*n row-major
    std::uint64_t tree_fingerprint = 0;

    Weight pi_at(Vertex u, Vertex v) const { return pi[cell(u, v)]; }
    Weight sigma_at(Vertex u, Vertex v) const { return sigma[cell(u, v)]; }
    PairTable view() const { return {n, tau, pi}; }

    std::size_t cell(Vertex u, Vertex v) const {
        return static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
    }

    friend bool operator==(const PairStats&, const PairStats&) = default;
};

/// Sparse coefficient table: pi(u,v) = sum_{x in Sub(u), y in Sub(v)} beta[x][y].
/// Each edge {a,b} with l = lca(a,b) contributes nine updates; they are
/// folded per row into sorted (column, value) buckets.
struct SparseBeta {
    Vertex n = 0;
    std::vector<std::vector<std::pair<Vertex, Weight>>> rows;

    Weight at(Vertex x, Vertex y) const;
    /// Sum of all coefficients.
    Weight total() const;
    std::size_t nonzeros() const;
};

/// Offline accumulation: +w at a and b, -2w at lca(a,b), then subtree sums.
std::vector<Weight> build_tau(const WeightedGraph& g, const RootedTree& t);

SparseBeta build_beta(const WeightedGraph& g, const RootedTree& t);

/// RowSum / ColSum bottom-up passes followed by the four-part F recurrence
///   F(u,v) = beta[u,v] + sum_{p in ch(u)} RowSum(p,v) + sum_{q in ch(v)} ColSum(u,q)
///          + sum_{p in ch(u)} sum_{q in ch(v)} F(p,q),
/// evaluated children-first. O(n^2) time, returns F = pi row-major.
std::vector<Weight> build_pi(const RootedTree& t, const SparseBeta& beta);

/// sigma = tau(u) + tau(v) - 2 pi(u,v). Throws ConsistencyFault on a
/// negative entry.
std::vector<Weight> assemble_sigma(std::span<const Weight> tau, std::span<const Weight> pi);

PairStats build_pair_stats(const WeightedGraph& g, const RootedTree& t);

struct UpdateReport {
    std::size_t touched = 0;   ///< pi cells written (sigma mirrors pi)
    bool full_rebuild = false;
};

/// Brings `stats` (built for old_t) up to date for new_t = old_t - e + f.
/// Rows and columns of the affected vertices are recomputed by re-running
/// the path accumulation restricted to the edges crossing each affected
/// descendant set; all other entries are untouched. Falls back to a full
/// rebuild when the cycle has more than n/4 vertices. Throws
/// VersionMismatch if stats were not built for old_t.
UpdateReport update_after_swap(PairStats& stats, const WeightedGraph& g, const RootedTree& old_t,
                               const RootedTree& new_t, const SwapResult& swap);

/// Binary dump: "KTHNSIG1", u32 version (1), u32 n, then tau[n], pi[n*n],
/// sigma[n*n] as little-endian int64.
void write_pair_stats(std::ostream& out, const PairStats& stats);
PairStats read_pair_stats(std::istream& in);

}  // namespace kthin
