#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kthin/certificate.hpp"
#include "kthin/graph.hpp"
#include "kthin/packing.hpp"
#include "kthin/pair_stats.hpp"
#include "kthin/tree.hpp"

namespace kthin {

/// Cyclic order of incident edge ids around each vertex (0-based ids).
struct RotationSystem {
    std::vector<std::vector<EdgeId>> order;

    Vertex n() const noexcept { return static_cast<Vertex>(order.size()); }
};

/// "r <v> <e_1> <e_2> ..." per vertex, 1-based vertex and edge ids; '#'
/// starts a comment. Vertices without a line get an empty rotation.
RotationSystem parse_rotation(const WeightedGraph& g, std::string_view text);
RotationSystem read_rotation_file(const WeightedGraph& g, const std::string& path);
std::string serialize_rotation(const RotationSystem& rot);

/// Counter-clockwise order of incident edges around each vertex of a
/// straight-line drawing.
RotationSystem rotation_from_positions(const WeightedGraph& g, std::span<const std::pair<double, double>> positions);

/// Embedding of grid_graph(rows, cols) in the plane.
RotationSystem grid_rotation(Vertex rows, Vertex cols);

/// Straight-line embedding of generate(kind, n) for cycle, grid and wheel;
/// nullopt for the other kinds.
std::optional<RotationSystem> generated_rotation(GraphKind kind, Vertex n);

/// Throws Error unless every edge end appears exactly once, at its own
/// endpoints ("dangling edge end" for a missing one).
void validate_rotation(const WeightedGraph& g, const RotationSystem& rot);

struct FaceTrace {
    std::int32_t faces = 0;
    /// Face of dart 2e (u -> v) and dart 2e+1 (v -> u), with u < v.
    std::vector<std::int32_t> face_of_dart;
};

/// Faces of the embedding: the successor of a dart arriving at h along e
/// leaves h along the edge after e in h's rotation.
FaceTrace trace_faces(const WeightedGraph& g, const RotationSystem& rot);

/// gamma with n - m + f = 2 - 2 gamma (connected graphs). Throws Error if
/// the count is not a nonnegative integer.
int embedding_genus(const WeightedGraph& g, const RotationSystem& rot);

struct DualEdge {
    std::int32_t a = 0;  ///< face left of dart 2e
    std::int32_t b = 0;  ///< face left of dart 2e+1
    Weight w = 0;
};

/// Faces as vertices; dual edge i crosses primal edge i.
struct DualGraph {
    std::int32_t faces = 0;
    std::vector<DualEdge> edges;

    bool is_connected() const;
};

/// Throws Error("not a planar embedding") when n - m + f != 2.
DualGraph build_dual(const WeightedGraph& g, const RotationSystem& rot);

/// Minimum (weighted or unit-length) cycle of the dual: for each dual edge,
/// shortest path between its ends avoiding it, plus its length. Loops and
/// parallel pairs are cycles. Throws Error when the dual has no edge.
Weight dual_girth(const DualGraph& dual, bool weighted, unsigned workers = 0);

struct PlanarReport {
    int k = 0;
    std::int32_t faces = 0;
    Weight girth = 0;           ///< g*
    Weight weighted_girth = 0;  ///< g*_w
    Weight lambda = 0;
    Certificate certificate;    ///< Theta_k(T) from theta_exact
    Rational bound{0};          ///< k / g*, valid when every weight is >= 1
    Rational weighted_bound{0}; ///< k / g*_w
    bool unit_weights = false;
    bool positive_weights = false;
    bool holds = false;         ///< theta <= every applicable bound
};

PlanarReport planar_certified_bound(const WeightedGraph& g, const RotationSystem& rot, const RootedTree& t, int k,
                                    const PairStats& stats, const ThetaOptions& options = {});

enum class SurfaceRegime { general, planar, genus, tradeoff };
SurfaceRegime parse_surface_regime(std::string_view name);
std::string_view to_string(SurfaceRegime regime);

/// Constants of the tradeoff regime: k = ceil(c alpha), s = ceil(c' (log n + log(1/eta))).
inline constexpr double kTradeoffC = 4;
inline constexpr double kTradeoffCPrime = 4;

/// general: coverage_params. planar/genus: same k, s = ceil(3 ((alpha +
/// gamma) log n + log(1/eta))), gamma = 0 for planar. tradeoff: see above.
CoverageParams surface_params(Vertex n, double alpha, double eta, double gamma, SurfaceRegime regime,
                              LogBase base = LogBase::natural);

}  // namespace kthin
