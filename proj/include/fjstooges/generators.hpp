#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fjstooges/graph.hpp"

namespace fj {

/// Erdos-Renyi G(n, p).
UndirectedGraph gen_gnp(std::size_t n, double p, std::uint64_t seed);

/// Stochastic block model with one big community and several small ones.
/// Small communities attach only to the big one, never to each other.
struct CommunityConfig {
    std::size_t big_size = 200;
    std::size_t small_count = 10;
    std::size_t small_size = 10;
    double p_intra = 0.5;
    double p_inter = 0.3;

    std::size_t node_count() const { return big_size + small_count * small_size; }
    /// Community label of a node: 0 for the big community, 1..small_count otherwise.
    std::size_t community_of(NodeId v) const;
};

UndirectedGraph gen_communities(std::uint64_t seed, const CommunityConfig& config = {});

/// Standard Prufer decoding. Requires n >= 2 and seq.size() == n - 2.
UndirectedGraph prufer_decode(std::span<const NodeId> seq, std::size_t n);

/// Uniformly random labeled tree on n >= 2 nodes.
UndirectedGraph gen_random_tree(std::size_t n, std::uint64_t seed);

/// Node 0 is the center.
UndirectedGraph gen_star(std::size_t leaves);

/// 4-neighbor lattice; node id = row * cols + col.
UndirectedGraph gen_grid(std::size_t rows, std::size_t cols);

namespace presets {
inline constexpr std::size_t kStarLeaves = 150;
inline constexpr std::size_t kGridRows = 10;
inline constexpr std::size_t kGridCols = 5;
inline constexpr double kGnpP = 0.05;
inline constexpr double kDefaultResistance = 0.5;
} // namespace presets

struct ClippedNormal {
    double mean = 0.5;
    double variance = 0.5;
};
struct Uniform {
    double low = 0.0;
    double high = 1.0;
};
struct Exponential {
    double rate = 1.0;
};
using OpinionDistribution = std::variant<ClippedNormal, Uniform, Exponential>;

/// i.i.d. innate opinions. Only the clipped normal is clamped to [0, 1].
std::vector<double> sample_opinions(std::size_t n, const OpinionDistribution& dist, std::uint64_t seed);

} // namespace fj
