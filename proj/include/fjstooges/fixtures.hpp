#pragma once

#include <cstddef>
#include <variant>

#include "fjstooges/graph.hpp"

namespace fj {

// Counterexample instances showing the objectives are neither submodular nor
// supermodular in the stooge set.

/// K_l (alpha = 1, s = 0) padded with an empty graph on l nodes (alpha = 0,
/// s = 0). Each empty-graph node is influenced half by v and half by w;
/// v (alpha = 1 - beta, s = 1) and w (alpha = 1 - beta, s = -1) influence
/// each other. Layout: clique [0, l), empty graph [l, 2l), v = 2l, w = 2l + 1.
struct NonSubmodularSpec {
    std::size_t ell = 1000;
    double beta = 0.5;
};

/// Clique K_n (alpha = clique_resistance, s = 0) joined to a path P_m
/// (alpha = 0). The path node next to the clique and one interior path node
/// carry s = 1, all others s = 0. Layout: clique [0, n), path [n, n + m)
/// with node n adjacent to clique node n - 1.
struct LollipopSpec {
    std::size_t clique_size = 20;
    std::size_t path_length = 30;
    double clique_resistance = 0.5;
};

using FixtureSpec = std::variant<NonSubmodularSpec, LollipopSpec>;

struct Fixture {
    OpinionInstance instance;
    UndirectedGraph graph; // undirected support of W
    NodeId first;          // v for nonsubmod, the path node touching the clique for lollipop
    NodeId second;         // w for nonsubmod, the interior path node for lollipop
};

/// Throws DataError on invalid parameters (ell >= 1, 0 < beta < 1; n, m >= 3).
Fixture gen_fixture(const FixtureSpec& spec);

} // namespace fj
