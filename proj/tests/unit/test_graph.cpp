#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fjstooges/errors.hpp"
#include "fjstooges/fixtures.hpp"
#include "fjstooges/generators.hpp"
#include "fjstooges/graph.hpp"

using namespace fj;

namespace {

std::set<Edge> edge_set(const UndirectedGraph& g) { return {g.edges().begin(), g.edges().end()}; }

double column_sum(const InfluenceMatrix& w, NodeId v) {
    double s = 0.0;
    for (const auto& e : w.influencers(v)) s += e.weight;
    return s;
}

} // namespace

TEST_CASE("undirected graph normalizes and dedupes edges") {
    UndirectedGraph g(4, {{1, 0}, {0, 1}, {2, 3}, {3, 2}, {1, 2}});
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 3);
    CHECK(edge_set(g) == std::set<Edge>{{0, 1}, {1, 2}, {2, 3}});
    CHECK(g.degree(1) == 2);
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(0, 3));
    const auto nb = g.neighbors(1);
    CHECK(std::vector<NodeId>(nb.begin(), nb.end()) == std::vector<NodeId>{0, 2});
}

TEST_CASE("undirected graph rejects self-loops and out-of-range endpoints") {
    CHECK_THROWS_AS(UndirectedGraph(3, {{1, 1}}), DataError);
    CHECK_THROWS_AS(UndirectedGraph(3, {{0, 3}}), DataError);
}

TEST_CASE("influence from a path of two nodes") {
    const auto w = influence_from_undirected(UndirectedGraph(2, {{0, 1}}));
    CHECK(w.weight(0, 1) == doctest::Approx(1.0));
    CHECK(w.weight(1, 0) == doctest::Approx(1.0));
    CHECK(w.weight(0, 0) == 0.0);
}

TEST_CASE("influence from a triangle is one half everywhere off the diagonal") {
    const auto w = influence_from_undirected(UndirectedGraph(3, {{0, 1}, {1, 2}, {0, 2}}));
    for (NodeId u = 0; u < 3; ++u) {
        for (NodeId v = 0; v < 3; ++v) CHECK(w.weight(u, v) == doctest::Approx(u == v ? 0.0 : 0.5));
    }
}

TEST_CASE("influence from a star with three leaves") {
    // Center column: each leaf influences the center with 1/3. Leaf column: the center with 1.
    const auto w = influence_from_undirected(gen_star(3));
    CHECK(w.influencers(0).size() == 3);
    for (const auto& e : w.influencers(0)) CHECK(e.weight == doctest::Approx(1.0 / 3.0));
    for (NodeId leaf = 1; leaf <= 3; ++leaf) {
        REQUIRE(w.influencers(leaf).size() == 1);
        CHECK(w.influencers(leaf)[0].node == 0);
        CHECK(w.influencers(leaf)[0].weight == doctest::Approx(1.0));
        CHECK(w.influencees(leaf).size() == 1);
    }
}

TEST_CASE("isolated vertices get a unit self-loop") {
    const auto w = influence_from_undirected(UndirectedGraph(3, {{0, 1}}));
    CHECK(w.weight(2, 2) == 1.0);
    CHECK(column_sum(w, 2) == doctest::Approx(1.0));
}

TEST_CASE("influence matrix validates columns and merges duplicates") {
    CHECK_THROWS_AS(InfluenceMatrix(2, {{0, 1, 0.5}, {1, 0, 1.0}}), DataError);
    CHECK_THROWS_AS(InfluenceMatrix(2, {{0, 1, -1.0}, {1, 1, 2.0}, {1, 0, 1.0}}), DataError);
    CHECK_THROWS_AS(InfluenceMatrix(2, {{0, 2, 1.0}}), DataError);
    const InfluenceMatrix w(2, {{0, 1, 0.25}, {0, 1, 0.75}, {1, 0, 1.0}});
    CHECK(w.nonzeros() == 2);
    CHECK(w.weight(0, 1) == 1.0);
    CHECK(w.triplets().size() == 2);
}

TEST_CASE("columns of generated influence matrices sum to one") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto w = influence_from_undirected(gen_gnp(80, 0.1, seed));
        for (NodeId v = 0; v < 80; ++v) CHECK(std::abs(column_sum(w, v) - 1.0) <= 1e-12);
    }
}

TEST_CASE("opinion instance checks dimensions and resistance range") {
    const auto w = influence_from_undirected(UndirectedGraph(2, {{0, 1}}));
    CHECK_NOTHROW(OpinionInstance(w, {0.5, 0.5}, {0.0, 1.0}));
    CHECK_THROWS_AS(OpinionInstance(w, {0.5}, {0.0, 1.0}), DataError);
    CHECK_THROWS_AS(OpinionInstance(w, {0.5, 1.5}, {0.0, 1.0}), DataError);
    // Innate opinions outside [0, 1] are allowed for fixtures.
    CHECK_NOTHROW(OpinionInstance(w, {0.5, 0.5}, {-1.0, 2.0}));
}

TEST_CASE("support graph of a matrix") {
    const InfluenceMatrix w(3, {{0, 1, 1.0}, {1, 0, 0.5}, {2, 0, 0.5}, {2, 2, 1.0}});
    const auto g = support_graph(w);
    CHECK(edge_set(g) == std::set<Edge>{{0, 1}, {0, 2}});
}

TEST_CASE("gnp extremes") {
    CHECK(gen_gnp(5, 0.0, 3).edge_count() == 0);
    CHECK(gen_gnp(5, 1.0, 3).edge_count() == 10);
    CHECK(edge_set(gen_gnp(40, 0.2, 11)) == edge_set(gen_gnp(40, 0.2, 11)));
}

TEST_CASE("gnp edge count stays within four standard deviations") {
    const double pairs = 1000.0 * 999.0 / 2.0;
    const double mean = 0.05 * pairs;
    const double sd = std::sqrt(pairs * 0.05 * 0.95);
    for (std::uint64_t seed : {1, 2}) {
        const auto m = static_cast<double>(gen_gnp(1000, 0.05, seed).edge_count());
        CHECK(std::abs(m - mean) <= 4 * sd);
    }
}

TEST_CASE("communities have the fixed layout") {
    const CommunityConfig cfg;
    const auto g = gen_communities(7);
    CHECK(g.node_count() == 300);
    std::size_t big_internal = 0;
    for (const auto& [u, v] : g.edges()) {
        const auto cu = cfg.community_of(u);
        const auto cv = cfg.community_of(v);
        if (cu != 0 && cv != 0) CHECK(cu == cv);
        if (cu == 0 && cv == 0) ++big_internal;
    }
    const double pairs = 200.0 * 199.0 / 2.0;
    CHECK(std::abs(static_cast<double>(big_internal) - 0.5 * pairs) <= 4 * std::sqrt(pairs * 0.25));
    CHECK(cfg.community_of(199) == 0);
    CHECK(cfg.community_of(200) == 1);
    CHECK(cfg.community_of(299) == 10);
}

TEST_CASE("prufer decoding of a known sequence") {
    const std::vector<NodeId> seq{3, 3, 3, 4};
    const auto g = prufer_decode(seq, 6);
    CHECK(edge_set(g) == std::set<Edge>{{0, 3}, {1, 3}, {2, 3}, {3, 4}, {4, 5}});
    CHECK(prufer_decode(std::vector<NodeId>{}, 2).edge_count() == 1);
}

TEST_CASE("prufer decoding rejects malformed input") {
    CHECK_THROWS_AS(prufer_decode(std::vector<NodeId>{0, 1}, 3), DataError);
    CHECK_THROWS_AS(prufer_decode(std::vector<NodeId>{5}, 3), DataError);
    CHECK_THROWS_AS(prufer_decode(std::vector<NodeId>{}, 1), DataError);
}

TEST_CASE("prufer decoding is a bijection onto the 16 labeled trees on 4 nodes") {
    std::set<std::set<Edge>> trees;
    for (NodeId a = 0; a < 4; ++a) {
        for (NodeId b = 0; b < 4; ++b) {
            const auto g = prufer_decode(std::vector<NodeId>{a, b}, 4);
            CHECK(g.edge_count() == 3);
            CHECK(is_connected(g));
            trees.insert(edge_set(g));
        }
    }
    CHECK(trees.size() == 16);
}

TEST_CASE("random trees on 3 nodes are close to uniform") {
    std::map<NodeId, int> center;
    const int draws = 3000;
    for (int i = 0; i < draws; ++i) {
        const auto g = gen_random_tree(3, static_cast<std::uint64_t>(i));
        for (NodeId v = 0; v < 3; ++v) {
            if (g.degree(v) == 2) ++center[v];
        }
    }
    // Each of the 3 trees has probability 1/3; allow 5 standard deviations.
    const double sd = std::sqrt(draws * (1.0 / 3) * (2.0 / 3));
    for (NodeId v = 0; v < 3; ++v) CHECK(std::abs(center[v] - draws / 3.0) <= 5 * sd);
}

TEST_CASE("random trees are connected with n - 1 edges") {
    const auto g = gen_random_tree(1000, 5);
    CHECK(g.edge_count() == 999);
    CHECK(is_connected(g));
}

TEST_CASE("star and grid") {
    const auto s = gen_star(presets::kStarLeaves);
    CHECK(s.node_count() == 151);
    CHECK(s.degree(0) == 150);
    const auto g = gen_grid(presets::kGridRows, presets::kGridCols);
    CHECK(g.node_count() == 50);
    CHECK(g.edge_count() == 10 * 4 + 9 * 5);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(0, 5));
    CHECK_FALSE(g.has_edge(4, 5));
}

TEST_CASE("bfs distances and connectivity") {
    const UndirectedGraph g(5, {{0, 1}, {1, 2}, {3, 4}});
    const std::vector<NodeId> src{0};
    const auto d = bfs_distances(g, src);
    CHECK(d[0] == 0);
    CHECK(d[2] == 2);
    CHECK(d[3] == kUnreachable);
    CHECK_FALSE(is_connected(g));
    const std::vector<NodeId> two{0, 4};
    CHECK(bfs_distances(g, two)[3] == 1);
}

TEST_CASE("opinion sampling") {
    const auto a = sample_opinions(5000, ClippedNormal{}, 3);
    CHECK(std::all_of(a.begin(), a.end(), [](double x) { return x >= 0.0 && x <= 1.0; }));
    CHECK(a == sample_opinions(5000, ClippedNormal{}, 3));
    const auto u = sample_opinions(5000, Uniform{0.0, 1.0}, 4);
    double mean = 0.0;
    double var = 0.0;
    for (double x : u) mean += x;
    mean /= 5000.0;
    for (double x : u) var += (x - mean) * (x - mean);
    var /= 5000.0;
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.05));
    const auto e = sample_opinions(5000, Exponential{2.0}, 5);
    CHECK(std::all_of(e.begin(), e.end(), [](double x) { return x >= 0.0; }));
}

TEST_CASE("nonsubmodular fixture layout") {
    const auto fx = gen_fixture(NonSubmodularSpec{10, 0.5});
    const auto& inst = fx.instance;
    CHECK(inst.size() == 22);
    CHECK(fx.first == 20);
    CHECK(fx.second == 21);
    CHECK(inst.resistance[0] == 1.0);
    CHECK(inst.resistance[10] == 0.0);
    CHECK(inst.resistance[fx.first] == doctest::Approx(0.5));
    CHECK(inst.innate[fx.first] == 1.0);
    CHECK(inst.innate[fx.second] == -1.0);
    CHECK(inst.influence.weight(fx.first, 12) == doctest::Approx(0.5));
    CHECK(inst.influence.weight(fx.second, 12) == doctest::Approx(0.5));
    CHECK(inst.influence.weight(fx.first, fx.second) == 1.0);
    CHECK(inst.influence.weight(fx.second, fx.first) == 1.0);
    CHECK_THROWS_AS(gen_fixture(NonSubmodularSpec{0, 0.5}), DataError);
    CHECK_THROWS_AS(gen_fixture(NonSubmodularSpec{10, 1.0}), DataError);
}

TEST_CASE("lollipop fixture layout") {
    const auto fx = gen_fixture(LollipopSpec{20, 30, 0.5});
    CHECK(fx.instance.size() == 50);
    CHECK(fx.first == 20);
    CHECK(fx.second == 35);
    CHECK(fx.graph.has_edge(19, 20));
    CHECK(fx.graph.edge_count() == 190 + 29 + 1);
    CHECK(fx.instance.innate[fx.first] == 1.0);
    CHECK(fx.instance.innate[fx.second] == 1.0);
    CHECK(fx.instance.resistance[fx.first] == 0.0);
    CHECK(fx.instance.resistance[0] == 0.5);
    CHECK_THROWS_AS(gen_fixture(LollipopSpec{2, 30, 0.5}), DataError);
    CHECK_THROWS_AS(gen_fixture(LollipopSpec{20, 2, 0.5}), DataError);
}
