#include "fjstooges/fixtures.hpp"

#include <vector>

#include "fjstooges/errors.hpp"

namespace fj {

namespace {

Fixture make_nonsubmodular(const NonSubmodularSpec& spec) {
    if (spec.ell < 1) throw DataError("nonsubmod fixture: ell must be >= 1");
    if (!(spec.beta > 0.0 && spec.beta < 1.0)) throw DataError("nonsubmod fixture: beta must lie in (0, 1)");

    const std::size_t ell = spec.ell;
    const std::size_t n = 2 * ell + 2;
    const auto v = static_cast<NodeId>(2 * ell);
    const auto w = static_cast<NodeId>(2 * ell + 1);

    std::vector<Influence> entries;
    entries.reserve(ell * ell + 2 * ell + 2);
    // The clique only talks to itself; with alpha = 1 it just pads the population with zeros.
    if (ell == 1) {
        entries.push_back({0, 0, 1.0});
    } else {
        const double share = 1.0 / static_cast<double>(ell - 1);
        for (NodeId a = 0; a < ell; ++a) {
            for (NodeId b = 0; b < ell; ++b) {
                if (a != b) entries.push_back({a, b, share});
            }
        }
    }
    for (auto u = static_cast<NodeId>(ell); u < 2 * ell; ++u) {
        entries.push_back({v, u, 0.5});
        entries.push_back({w, u, 0.5});
    }
    entries.push_back({w, v, 1.0});
    entries.push_back({v, w, 1.0});

    std::vector<double> alpha(n, 0.0);
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < ell; ++i) alpha[i] = 1.0;
    alpha[v] = 1.0 - spec.beta;
    alpha[w] = 1.0 - spec.beta;
    s[v] = 1.0;
    s[w] = -1.0;

    InfluenceMatrix influence(n, std::move(entries));
    UndirectedGraph graph = support_graph(influence);
    return Fixture{OpinionInstance(std::move(influence), std::move(alpha), std::move(s)), std::move(graph), v, w};
}

Fixture make_lollipop(const LollipopSpec& spec) {
    if (spec.clique_size < 3 || spec.path_length < 3) {
        throw DataError("lollipop fixture: clique size and path length must be >= 3");
    }
    if (!(spec.clique_resistance > 0.0 && spec.clique_resistance <= 1.0)) {
        throw DataError("lollipop fixture: clique resistance must lie in (0, 1]");
    }
    const std::size_t k = spec.clique_size;
    const std::size_t m = spec.path_length;
    const std::size_t n = k + m;

    std::vector<Edge> edges;
    for (NodeId a = 0; a < k; ++a) {
        for (NodeId b = a + 1; b < k; ++b) edges.emplace_back(a, b);
    }
    edges.emplace_back(static_cast<NodeId>(k - 1), static_cast<NodeId>(k));
    for (auto p = static_cast<NodeId>(k); p + 1 < n; ++p) edges.emplace_back(p, p + 1);
    UndirectedGraph graph(n, std::move(edges));

    const auto attach = static_cast<NodeId>(k);
    const auto interior = static_cast<NodeId>(k + m / 2);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) alpha[i] = spec.clique_resistance;
    s[attach] = 1.0;
    s[interior] = 1.0;

    InfluenceMatrix influence = influence_from_undirected(graph);
    return Fixture{OpinionInstance(std::move(influence), std::move(alpha), std::move(s)), std::move(graph),
                   attach, interior};
}

} // namespace

Fixture gen_fixture(const FixtureSpec& spec) {
    return std::visit(
        [](const auto& s) -> Fixture {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, NonSubmodularSpec>) {
                return make_nonsubmodular(s);
            } else {
                return make_lollipop(s);
            }
        },
        spec);
}

} // namespace fj
