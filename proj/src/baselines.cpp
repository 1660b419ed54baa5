#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <string>

#include "fjstooges/errors.hpp"
#include "fjstooges/selection.hpp"

namespace fj {

std::vector<double> betweenness_centrality(const UndirectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> score(n, 0.0);
    std::vector<std::size_t> sigma(n);
    std::vector<long long> dist(n);
    std::vector<double> delta(n);
    std::vector<NodeId> stack;
    std::deque<NodeId> queue;

    for (NodeId s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0);
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(delta.begin(), delta.end(), 0.0);
        stack.clear();
        sigma[s] = 1;
        dist[s] = 0;
        queue.push_back(s);
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            stack.push_back(u);
            for (NodeId v : g.neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if (dist[v] == dist[u] + 1) sigma[v] += sigma[u];
            }
        }
        // Predecessors of w are exactly its neighbors one level closer to s.
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const NodeId w = *it;
            for (NodeId v : g.neighbors(w)) {
                if (dist[v] == dist[w] - 1) {
                    delta[v] += static_cast<double>(sigma[v]) / static_cast<double>(sigma[w]) * (1.0 + delta[w]);
                }
            }
            if (w != s) score[w] += delta[w];
        }
    }
    // Each unordered pair was visited from both ends.
    for (auto& x : score) x /= 2.0;
    return score;
}

std::vector<NodeId> baseline_stooge_set(const UndirectedGraph& g, std::size_t k, BaselineStrategy strategy,
                                        std::uint64_t seed) {
    const std::size_t n = g.node_count();
    if (k > n) {
        throw DataError("baseline: k = " + std::to_string(k) + " exceeds node count " + std::to_string(n));
    }
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    switch (strategy) {
    case BaselineStrategy::Random: {
        std::mt19937_64 rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
        break;
    }
    case BaselineStrategy::MaxDegree:
        std::stable_sort(order.begin(), order.end(),
                         [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
        break;
    case BaselineStrategy::Centrality: {
        const auto score = betweenness_centrality(g);
        std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return score[a] > score[b]; });
        break;
    }
    }
    order.resize(k);
    return order;
}

SelectionResult baseline_select(const OpinionInstance& inst, const UndirectedGraph& g, std::size_t k,
                                BaselineStrategy strategy, Objective obj, Direction dir, std::uint64_t seed,
                                const EvaluationOptions& options) {
    if (g.node_count() != inst.size()) throw DataError("baseline: graph and instance sizes differ");
    const auto stooges = baseline_stooge_set(g, k, strategy, seed);
    return assign_resistances_greedily(inst, stooges, obj, dir, options);
}

SelectionResult baseline_select(const OpinionInstance& inst, std::size_t k, BaselineStrategy strategy,
                                Objective obj, Direction dir, std::uint64_t seed, const EvaluationOptions& options) {
    return baseline_select(inst, support_graph(inst.influence), k, strategy, obj, dir, seed, options);
}

} // namespace fj
