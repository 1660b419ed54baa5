#include "fjstooges/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "fjstooges/errors.hpp"

namespace fj {

UndirectedGraph::UndirectedGraph(std::size_t n, std::vector<Edge> edges) : adjacency_(n) {
    for (auto& [u, v] : edges) {
        if (u >= n || v >= n) {
            throw DataError("edge {" + std::to_string(u) + ", " + std::to_string(v) +
                            "} has an endpoint >= node count " + std::to_string(n));
        }
        if (u == v) {
            throw DataError("self-loop on node " + std::to_string(u));
        }
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    for (const auto& [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool UndirectedGraph::has_edge(NodeId u, NodeId v) const {
    if (u >= node_count() || v >= node_count()) return false;
    const auto& nbrs = adjacency_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

InfluenceMatrix::InfluenceMatrix(std::size_t n, std::vector<Influence> entries) {
    for (const auto& e : entries) {
        if (e.source >= n || e.target >= n) {
            throw DataError("influence entry (" + std::to_string(e.source) + ", " +
                            std::to_string(e.target) + ") out of range for n = " + std::to_string(n));
        }
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
            throw DataError("influence weights must be finite and nonnegative");
        }
    }
    // Column-major order, then merge duplicates.
    std::sort(entries.begin(), entries.end(), [](const Influence& a, const Influence& b) {
        return a.target != b.target ? a.target < b.target : a.source < b.source;
    });
    std::vector<Influence> merged;
    merged.reserve(entries.size());
    for (const auto& e : entries) {
        if (!merged.empty() && merged.back().target == e.target && merged.back().source == e.source) {
            merged.back().weight += e.weight;
        } else {
            merged.push_back(e);
        }
    }
    std::erase_if(merged, [](const Influence& e) { return e.weight == 0.0; });

    col_ptr_.assign(n + 1, 0);
    row_ptr_.assign(n + 1, 0);
    for (const auto& e : merged) {
        ++col_ptr_[e.target + 1];
        ++row_ptr_[e.source + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        col_ptr_[i + 1] += col_ptr_[i];
        row_ptr_[i + 1] += row_ptr_[i];
    }
    col_entries_.resize(merged.size());
    row_entries_.resize(merged.size());
    std::vector<std::size_t> col_fill(col_ptr_.begin(), col_ptr_.end() - 1);
    std::vector<std::size_t> row_fill(row_ptr_.begin(), row_ptr_.end() - 1);
    // merged is sorted by (target, source), so both views come out sorted by node.
    for (const auto& e : merged) {
        col_entries_[col_fill[e.target]++] = {e.source, e.weight};
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const Influence& a, const Influence& b) { return a.source < b.source; });
    for (const auto& e : merged) {
        row_entries_[row_fill[e.source]++] = {e.target, e.weight};
    }

    for (std::size_t v = 0; v < n; ++v) {
        double sum = 0.0;
        for (const auto& e : influencers(static_cast<NodeId>(v))) sum += e.weight;
        if (std::abs(sum - 1.0) > kColumnTolerance) {
            throw DataError("column " + std::to_string(v) + " of the influence matrix sums to " +
                            std::to_string(sum) + ", expected 1");
        }
    }
}

double InfluenceMatrix::weight(NodeId u, NodeId v) const {
    if (v >= size()) return 0.0;
    auto col = influencers(v);
    auto it = std::lower_bound(col.begin(), col.end(), u,
                               [](const Entry& e, NodeId node) { return e.node < node; });
    return (it != col.end() && it->node == u) ? it->weight : 0.0;
}

std::vector<Influence> InfluenceMatrix::triplets() const {
    std::vector<Influence> out;
    out.reserve(nonzeros());
    for (std::size_t v = 0; v < size(); ++v) {
        for (const auto& e : influencers(static_cast<NodeId>(v))) {
            out.push_back({e.node, static_cast<NodeId>(v), e.weight});
        }
    }
    return out;
}

InfluenceMatrix influence_from_undirected(const UndirectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<Influence> entries;
    entries.reserve(2 * g.edge_count() + n);
    for (NodeId v = 0; v < n; ++v) {
        const auto deg = g.degree(v);
        if (deg == 0) {
            entries.push_back({v, v, 1.0});
            continue;
        }
        const double w = 1.0 / static_cast<double>(deg);
        for (NodeId u : g.neighbors(v)) entries.push_back({u, v, w});
    }
    return InfluenceMatrix(n, std::move(entries));
}

UndirectedGraph support_graph(const InfluenceMatrix& w) {
    std::vector<Edge> edges;
    for (const auto& e : w.triplets()) {
        if (e.source != e.target) edges.emplace_back(e.source, e.target);
    }
    return UndirectedGraph(w.size(), std::move(edges));
}

OpinionInstance::OpinionInstance(InfluenceMatrix w, std::vector<double> alpha, std::vector<double> s)
    : influence(std::move(w)), resistance(std::move(alpha)), innate(std::move(s)) {
    if (influence.size() != innate.size() || resistance.size() != innate.size()) {
        throw DataError("instance dimension mismatch: W is " + std::to_string(influence.size()) +
                        ", alpha " + std::to_string(resistance.size()) + ", s " +
                        std::to_string(innate.size()));
    }
    if (innate.empty()) throw DataError("instance must have at least one node");
    for (std::size_t v = 0; v < resistance.size(); ++v) {
        if (!(resistance[v] >= 0.0 && resistance[v] <= 1.0)) {
            throw DataError("resistance of node " + std::to_string(v) + " outside [0, 1]");
        }
        if (!std::isfinite(innate[v])) {
            throw DataError("innate opinion of node " + std::to_string(v) + " is not finite");
        }
    }
}

std::vector<std::size_t> bfs_distances(const UndirectedGraph& g, std::span<const NodeId> sources) {
    std::vector<std::size_t> dist(g.node_count(), kUnreachable);
    std::deque<NodeId> queue;
    for (NodeId s : sources) {
        if (s >= g.node_count()) throw DataError("BFS source out of range");
        if (dist[s] != 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

bool is_connected(const UndirectedGraph& g) {
    if (g.node_count() == 0) return true;
    const NodeId root = 0;
    const auto dist = bfs_distances(g, std::span<const NodeId>(&root, 1));
    return std::none_of(dist.begin(), dist.end(), [](std::size_t d) { return d == kUnreachable; });
}

} // namespace fj
