#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fj {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Simple undirected graph: no self-loops, no parallel edges.
/// Edges are stored normalized (first < second) and sorted.
class UndirectedGraph {
public:
    UndirectedGraph() = default;

    /// Builds the graph from an arbitrary edge list. Duplicates (in either
    /// orientation) collapse. Throws DataError on self-loops or endpoints >= n.
    UndirectedGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Sorted neighbor list of v.
    std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
    std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
    bool has_edge(NodeId u, NodeId v) const;

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adjacency_;
};

/// One nonzero of the influence matrix: `source` influences `target` with `weight`.
struct Influence {
    NodeId source;
    NodeId target;
    double weight;
};

/// Sparse column-stochastic matrix W. Column v holds the influencers of v,
/// i.e. every u with w_uv > 0. Both the column view (who influences v) and
/// the row view (whom u influences) are kept.
class InfluenceMatrix {
public:
    struct Entry {
        NodeId node;
        double weight;
    };

    static constexpr double kColumnTolerance = 1e-12;

    InfluenceMatrix() = default;

    /// Duplicated (source, target) pairs are summed. Throws DataError for
    /// negative weights, out-of-range nodes or a column not summing to 1.
    InfluenceMatrix(std::size_t n, std::vector<Influence> entries);

    std::size_t size() const { return col_ptr_.empty() ? 0 : col_ptr_.size() - 1; }
    std::size_t nonzeros() const { return col_entries_.size(); }

    /// Influencers u of v with weights w_uv.
    std::span<const Entry> influencers(NodeId v) const {
        return {col_entries_.data() + col_ptr_[v], col_entries_.data() + col_ptr_[v + 1]};
    }
    /// Nodes z influenced by u with weights w_uz.
    std::span<const Entry> influencees(NodeId u) const {
        return {row_entries_.data() + row_ptr_[u], row_entries_.data() + row_ptr_[u + 1]};
    }

    /// w_uv, zero when absent.
    double weight(NodeId u, NodeId v) const;

    std::vector<Influence> triplets() const;

private:
    std::vector<std::size_t> col_ptr_;
    std::vector<Entry> col_entries_;
    std::vector<std::size_t> row_ptr_;
    std::vector<Entry> row_entries_;
};

/// Uniform neighbor influence w_uv = 1 / deg(v). Isolated vertices get a
/// unit self-loop so the matrix stays column stochastic.
InfluenceMatrix influence_from_undirected(const UndirectedGraph& g);

/// Undirected support of W: {u, v} is an edge iff w_uv > 0 or w_vu > 0, u != v.
UndirectedGraph support_graph(const InfluenceMatrix& w);

/// The triple (W, alpha, s) of the generalized Friedkin-Johnsen model.
struct OpinionInstance {
    InfluenceMatrix influence;
    std::vector<double> resistance; // alpha, each in [0, 1]
    std::vector<double> innate;     // s

    OpinionInstance() = default;
    /// Throws DataError on dimension mismatch or resistance outside [0, 1].
    OpinionInstance(InfluenceMatrix w, std::vector<double> alpha, std::vector<double> s);

    std::size_t size() const { return innate.size(); }
};

/// Hop distances from the nearest source; kUnreachable where no path exists.
inline constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);
std::vector<std::size_t> bfs_distances(const UndirectedGraph& g, std::span<const NodeId> sources);

bool is_connected(const UndirectedGraph& g);

} // namespace fj
