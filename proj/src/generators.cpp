#include "fjstooges/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <string>

#include "fjstooges/errors.hpp"

namespace fj {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError(std::string(what) + " must lie in [0, 1]");
}

} // namespace

UndirectedGraph gen_gnp(std::size_t n, double p, std::uint64_t seed) {
    if (n == 0) throw DataError("gen_gnp: n must be >= 1");
    check_probability(p, "gen_gnp: p");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (coin(rng)) edges.emplace_back(u, v);
        }
    }
    return UndirectedGraph(n, std::move(edges));
}

std::size_t CommunityConfig::community_of(NodeId v) const {
    if (v < big_size) return 0;
    return 1 + (v - big_size) / small_size;
}

UndirectedGraph gen_communities(std::uint64_t seed, const CommunityConfig& config) {
    if (config.big_size == 0 || config.small_size == 0) {
        throw DataError("gen_communities: community sizes must be positive");
    }
    check_probability(config.p_intra, "gen_communities: p_intra");
    check_probability(config.p_inter, "gen_communities: p_inter");

    const std::size_t n = config.node_count();
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution intra(config.p_intra);
    std::bernoulli_distribution inter(config.p_inter);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        const auto cu = config.community_of(u);
        for (NodeId v = u + 1; v < n; ++v) {
            const auto cv = config.community_of(v);
            bool present = false;
            if (cu == cv) {
                present = intra(rng);
            } else if (cu == 0 || cv == 0) {
                present = inter(rng);
            }
            if (present) edges.emplace_back(u, v);
        }
    }
    return UndirectedGraph(n, std::move(edges));
}

UndirectedGraph prufer_decode(std::span<const NodeId> seq, std::size_t n) {
    if (n < 2) throw DataError("prufer_decode: n must be >= 2");
    if (seq.size() != n - 2) {
        throw DataError("prufer_decode: sequence length " + std::to_string(seq.size()) +
                        " does not match n - 2 = " + std::to_string(n - 2));
    }
    std::vector<std::size_t> degree(n, 1);
    for (NodeId x : seq) {
        if (x >= n) throw DataError("prufer_decode: entry " + std::to_string(x) + " >= n");
        ++degree[x];
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> leaves;
    for (NodeId v = 0; v < n; ++v) {
        if (degree[v] == 1) leaves.push(v);
    }
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (NodeId x : seq) {
        const NodeId leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(leaf, x);
        if (--degree[x] == 1) leaves.push(x);
    }
    const NodeId a = leaves.top();
    leaves.pop();
    const NodeId b = leaves.top();
    edges.emplace_back(a, b);
    return UndirectedGraph(n, std::move(edges));
}

UndirectedGraph gen_random_tree(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw DataError("gen_random_tree: n must be >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    std::vector<NodeId> seq(n - 2);
    for (auto& x : seq) x = pick(rng);
    return prufer_decode(seq, n);
}

UndirectedGraph gen_star(std::size_t leaves) {
    if (leaves == 0) throw DataError("gen_star: need at least one leaf");
    std::vector<Edge> edges;
    for (NodeId v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
    return UndirectedGraph(leaves + 1, std::move(edges));
}

UndirectedGraph gen_grid(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw DataError("gen_grid: rows and cols must be >= 1");
    std::vector<Edge> edges;
    auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
        }
    }
    return UndirectedGraph(rows * cols, std::move(edges));
}

std::vector<double> sample_opinions(std::size_t n, const OpinionDistribution& dist, std::uint64_t seed) {
    if (n == 0) throw DataError("sample_opinions: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    std::visit(
        [&](const auto& d) {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, ClippedNormal>) {
                if (!(d.variance >= 0.0)) throw DataError("clipped normal: variance must be >= 0");
                std::normal_distribution<double> normal(d.mean, std::sqrt(d.variance));
                for (auto& x : out) x = std::clamp(normal(rng), 0.0, 1.0);
            } else if constexpr (std::is_same_v<D, Uniform>) {
                if (!(d.low <= d.high)) throw DataError("uniform: low must not exceed high");
                std::uniform_real_distribution<double> uniform(d.low, d.high);
                for (auto& x : out) x = uniform(rng);
            } else {
                if (!(d.rate > 0.0)) throw DataError("exponential: rate must be > 0");
                std::exponential_distribution<double> expo(d.rate);
                for (auto& x : out) x = expo(rng);
            }
        },
        dist);
    return out;
}

} // namespace fj
