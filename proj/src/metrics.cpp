#include "fjstooges/metrics.hpp"

#include <algorithm>
#include <string>

#include "fjstooges/errors.hpp"

namespace fj {

namespace {

double mean_of(std::span<const double> v) {
    if (v.empty()) throw DataError("cannot average an empty opinion vector");
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double mean_square_about(std::span<const double> v, double center) {
    if (v.empty()) throw DataError("cannot average an empty opinion vector");
    double acc = 0.0;
    for (double x : v) acc += (x - center) * (x - center);
    return acc / static_cast<double>(v.size());
}

std::vector<NodeId> as_set(std::span<const NodeId> v) {
    std::vector<NodeId> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

double theta_hat(std::span<const double> s) { return mean_of(s); }

double mse(std::span<const double> x_star, double theta_hat) { return mean_square_about(x_star, theta_hat); }

double polarization(std::span<const double> x_star) { return mean_square_about(x_star, mean_of(x_star)); }

double bias_squared(std::span<const double> x_star, double theta_hat) {
    const double d = theta_hat - mean_of(x_star);
    return d * d;
}

MetricReport metric_report(std::span<const double> innate, std::span<const double> x_star) {
    if (innate.size() != x_star.size()) throw DataError("innate and equilibrium vectors differ in length");
    MetricReport r;
    r.theta_hat = theta_hat(innate);
    r.theta_hat_star = mean_of(x_star);
    r.mse = mse(x_star, r.theta_hat);
    r.polarization = mean_square_about(x_star, r.theta_hat_star);
    r.bias_sq = (r.theta_hat - r.theta_hat_star) * (r.theta_hat - r.theta_hat_star);
    return r;
}

double jaccard(std::span<const NodeId> a, std::span<const NodeId> b) {
    const auto sa = as_set(a);
    const auto sb = as_set(b);
    if (sa.empty() && sb.empty()) return 1.0;
    std::vector<NodeId> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    const std::size_t uni = sa.size() + sb.size() - common.size();
    return static_cast<double>(common.size()) / static_cast<double>(uni);
}

double relative_change(double before, double after) {
    if (!(before > 0.0)) throw DataError("relative change needs a positive baseline, got " + std::to_string(before));
    return 100.0 * (after - before) / before;
}

std::map<std::size_t, DistanceGroup> distance_group_mse(const UndirectedGraph& g, std::span<const NodeId> stooges,
                                                        std::span<const double> x_star, double theta_hat) {
    if (stooges.empty()) throw DataError("distance grouping needs at least one stooge");
    if (x_star.size() != g.node_count()) throw DataError("equilibrium vector does not match graph size");
    const auto dist = bfs_distances(g, stooges);
    std::map<std::size_t, DistanceGroup> groups;
    for (std::size_t v = 0; v < dist.size(); ++v) {
        auto& grp = groups[dist[v]];
        grp.mse += (x_star[v] - theta_hat) * (x_star[v] - theta_hat);
        ++grp.size;
    }
    for (auto& [d, grp] : groups) grp.mse /= static_cast<double>(grp.size);
    return groups;
}

} // namespace fj
