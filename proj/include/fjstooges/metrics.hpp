#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "fjstooges/graph.hpp"

namespace fj {

/// Mean of the innate opinions (the crowd estimate). Throws DataError on empty input.
double theta_hat(std::span<const double> s);

/// (1/n) sum_v (x_v - theta_hat)^2.
double mse(std::span<const double> x_star, double theta_hat);

/// (1/n) sum_v (x_v - mean(x))^2.
double polarization(std::span<const double> x_star);

/// (theta_hat - mean(x))^2.
double bias_squared(std::span<const double> x_star, double theta_hat);

/// All population-normalized; mse == bias_sq + polarization up to round-off.
struct MetricReport {
    double theta_hat = 0.0;
    double theta_hat_star = 0.0;
    double mse = 0.0;
    double polarization = 0.0;
    double bias_sq = 0.0;
};

MetricReport metric_report(std::span<const double> innate, std::span<const double> x_star);

/// |A n B| / |A u B| over node sets (duplicates ignored). Two empty sets give 1.
double jaccard(std::span<const NodeId> a, std::span<const NodeId> b);

/// 100 * (after - before) / before. Throws DataError if before <= 0.
double relative_change(double before, double after);

struct DistanceGroup {
    double mse = 0.0;
    std::size_t size = 0;
};

/// Groups nodes by hop distance to the nearest stooge (kUnreachable for
/// nodes without a path) and reports the MSE within each group.
std::map<std::size_t, DistanceGroup> distance_group_mse(const UndirectedGraph& g, std::span<const NodeId> stooges,
                                                        std::span<const double> x_star, double theta_hat);

} // namespace fj
