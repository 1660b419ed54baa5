#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fjstooges/errors.hpp"
#include "fjstooges/generators.hpp"
#include "fjstooges/metrics.hpp"

using namespace fj;

TEST_CASE("theta hat is the mean of the innate opinions") {
    const std::vector<double> s{0.0, 0.5, 1.0, 0.5};
    CHECK(theta_hat(s) == doctest::Approx(0.5));
    CHECK_THROWS_AS(theta_hat(std::vector<double>{}), DataError);
}

TEST_CASE("metrics on the two-node equilibrium") {
    const std::vector<double> x{1.0 / 3.0, 2.0 / 3.0};
    const double center = theta_hat(std::vector<double>{0.0, 1.0});
    CHECK(mse(x, center) == doctest::Approx(1.0 / 36.0));
    CHECK(polarization(x) == doctest::Approx(1.0 / 36.0));
    CHECK(bias_squared(x, center) == doctest::Approx(0.0));
}

TEST_CASE("metrics of a constant vector") {
    const std::vector<double> x(10, 0.7);
    CHECK(polarization(x) == doctest::Approx(0.0));
    CHECK(mse(x, 0.2) == doctest::Approx(0.25));
    CHECK(bias_squared(x, 0.2) == doctest::Approx(0.25));
}

TEST_CASE("mse decomposes into bias and polarization") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> s(37), x(37);
        for (auto& v : s) v = u(rng);
        for (auto& v : x) v = u(rng);
        const auto m = metric_report(s, x);
        CHECK(std::abs(m.mse - m.bias_sq - m.polarization) <= 1e-12);
        CHECK(m.theta_hat == doctest::Approx(theta_hat(s)));
    }
    CHECK_THROWS_AS(metric_report(std::vector<double>{0.1}, std::vector<double>{0.1, 0.2}), DataError);
}

TEST_CASE("jaccard similarity") {
    const std::vector<NodeId> a{1, 2, 3};
    const std::vector<NodeId> b{2, 3, 4, 5};
    const std::vector<NodeId> none;
    CHECK(jaccard(a, a) == 1.0);
    CHECK(jaccard(a, b) == doctest::Approx(2.0 / 5.0));
    CHECK(jaccard(a, none) == 0.0);
    CHECK(jaccard(none, none) == 1.0);
    const std::vector<NodeId> dup{1, 1, 2, 3};
    CHECK(jaccard(a, dup) == 1.0);
}

TEST_CASE("relative change in percent") {
    CHECK(relative_change(2.0, 3.0) == doctest::Approx(50.0));
    CHECK(relative_change(4.0, 2.0) == doctest::Approx(-50.0));
    CHECK_THROWS_AS(relative_change(0.0, 1.0), DataError);
}

TEST_CASE("distance group mse on a path") {
    // 0 - 1 - 2 - 3, stooge at 0, plus an isolated node 4.
    const UndirectedGraph g(5, {{0, 1}, {1, 2}, {2, 3}});
    const std::vector<double> x{1.0, 0.5, 0.5, 0.0, 0.25};
    const std::vector<NodeId> stooges{0};
    const auto groups = distance_group_mse(g, stooges, x, 0.5);
    REQUIRE(groups.size() == 5);
    CHECK(groups.at(0).size == 1);
    CHECK(groups.at(0).mse == doctest::Approx(0.25));
    CHECK(groups.at(1).mse == doctest::Approx(0.0));
    CHECK(groups.at(3).mse == doctest::Approx(0.25));
    CHECK(groups.at(kUnreachable).size == 1);
    CHECK(groups.at(kUnreachable).mse == doctest::Approx(0.0625));
    CHECK_THROWS_AS(distance_group_mse(g, std::vector<NodeId>{}, x, 0.5), DataError);
}

TEST_CASE("distance groups partition the nodes") {
    const auto g = gen_gnp(100, 0.05, 3);
    const auto x = sample_opinions(100, Uniform{}, 3);
    const std::vector<NodeId> stooges{4, 50, 77};
    std::size_t total = 0;
    double weighted = 0.0;
    for (const auto& [d, grp] : distance_group_mse(g, stooges, x, 0.5)) {
        total += grp.size;
        weighted += grp.mse * static_cast<double>(grp.size);
    }
    CHECK(total == 100);
    CHECK(weighted / 100.0 == doctest::Approx(mse(x, 0.5)));
}
