#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fjstooges/errors.hpp"
#include "fjstooges/fixtures.hpp"
#include "fjstooges/generators.hpp"
#include "fjstooges/selection.hpp"

using namespace fj;

namespace {

OpinionInstance two_node() {
    return OpinionInstance(InfluenceMatrix(2, {{0, 1, 1.0}, {1, 0, 1.0}}), {0.5, 0.5}, {0.0, 1.0});
}

OpinionInstance gnp_instance(std::size_t n, double p, std::uint64_t seed) {
    const auto g = gen_gnp(n, p, seed);
    return OpinionInstance(influence_from_undirected(g), std::vector<double>(n, 0.5),
                           sample_opinions(n, ClippedNormal{}, seed + 31));
}

double exact(const OpinionInstance& inst, const StoogeAssignment& a, Objective obj) {
    return objective_value(obj, equilibrium_solve(apply_stooges(inst, a)).x_star, theta_hat(inst.innate));
}

// Closed-form equilibrium of the two-node example for arbitrary resistances.
std::optional<std::pair<double, double>> two_node_eq(double a0, double a1) {
    const double det = 1.0 - (1.0 - a0) * (1.0 - a1);
    if (det == 0.0) return std::nullopt;
    const double x0 = (1.0 - a0) * a1 / det; // s = (0, 1)
    return std::make_pair(x0, a1 + (1.0 - a1) * x0);
}

} // namespace

TEST_CASE("apply stooges") {
    const auto inst = two_node();
    const auto out = apply_stooges(inst, {{0, Beta::One}});
    CHECK(out.resistance == std::vector<double>{1.0, 0.5});
    CHECK(inst.resistance == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(apply_stooges(inst, {{0, Beta::One}, {0, Beta::Zero}}), DataError);
    CHECK_THROWS_AS(apply_stooges(inst, {{2, Beta::One}}), DataError);
    CHECK(stooge_nodes({{4, Beta::One}, {1, Beta::Zero}}) == std::vector<NodeId>{4, 1});
}

TEST_CASE("objective value dispatch") {
    const std::vector<double> x{1.0 / 3.0, 2.0 / 3.0};
    CHECK(objective_value(Objective::Mse, x, 0.4) == doctest::Approx(mse(x, 0.4)));
    CHECK(objective_value(Objective::Polarization, x, 0.4) == doctest::Approx(1.0 / 36.0));
}

TEST_CASE("greedy on the two-node example") {
    // Pinning either node to zero resistance gives consensus at the other's
    // opinion, MSE 1/4; the tie goes to the lower node. Afterwards nothing improves.
    GreedyOptions opts;
    opts.epsilon = 1e-10;
    const auto res = greedy_lazy(two_node(), 2, Objective::Mse, Direction::Maximize, opts);
    REQUIRE(res.assignment.size() == 1);
    CHECK(res.assignment[0] == Stooge{0, Beta::Zero});
    CHECK(res.stopped_early);
    CHECK(res.initial_objective == doctest::Approx(1.0 / 36.0));
    CHECK(res.objective_trace[0] == doctest::Approx(0.25));
    CHECK(res.gain_trace[0] == doctest::Approx(0.25 - 1.0 / 36.0));
}

TEST_CASE("greedy traces are consistent") {
    const auto inst = gnp_instance(80, 0.08, 2);
    for (auto dir : {Direction::Maximize, Direction::Minimize}) {
        for (auto obj : {Objective::Mse, Objective::Polarization}) {
            const auto res = greedy_lazy(inst, 8, obj, dir);
            REQUIRE(res.assignment.size() == res.gain_trace.size());
            REQUIRE(res.assignment.size() == res.objective_trace.size());
            double running = res.initial_objective;
            for (std::size_t i = 0; i < res.gain_trace.size(); ++i) {
                running += res.gain_trace[i];
                CHECK(running == doctest::Approx(res.objective_trace[i]).epsilon(1e-9));
                if (dir == Direction::Maximize) CHECK(res.gain_trace[i] > 0);
                if (dir == Direction::Minimize) CHECK(res.gain_trace[i] < 0);
            }
            CHECK(std::is_sorted(res.evaluation_trace.begin(), res.evaluation_trace.end()));
            CHECK(res.evaluations == res.evaluation_trace.back());
            // Approximate objective tracks the exact one.
            CHECK(std::abs(res.objective_trace.back() - exact(inst, res.assignment, obj)) <= 1e-4);
            std::set<NodeId> nodes;
            for (const auto& s : res.assignment) nodes.insert(s.node);
            CHECK(nodes.size() == res.assignment.size());
        }
    }
}

TEST_CASE("greedy first pick is the best single stooge") {
    const auto inst = gnp_instance(40, 0.1, 3);
    GreedyOptions opts;
    opts.exact = true;
    const auto res = greedy_lazy(inst, 1, Objective::Mse, Direction::Maximize, opts);
    double best = -1.0;
    for (NodeId v = 0; v < 40; ++v) {
        for (Beta b : {Beta::One, Beta::Zero}) best = std::max(best, exact(inst, {{v, b}}, Objective::Mse));
    }
    REQUIRE(res.assignment.size() == 1);
    CHECK(exact(inst, res.assignment, Objective::Mse) == doctest::Approx(best).epsilon(1e-12));
    CHECK(res.evaluations == 80);
}

TEST_CASE("exact and approximate greedy agree on a small instance") {
    const auto inst = gnp_instance(60, 0.1, 4);
    GreedyOptions approx;
    approx.epsilon = 1e-9;
    GreedyOptions exact_opts;
    exact_opts.exact = true;
    const auto a = greedy_lazy(inst, 5, Objective::Polarization, Direction::Maximize, approx);
    const auto b = greedy_lazy(inst, 5, Objective::Polarization, Direction::Maximize, exact_opts);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("lazy pruning saves evaluations") {
    const auto inst = gnp_instance(150, 0.05, 5);
    GreedyOptions lazy;
    GreedyOptions full;
    full.phi = kNoLazyPruning;
    const auto a = greedy_lazy(inst, 10, Objective::Mse, Direction::Maximize, lazy);
    const auto b = greedy_lazy(inst, 10, Objective::Mse, Direction::Maximize, full);
    CHECK(a.evaluations < b.evaluations);
    // Without pruning every remaining candidate is evaluated each round.
    std::size_t expected = 0;
    for (std::size_t i = 0; i < b.assignment.size(); ++i) expected += 2 * (150 - i);
    CHECK(b.evaluations == expected);
}

TEST_CASE("greedy respects the candidate restriction") {
    const auto inst = gnp_instance(50, 0.1, 6);
    GreedyOptions opts;
    opts.candidates = std::vector<NodeId>{7, 3, 7, 11};
    const auto res = greedy_lazy(inst, 5, Objective::Mse, Direction::Maximize, opts);
    CHECK(res.assignment.size() <= 3);
    for (const auto& s : res.assignment) CHECK((s.node == 3 || s.node == 7 || s.node == 11));
    opts.candidates = std::vector<NodeId>{99};
    CHECK_THROWS_AS(greedy_lazy(inst, 1, Objective::Mse, Direction::Maximize, opts), DataError);
}

TEST_CASE("greedy stops early when nothing clears the minimum gain") {
    const auto inst = gnp_instance(30, 0.2, 7);
    GreedyOptions opts;
    opts.min_gain = 1e6;
    const auto res = greedy_lazy(inst, 5, Objective::Mse, Direction::Maximize, opts);
    CHECK(res.assignment.empty());
    CHECK(res.stopped_early);
    CHECK(res.final_instance.resistance == inst.resistance);
}

TEST_CASE("greedy argument validation") {
    const auto inst = two_node();
    CHECK_THROWS_AS(greedy_lazy(inst, 0, Objective::Mse, Direction::Maximize), DataError);
    GreedyOptions bad;
    bad.phi = 0.5;
    CHECK_THROWS_AS(greedy_lazy(inst, 1, Objective::Mse, Direction::Maximize, bad), DataError);
}

TEST_CASE("lollipop: second stooge adds nothing") {
    const auto fx = gen_fixture(LollipopSpec{});
    GreedyOptions opts;
    opts.exact = true;
    opts.candidates = std::vector<NodeId>{fx.first, fx.second};
    const auto res = greedy_lazy(fx.instance, 2, Objective::Mse, Direction::Maximize, opts);
    REQUIRE(res.assignment.size() == 1);
    CHECK(res.assignment[0] == Stooge{fx.first, Beta::One});
    CHECK(res.stopped_early);
    const double f1 = exact(fx.instance, res.assignment, Objective::Mse);
    const double f2 = exact(fx.instance, {{fx.first, Beta::One}, {fx.second, Beta::One}}, Objective::Mse);
    CHECK(std::abs(f2 - f1) <= 1e-9);
}

TEST_CASE("nonsubmodular fixture: gains grow along v then w") {
    const double beta = 0.5;
    const auto fx = gen_fixture(NonSubmodularSpec{1000, beta});
    const double f0 = exact(fx.instance, {}, Objective::Polarization);
    const double f1 = exact(fx.instance, {{fx.first, Beta::One}}, Objective::Polarization);
    const double f2 = exact(fx.instance, {{fx.first, Beta::One}, {fx.second, Beta::Zero}}, Objective::Polarization);
    CHECK(f0 == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(std::abs((f1 - f0) - beta * beta / 4) <= 0.01);
    CHECK(std::abs((f2 - f1) - (1 - beta * beta) / 4) <= 0.01);
    CHECK(f2 - f1 > f1 - f0);

    // Equilibrium values after pinning v: x_w = 2 beta - 1 and the empty-graph nodes sit at beta.
    const auto x = equilibrium_solve(apply_stooges(fx.instance, {{fx.first, Beta::One}})).x_star;
    CHECK(x[fx.first] == doctest::Approx(1.0));
    CHECK(x[fx.second] == doctest::Approx(2 * beta - 1));
    CHECK(x[1000] == doctest::Approx(beta));
    CHECK(x[0] == doctest::Approx(0.0));
}

TEST_CASE("betweenness on a path and a star") {
    const UndirectedGraph path(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    const auto bp = betweenness_centrality(path);
    CHECK(bp == std::vector<double>{0.0, 3.0, 4.0, 3.0, 0.0});
    const auto bs = betweenness_centrality(gen_star(4));
    CHECK(bs[0] == doctest::Approx(6.0));
    for (NodeId v = 1; v <= 4; ++v) CHECK(bs[v] == 0.0);
    // Two shortest paths between opposite corners of a square.
    const auto sq = betweenness_centrality(UndirectedGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
    for (double b : sq) CHECK(b == doctest::Approx(0.5));
}

TEST_CASE("baseline stooge sets") {
    const auto star = gen_star(6);
    CHECK(baseline_stooge_set(star, 1, BaselineStrategy::MaxDegree, 0) == std::vector<NodeId>{0});
    CHECK(baseline_stooge_set(star, 3, BaselineStrategy::MaxDegree, 0) == std::vector<NodeId>{0, 1, 2});
    CHECK(baseline_stooge_set(star, 1, BaselineStrategy::Centrality, 0) == std::vector<NodeId>{0});

    const auto g = gen_gnp(50, 0.1, 1);
    const auto r5 = baseline_stooge_set(g, 5, BaselineStrategy::Random, 9);
    const auto r8 = baseline_stooge_set(g, 8, BaselineStrategy::Random, 9);
    CHECK(r5 == baseline_stooge_set(g, 5, BaselineStrategy::Random, 9));
    CHECK(std::equal(r5.begin(), r5.end(), r8.begin()));
    CHECK(r5 != baseline_stooge_set(g, 5, BaselineStrategy::Random, 10));
    CHECK_THROWS_AS(baseline_stooge_set(g, 51, BaselineStrategy::Random, 9), DataError);
}

TEST_CASE("baseline selection assigns resistances within the fixed set") {
    const auto inst = gnp_instance(60, 0.1, 8);
    const auto g = support_graph(inst.influence);
    const auto set = baseline_stooge_set(g, 6, BaselineStrategy::MaxDegree, 0);
    const auto res = baseline_select(inst, g, 6, BaselineStrategy::MaxDegree, Objective::Mse, Direction::Maximize, 0);
    for (const auto& s : res.assignment) CHECK(std::find(set.begin(), set.end(), s.node) != set.end());
    CHECK(exact(inst, res.assignment, Objective::Mse) > exact(inst, {}, Objective::Mse));
    CHECK_THROWS_AS(baseline_select(inst, gen_gnp(10, 0.5, 1), 2, BaselineStrategy::Random, Objective::Mse,
                                    Direction::Maximize, 0),
                    DataError);
    const std::vector<NodeId> dup{1, 1};
    CHECK_THROWS_AS(assign_resistances_greedily(inst, dup, Objective::Mse, Direction::Maximize), DataError);
}

TEST_CASE("brute force configuration counts") {
    CHECK(brute_force_configurations(2, 2) == 9);
    CHECK(brute_force_configurations(3, 1) == 7);
    CHECK(brute_force_configurations(12, 2) == 1 + 24 + 66 * 4);
    CHECK(brute_force_configurations(10000, 50) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("brute force on the two-node example matches enumeration") {
    const auto inst = two_node();
    for (auto dir : {Direction::Maximize, Direction::Minimize}) {
        // Oracle: enumerate every resistance pair reachable with at most two stooges.
        const double sign = dir == Direction::Maximize ? 1.0 : -1.0;
        double best = -std::numeric_limits<double>::infinity();
        for (double a0 : {0.5, 0.0, 1.0}) {
            for (double a1 : {0.5, 0.0, 1.0}) {
                const auto x = two_node_eq(a0, a1);
                if (!x) continue;
                const double m = ((x->first - 0.5) * (x->first - 0.5) + (x->second - 0.5) * (x->second - 0.5)) / 2;
                best = std::max(best, sign * m);
            }
        }
        const auto res = brute_force(inst, 2, Objective::Mse, dir);
        CHECK(sign * exact(inst, res.assignment, Objective::Mse) == doctest::Approx(best));
        CHECK(res.evaluations == 9);
    }
    const auto up = brute_force(inst, 2, Objective::Mse, Direction::Maximize);
    // MSE 1/4 is first reached by a single stooge; ties keep the smaller configuration.
    CHECK(up.assignment == StoogeAssignment{{0, Beta::Zero}});
    CHECK(exact(inst, up.assignment, Objective::Mse) == doctest::Approx(0.25));
    const auto down = brute_force(inst, 2, Objective::Mse, Direction::Minimize);
    CHECK(down.assignment.empty());
}

TEST_CASE("brute force bounds greedy") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto inst = gnp_instance(10, 0.3, seed);
        for (auto dir : {Direction::Maximize, Direction::Minimize}) {
            const double sign = dir == Direction::Maximize ? 1.0 : -1.0;
            const auto g = greedy_lazy(inst, 2, Objective::Polarization, dir);
            const auto b = brute_force(inst, 2, Objective::Polarization, dir);
            CHECK(sign * exact(inst, g.assignment, Objective::Polarization) <=
                  sign * exact(inst, b.assignment, Objective::Polarization) + 1e-12);
            CHECK(b.objective_trace.size() == b.assignment.size());
        }
    }
    BruteForceOptions tight;
    tight.budget = 10;
    CHECK_THROWS_AS(brute_force(gnp_instance(10, 0.3, 1), 2, Objective::Mse, Direction::Maximize, tight), DataError);
}

TEST_CASE("prefix evaluation and transfer loss") {
    const auto inst = gnp_instance(40, 0.1, 9);
    const StoogeAssignment a{{3, Beta::One}, {8, Beta::Zero}};
    const auto reports = evaluate_prefixes(inst, a);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].mse == doctest::Approx(exact(inst, {}, Objective::Mse)));
    CHECK(reports[2].polarization == doctest::Approx(exact(inst, a, Objective::Polarization)));

    CHECK(transfer_loss(0.5, 0.49, Direction::Maximize) == doctest::Approx(0.02));
    CHECK(transfer_loss(0.1, 0.106, Direction::Minimize) == doctest::Approx(0.06));
    CHECK(transfer_loss(0.1, 0.09, Direction::Minimize) < 0);
    CHECK_THROWS_AS(transfer_loss(0.0, 0.1, Direction::Maximize), DataError);
}

TEST_CASE("names") {
    CHECK(to_string(Objective::Mse) == "mse");
    CHECK(to_string(Objective::Polarization) == "polarization");
    CHECK(to_string(Direction::Minimize) == "min");
    CHECK(to_string(BaselineStrategy::Centrality) == "centrality");
}
