#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fjstooges/dynamics.hpp"
#include "fjstooges/graph.hpp"
#include "fjstooges/metrics.hpp"

namespace fj {

enum class Objective { Mse, Polarization };
enum class Direction { Maximize, Minimize };

/// Resistance a stooge is pinned to.
enum class Beta : std::uint8_t { Zero = 0, One = 1 };

inline double to_resistance(Beta b) { return b == Beta::One ? 1.0 : 0.0; }

struct Stooge {
    NodeId node;
    Beta beta;

    friend bool operator==(const Stooge&, const Stooge&) = default;
};

using StoogeAssignment = std::vector<Stooge>;

std::vector<NodeId> stooge_nodes(const StoogeAssignment& a);

/// Copy of inst with alpha_v := beta for every stooge. Throws DataError on
/// duplicate or out-of-range nodes.
OpinionInstance apply_stooges(const OpinionInstance& inst, const StoogeAssignment& a);

double objective_value(Objective obj, std::span<const double> x_star, double theta_hat);

struct SelectionResult {
    StoogeAssignment assignment;
    /// Objective value after each committed stooge.
    std::vector<double> objective_trace;
    /// Raw objective change produced by each committed stooge.
    std::vector<double> gain_trace;
    /// Cumulative number of gain evaluations when each stooge was committed.
    std::vector<std::size_t> evaluation_trace;
    double initial_objective = 0.0;
    OpinionInstance final_instance;
    EquilibriumResult final_equilibrium;
    std::size_t evaluations = 0;
    /// True when the run ended before reaching k because nothing improved.
    bool stopped_early = false;
};

/// Shared knobs for evaluating marginal gains.
struct EvaluationOptions {
    /// Convergence tolerance of the incremental equilibrium.
    double epsilon = 1e-5;
    /// Influence weight needed to reactivate a neighbor; defaults to epsilon.
    std::optional<double> activation_threshold;
    std::size_t max_sweeps = 1'000'000;
    /// A candidate only counts as improving when its gain exceeds this.
    double min_gain = 1e-9;
    /// Recompute every trial with the exact solver instead of warm-started iteration.
    bool exact = false;
};

struct GreedyOptions : EvaluationOptions {
    /// Lazy slack; infinity disables pruning.
    double phi = 1.1;
    /// Restrict the candidate nodes (default: every node).
    std::optional<std::vector<NodeId>> candidates;
};

inline constexpr double kNoLazyPruning = std::numeric_limits<double>::infinity();

/// Approximate lazy greedy. Throws NonConvergence if an equilibrium
/// iteration hits its sweep cap.
SelectionResult greedy_lazy(const OpinionInstance& inst, std::size_t k, Objective obj, Direction dir,
                            const GreedyOptions& options = {});

enum class BaselineStrategy { Random, MaxDegree, Centrality };

/// Exact Brandes betweenness on the unweighted graph; each unordered pair counted once.
std::vector<double> betweenness_centrality(const UndirectedGraph& g);

/// The fixed stooge set of a baseline. Throws DataError if k > n.
std::vector<NodeId> baseline_stooge_set(const UndirectedGraph& g, std::size_t k, BaselineStrategy strategy,
                                        std::uint64_t seed);

/// Greedily assigns beta to the given stooges: repeatedly commit the
/// (stooge, beta) pair with the best gain until none improves.
SelectionResult assign_resistances_greedily(const OpinionInstance& inst, std::span<const NodeId> stooges,
                                            Objective obj, Direction dir, const EvaluationOptions& options = {});

SelectionResult baseline_select(const OpinionInstance& inst, const UndirectedGraph& g, std::size_t k,
                                BaselineStrategy strategy, Objective obj, Direction dir, std::uint64_t seed,
                                const EvaluationOptions& options = {});

/// Same, with the undirected support of W standing in for the graph.
SelectionResult baseline_select(const OpinionInstance& inst, std::size_t k, BaselineStrategy strategy,
                                Objective obj, Direction dir, std::uint64_t seed,
                                const EvaluationOptions& options = {});

/// sum_{j <= k} C(n, j) 2^j, saturating at UINT64_MAX.
std::uint64_t brute_force_configurations(std::size_t n, std::size_t k);

struct BruteForceOptions {
    std::uint64_t budget = 10'000'000;
};

/// Exhaustive search over every stooge set of size <= k and every beta
/// assignment, with exact equilibria. Throws DataError when the number of
/// configurations exceeds the budget.
SelectionResult brute_force(const OpinionInstance& inst, std::size_t k, Objective obj, Direction dir,
                            const BruteForceOptions& options = {});

/// Relative loss of using another objective's stooges: (direct - transfer) / |direct|
/// when maximizing, (transfer - direct) / |direct| when minimizing. Negative means
/// the transferred set did better. Throws DataError if direct is zero.
double transfer_loss(double direct, double transfer, Direction dir);

/// Exact metrics after 0, 1, ..., |a| stooges of the assignment.
std::vector<MetricReport> evaluate_prefixes(const OpinionInstance& inst, const StoogeAssignment& a);

std::string to_string(Objective obj);
std::string to_string(Direction dir);
std::string to_string(BaselineStrategy strategy);

} // namespace fj
