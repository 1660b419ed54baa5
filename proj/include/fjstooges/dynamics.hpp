#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fjstooges/graph.hpp"

namespace fj {

using OpinionVector = std::vector<double>;

struct EquilibriumResult {
    OpinionVector x_star;
    std::size_t iterations = 0;
    bool converged = false;
    /// Largest per-node update in the final sweep (exact solve: fixed-point residual).
    double residual = 0.0;
};

/// One synchronous application of x_v <- alpha_v s_v + (1 - alpha_v) sum_u w_uv x_u.
OpinionVector step(const OpinionInstance& inst, std::span<const double> x);

/// max_v |x_v - step(x)_v|.
double fixed_point_residual(const OpinionInstance& inst, std::span<const double> x);

/// Closed-form equilibrium via a sparse LU solve of (I - diag(1 - alpha) W^T) x = diag(alpha) s.
/// Throws NonUniqueEquilibrium when some node cannot reach a node with alpha > 0
/// or the factorization fails to reach a residual of 1e-10.
EquilibriumResult equilibrium_solve(const OpinionInstance& inst);

inline constexpr double kSolveResidual = 1e-10;

struct IterativeOptions {
    /// A node whose update is smaller than this is deactivated.
    double tolerance = 1e-5;
    /// Influence weight above which a changed node reactivates the nodes it
    /// influences. Defaults to `tolerance`.
    std::optional<double> activation_threshold;
    std::size_t max_sweeps = 1'000'000;

    double threshold() const { return activation_threshold.value_or(tolerance); }
};

/// Active-set fixed-point iteration. Only active nodes are updated; a node
/// whose value moves by less than the tolerance drops out, a node that moves
/// further reactivates the nodes it influences. Hitting max_sweeps returns
/// converged = false.
EquilibriumResult equilibrium_iterative(const OpinionInstance& inst, std::span<const NodeId> active,
                                        std::span<const double> x0, const IterativeOptions& options = {});

/// In-place variant of equilibrium_iterative that journals every change so a
/// trial (resistance change plus re-convergence) can be rolled back in time
/// proportional to the number of touched nodes.
class IncrementalEquilibrium {
public:
    struct Change {
        NodeId node;
        double before;
    };
    struct SweepStats {
        std::size_t sweeps = 0;
        bool converged = true;
        double residual = 0.0;
    };

    IncrementalEquilibrium(const OpinionInstance& inst, OpinionVector x, IterativeOptions options);

    const OpinionVector& opinions() const { return x_; }
    const std::vector<double>& resistance() const { return alpha_; }

    void set_resistance(NodeId v, double alpha);
    SweepStats propagate(std::span<const NodeId> active);

    /// Opinion entries modified since the last commit/rollback, with their old values.
    std::span<const Change> changes() const { return journal_; }

    void rollback();
    void commit();

private:
    void record(NodeId v);

    const InfluenceMatrix* influence_;
    const std::vector<double>* innate_;
    std::vector<double> alpha_;
    OpinionVector x_;
    IterativeOptions options_;

    std::vector<Change> journal_;
    std::vector<std::pair<NodeId, double>> alpha_journal_;
    std::vector<std::uint64_t> journal_stamp_;
    std::uint64_t trial_ = 1;

    std::vector<std::uint64_t> active_stamp_;
    std::uint64_t sweep_id_ = 1;
    std::vector<NodeId> current_;
    std::vector<NodeId> next_;
    std::vector<double> values_;
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t walks = 0;
};

inline constexpr std::size_t kMaxWalkSteps = 1'000'000;

/// Estimates x*_v as E[s_X(inf) | X(0) = v] for the absorbing walk that stops
/// at u with probability alpha_u and otherwise moves to an influencer u' of u
/// with probability w_u'u. Walk i uses a generator seeded from (seed, i).
/// Throws NonConvergence if a walk exceeds max_steps.
MonteCarloEstimate equilibrium_montecarlo(const OpinionInstance& inst, NodeId v, std::size_t walks,
                                          std::uint64_t seed, std::size_t max_steps = kMaxWalkSteps);

} // namespace fj
