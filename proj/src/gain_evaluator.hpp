#pragma once

#include <optional>

#include "fjstooges/dynamics.hpp"
#include "fjstooges/selection.hpp"

namespace fj::detail {

// Tracks the current equilibrium under committed stooges and evaluates the
// oriented objective gain of tentatively pinning one more node.
class GainEvaluator {
public:
    GainEvaluator(const OpinionInstance& inst, Objective obj, Direction dir, const EvaluationOptions& options);

    /// Raw objective of the current equilibrium.
    double objective() const { return objective_; }

    /// Objective change of pinning v to beta, negated for minimization so
    /// that larger is always better.
    double improvement(NodeId v, Beta beta);

    /// Pins v to beta and moves the equilibrium forward. Returns the raw objective change.
    double commit(NodeId v, Beta beta);

    std::size_t evaluations() const { return evaluations_; }

    /// Fills the instance/equilibrium fields of a result from the current state.
    void finish(SelectionResult& result) const;

private:
    double oriented(double raw) const { return dir_ == Direction::Maximize ? raw : -raw; }
    double raw_delta(std::span<const IncrementalEquilibrium::Change> changes) const;
    double evaluate_exact(NodeId v, double alpha) const;
    void refresh();

    const OpinionInstance* base_;
    Objective obj_;
    Direction dir_;
    EvaluationOptions options_;
    double theta_hat_;
    double n_;

    std::optional<IncrementalEquilibrium> approx_;
    OpinionInstance exact_instance_;
    OpinionVector exact_x_;

    double sum_ = 0.0;
    double objective_ = 0.0;
    std::size_t evaluations_ = 0;
    std::size_t last_sweeps_ = 0;
    double last_residual_ = 0.0;
};

} // namespace fj::detail
