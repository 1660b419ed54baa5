#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fjstooges/errors.hpp"
#include "fjstooges/selection.hpp"
#include "gain_evaluator.hpp"

namespace fj {

namespace detail {

GainEvaluator::GainEvaluator(const OpinionInstance& inst, Objective obj, Direction dir,
                             const EvaluationOptions& options)
    : base_(&inst),
      obj_(obj),
      dir_(dir),
      options_(options),
      theta_hat_(fj::theta_hat(inst.innate)),
      n_(static_cast<double>(inst.size())) {
    if (options_.exact) {
        exact_instance_ = inst;
        exact_x_ = equilibrium_solve(inst).x_star;
    } else {
        IterativeOptions it;
        it.tolerance = options_.epsilon;
        it.activation_threshold = options_.activation_threshold;
        it.max_sweeps = options_.max_sweeps;
        approx_.emplace(inst, inst.innate, it);
        std::vector<NodeId> all(inst.size());
        std::iota(all.begin(), all.end(), NodeId{0});
        const auto stats = approx_->propagate(all);
        if (!stats.converged) throw NonConvergence("initial equilibrium did not converge within the sweep cap");
        approx_->commit();
        last_sweeps_ = stats.sweeps;
        last_residual_ = stats.residual;
    }
    refresh();
}

void GainEvaluator::refresh() {
    const auto& x = options_.exact ? exact_x_ : approx_->opinions();
    sum_ = std::accumulate(x.begin(), x.end(), 0.0);
    objective_ = objective_value(obj_, x, theta_hat_);
}

double GainEvaluator::raw_delta(std::span<const IncrementalEquilibrium::Change> changes) const {
    const auto& x = approx_->opinions();
    if (obj_ == Objective::Mse) {
        double acc = 0.0;
        for (const auto& c : changes) {
            const double now = x[c.node];
            acc += (now - c.before) * (now + c.before - 2.0 * theta_hat_);
        }
        return acc / n_;
    }
    double dsum = 0.0;
    double dsq = 0.0;
    for (const auto& c : changes) {
        const double now = x[c.node];
        dsum += now - c.before;
        dsq += (now - c.before) * (now + c.before);
    }
    const double mean_old = sum_ / n_;
    const double mean_new = mean_old + dsum / n_;
    return dsq / n_ - (mean_new - mean_old) * (mean_new + mean_old);
}

double GainEvaluator::evaluate_exact(NodeId v, double alpha) const {
    OpinionInstance trial = exact_instance_;
    trial.resistance[v] = alpha;
    const auto eq = equilibrium_solve(trial);
    return objective_value(obj_, eq.x_star, theta_hat_);
}

double GainEvaluator::improvement(NodeId v, Beta beta) {
    ++evaluations_;
    const double alpha = to_resistance(beta);
    if (options_.exact) {
        try {
            return oriented(evaluate_exact(v, alpha) - objective_);
        } catch (const NonUniqueEquilibrium&) {
            return -std::numeric_limits<double>::infinity();
        }
    }

    approx_->set_resistance(v, alpha);
    const NodeId seed[] = {v};
    const auto stats = approx_->propagate(seed);
    if (!stats.converged) {
        approx_->rollback();
        throw NonConvergence("equilibrium after pinning node " + std::to_string(v) +
                             " did not converge within the sweep cap");
    }
    const double delta = raw_delta(approx_->changes());
    approx_->rollback();
    return oriented(delta);
}

double GainEvaluator::commit(NodeId v, Beta beta) {
    const double before = objective_;
    const double alpha = to_resistance(beta);
    if (options_.exact) {
        exact_instance_.resistance[v] = alpha;
        exact_x_ = equilibrium_solve(exact_instance_).x_star;
    } else {
        approx_->set_resistance(v, alpha);
        const NodeId seed[] = {v};
        const auto stats = approx_->propagate(seed);
        if (!stats.converged) throw NonConvergence("equilibrium did not converge while committing a stooge");
        approx_->commit();
        last_sweeps_ = stats.sweeps;
        last_residual_ = stats.residual;
    }
    refresh();
    return objective_ - before;
}

void GainEvaluator::finish(SelectionResult& result) const {
    result.evaluations = evaluations_;
    if (options_.exact) {
        result.final_instance = exact_instance_;
        result.final_equilibrium.x_star = exact_x_;
        result.final_equilibrium.converged = true;
        result.final_equilibrium.residual = fixed_point_residual(exact_instance_, exact_x_);
    } else {
        result.final_instance =
            OpinionInstance(base_->influence, approx_->resistance(), base_->innate);
        result.final_equilibrium.x_star = approx_->opinions();
        result.final_equilibrium.converged = true;
        result.final_equilibrium.iterations = last_sweeps_;
        result.final_equilibrium.residual = last_residual_;
    }
}

} // namespace detail

std::vector<NodeId> stooge_nodes(const StoogeAssignment& a) {
    std::vector<NodeId> out;
    out.reserve(a.size());
    for (const auto& s : a) out.push_back(s.node);
    return out;
}

OpinionInstance apply_stooges(const OpinionInstance& inst, const StoogeAssignment& a) {
    OpinionInstance out = inst;
    std::vector<char> seen(inst.size(), 0);
    for (const auto& s : a) {
        if (s.node >= inst.size()) throw DataError("stooge node " + std::to_string(s.node) + " out of range");
        if (seen[s.node]) throw DataError("node " + std::to_string(s.node) + " appears twice in the assignment");
        seen[s.node] = 1;
        out.resistance[s.node] = to_resistance(s.beta);
    }
    return out;
}

double objective_value(Objective obj, std::span<const double> x_star, double theta_hat) {
    return obj == Objective::Mse ? mse(x_star, theta_hat) : polarization(x_star);
}

namespace {

struct Candidate {
    NodeId node;
    Beta beta;
    double cached;
};

// Tie order: lower node first, then beta = 1 before beta = 0.
bool tie_before(NodeId a_node, Beta a_beta, NodeId b_node, Beta b_beta) {
    if (a_node != b_node) return a_node < b_node;
    return a_beta == Beta::One && b_beta == Beta::Zero;
}

} // namespace

SelectionResult greedy_lazy(const OpinionInstance& inst, std::size_t k, Objective obj, Direction dir,
                            const GreedyOptions& options) {
    if (k == 0) throw DataError("greedy: k must be >= 1");
    if (!(options.phi >= 1.0)) throw DataError("greedy: phi must be >= 1");
    if (!(options.epsilon > 0.0)) throw DataError("greedy: epsilon must be > 0");

    std::vector<NodeId> pool;
    if (options.candidates) {
        pool = *options.candidates;
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        for (NodeId v : pool) {
            if (v >= inst.size()) throw DataError("candidate node " + std::to_string(v) + " out of range");
        }
    } else {
        pool.resize(inst.size());
        std::iota(pool.begin(), pool.end(), NodeId{0});
    }

    std::vector<Candidate> candidates;
    candidates.reserve(2 * pool.size());
    for (NodeId v : pool) {
        candidates.push_back({v, Beta::One, std::numeric_limits<double>::infinity()});
        candidates.push_back({v, Beta::Zero, std::numeric_limits<double>::infinity()});
    }

    detail::GainEvaluator eval(inst, obj, dir, options);
    SelectionResult result;
    result.initial_objective = eval.objective();
    std::vector<char> chosen(inst.size(), 0);
    const bool lazy = std::isfinite(options.phi);

    while (result.assignment.size() < k) {
        std::vector<std::size_t> order;
        order.reserve(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!chosen[candidates[i].node]) order.push_back(i);
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ca = candidates[a];
            const auto& cb = candidates[b];
            if (ca.cached != cb.cached) return ca.cached > cb.cached;
            return tie_before(ca.node, ca.beta, cb.node, cb.beta);
        });

        double gain_prev = 0.0;
        double gain_max = options.min_gain;
        std::optional<std::size_t> best;
        for (std::size_t idx : order) {
            auto& c = candidates[idx];
            if (lazy && gain_prev > options.phi * c.cached) break;
            c.cached = eval.improvement(c.node, c.beta);
            const bool better = c.cached > gain_max ||
                                (best && c.cached == gain_max &&
                                 tie_before(c.node, c.beta, candidates[*best].node, candidates[*best].beta));
            if (better) {
                gain_max = c.cached;
                best = idx;
            }
            gain_prev = c.cached;
        }

        if (!best) {
            result.stopped_early = true;
            break;
        }
        const auto& pick = candidates[*best];
        chosen[pick.node] = 1;
        result.gain_trace.push_back(eval.commit(pick.node, pick.beta));
        result.assignment.push_back({pick.node, pick.beta});
        result.objective_trace.push_back(eval.objective());
        result.evaluation_trace.push_back(eval.evaluations());
        if (result.assignment.size() == pool.size()) break;
    }
    eval.finish(result);
    return result;
}

SelectionResult assign_resistances_greedily(const OpinionInstance& inst, std::span<const NodeId> stooges,
                                            Objective obj, Direction dir, const EvaluationOptions& options) {
    std::vector<NodeId> remaining(stooges.begin(), stooges.end());
    {
        std::vector<NodeId> sorted = remaining;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DataError("stooge set contains a duplicate node");
        }
        if (!sorted.empty() && sorted.back() >= inst.size()) throw DataError("stooge node out of range");
    }

    detail::GainEvaluator eval(inst, obj, dir, options);
    SelectionResult result;
    result.initial_objective = eval.objective();

    while (!remaining.empty()) {
        double gain_max = options.min_gain;
        std::optional<std::pair<std::size_t, Beta>> best;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            for (Beta beta : {Beta::One, Beta::Zero}) {
                const double g = eval.improvement(remaining[i], beta);
                const bool better =
                    g > gain_max || (best && g == gain_max &&
                                     tie_before(remaining[i], beta, remaining[best->first], best->second));
                if (better) {
                    gain_max = g;
                    best = std::make_pair(i, beta);
                }
            }
        }
        if (!best) {
            result.stopped_early = true;
            break;
        }
        const NodeId node = remaining[best->first];
        result.gain_trace.push_back(eval.commit(node, best->second));
        result.assignment.push_back({node, best->second});
        result.objective_trace.push_back(eval.objective());
        result.evaluation_trace.push_back(eval.evaluations());
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best->first));
    }
    eval.finish(result);
    return result;
}

std::vector<MetricReport> evaluate_prefixes(const OpinionInstance& inst, const StoogeAssignment& a) {
    std::vector<MetricReport> out;
    out.reserve(a.size() + 1);
    OpinionInstance current = inst;
    out.push_back(metric_report(inst.innate, equilibrium_solve(current).x_star));
    StoogeAssignment prefix;
    for (const auto& s : a) {
        prefix.push_back(s);
        current = apply_stooges(inst, prefix);
        out.push_back(metric_report(inst.innate, equilibrium_solve(current).x_star));
    }
    return out;
}

double transfer_loss(double direct, double transfer, Direction dir) {
    if (direct == 0.0) throw DataError("transfer loss undefined for a zero direct objective");
    const double diff = dir == Direction::Maximize ? direct - transfer : transfer - direct;
    return diff / std::abs(direct);
}

std::string to_string(Objective obj) { return obj == Objective::Mse ? "mse" : "polarization"; }

std::string to_string(Direction dir) { return dir == Direction::Maximize ? "max" : "min"; }

std::string to_string(BaselineStrategy strategy) {
    switch (strategy) {
    case BaselineStrategy::Random: return "random";
    case BaselineStrategy::MaxDegree: return "maxdegree";
    case BaselineStrategy::Centrality: return "centrality";
    }
    return "unknown";
}

} // namespace fj
