#include "fjstooges/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fjstooges/errors.hpp"

namespace fj {

namespace {

void check_dimension(const OpinionInstance& inst, std::size_t got) {
    if (got != inst.size()) {
        throw DataError("opinion vector has length " + std::to_string(got) + ", instance has " +
                        std::to_string(inst.size()) + " nodes");
    }
}

double update(const InfluenceMatrix& w, const std::vector<double>& alpha, const std::vector<double>& s,
              std::span<const double> x, NodeId v) {
    double avg = 0.0;
    for (const auto& e : w.influencers(v)) avg += e.weight * x[e.node];
    return alpha[v] * s[v] + (1.0 - alpha[v]) * avg;
}

// Every node must reach a node with alpha > 0 by following influencers,
// otherwise the walk from it never absorbs and the fixed point is not unique.
void check_absorbing(const OpinionInstance& inst) {
    const std::size_t n = inst.size();
    std::vector<char> anchored(n, 0);
    std::deque<NodeId> queue;
    for (NodeId v = 0; v < n; ++v) {
        if (inst.resistance[v] > 0.0) {
            anchored[v] = 1;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (const auto& e : inst.influence.influencees(u)) {
            if (!anchored[e.node]) {
                anchored[e.node] = 1;
                queue.push_back(e.node);
            }
        }
    }
    const auto it = std::find(anchored.begin(), anchored.end(), 0);
    if (it != anchored.end()) {
        throw NonUniqueEquilibrium("node " + std::to_string(it - anchored.begin()) +
                                   " cannot reach any node with positive resistance; "
                                   "the equilibrium is not unique");
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

OpinionVector step(const OpinionInstance& inst, std::span<const double> x) {
    check_dimension(inst, x.size());
    OpinionVector out(x.size());
    for (NodeId v = 0; v < x.size(); ++v) out[v] = update(inst.influence, inst.resistance, inst.innate, x, v);
    return out;
}

double fixed_point_residual(const OpinionInstance& inst, std::span<const double> x) {
    check_dimension(inst, x.size());
    double worst = 0.0;
    for (NodeId v = 0; v < x.size(); ++v) {
        worst = std::max(worst, std::abs(x[v] - update(inst.influence, inst.resistance, inst.innate, x, v)));
    }
    return worst;
}

EquilibriumResult equilibrium_solve(const OpinionInstance& inst) {
    check_absorbing(inst);
    const auto n = static_cast<Eigen::Index>(inst.size());

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(inst.influence.nonzeros() + inst.size());
    Eigen::VectorXd rhs(n);
    for (NodeId v = 0; v < inst.size(); ++v) {
        const double pass = 1.0 - inst.resistance[v];
        triplets.emplace_back(v, v, 1.0);
        if (pass > 0.0) {
            for (const auto& e : inst.influence.influencers(v)) triplets.emplace_back(v, e.node, -pass * e.weight);
        }
        rhs[v] = inst.resistance[v] * inst.innate[v];
    }
    Eigen::SparseMatrix<double> system(n, n);
    system.setFromTriplets(triplets.begin(), triplets.end());
    system.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) {
        throw NonUniqueEquilibrium("sparse LU factorization failed: " + lu.lastErrorMessage());
    }
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NonUniqueEquilibrium("sparse LU solve failed");

    EquilibriumResult result;
    result.x_star.assign(x.data(), x.data() + n);
    result.residual = fixed_point_residual(inst, result.x_star);
    // A couple of refinement steps absorb round-off on badly conditioned systems.
    for (int round = 0; round < 3 && result.residual > 1e-13; ++round) {
        Eigen::VectorXd r = rhs - system * x;
        x += lu.solve(r);
        OpinionVector refined(x.data(), x.data() + n);
        const double res = fixed_point_residual(inst, refined);
        if (!(res < result.residual)) break;
        result.x_star = std::move(refined);
        result.residual = res;
    }
    if (!(result.residual <= kSolveResidual)) {
        throw NonUniqueEquilibrium("equilibrium solve residual " + std::to_string(result.residual) +
                                   " exceeds 1e-10; system is numerically singular");
    }
    result.converged = true;
    result.iterations = 0;
    return result;
}

IncrementalEquilibrium::IncrementalEquilibrium(const OpinionInstance& inst, OpinionVector x,
                                               IterativeOptions options)
    : influence_(&inst.influence),
      innate_(&inst.innate),
      alpha_(inst.resistance),
      x_(std::move(x)),
      options_(options),
      journal_stamp_(inst.size(), 0),
      active_stamp_(inst.size(), 0) {
    check_dimension(inst, x_.size());
    if (!(options_.tolerance > 0.0)) throw DataError("iterative tolerance must be > 0");
    if (!(options_.threshold() >= 0.0)) throw DataError("activation threshold must be >= 0");
}

void IncrementalEquilibrium::record(NodeId v) {
    if (journal_stamp_[v] != trial_) {
        journal_stamp_[v] = trial_;
        journal_.push_back({v, x_[v]});
    }
}

void IncrementalEquilibrium::set_resistance(NodeId v, double alpha) {
    if (v >= alpha_.size()) throw DataError("node " + std::to_string(v) + " out of range");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DataError("resistance must lie in [0, 1]");
    alpha_journal_.emplace_back(v, alpha_[v]);
    alpha_[v] = alpha;
}

IncrementalEquilibrium::SweepStats IncrementalEquilibrium::propagate(std::span<const NodeId> active) {
    SweepStats stats;
    const double tol = options_.tolerance;
    const double threshold = options_.threshold();

    ++sweep_id_;
    current_.clear();
    for (NodeId v : active) {
        if (v >= x_.size()) throw DataError("active node " + std::to_string(v) + " out of range");
        if (active_stamp_[v] != sweep_id_) {
            active_stamp_[v] = sweep_id_;
            current_.push_back(v);
        }
    }

    while (!current_.empty()) {
        if (stats.sweeps >= options_.max_sweeps) {
            stats.converged = false;
            break;
        }
        ++stats.sweeps;
        // Synchronous: every value in this sweep reads the previous sweep's x.
        values_.resize(current_.size());
        for (std::size_t i = 0; i < current_.size(); ++i) {
            values_[i] = update(*influence_, alpha_, *innate_, x_, current_[i]);
        }
        ++sweep_id_;
        next_.clear();
        double largest = 0.0;
        for (std::size_t i = 0; i < current_.size(); ++i) {
            const NodeId v = current_[i];
            const double delta = std::abs(values_[i] - x_[v]);
            largest = std::max(largest, delta);
            if (values_[i] != x_[v]) {
                record(v);
                x_[v] = values_[i];
            }
            if (delta < tol) continue;
            if (active_stamp_[v] != sweep_id_) {
                active_stamp_[v] = sweep_id_;
                next_.push_back(v);
            }
            for (const auto& e : influence_->influencees(v)) {
                if (e.weight > threshold && active_stamp_[e.node] != sweep_id_) {
                    active_stamp_[e.node] = sweep_id_;
                    next_.push_back(e.node);
                }
            }
        }
        stats.residual = largest;
        current_.swap(next_);
    }
    return stats;
}

void IncrementalEquilibrium::rollback() {
    for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) x_[it->node] = it->before;
    for (auto it = alpha_journal_.rbegin(); it != alpha_journal_.rend(); ++it) alpha_[it->first] = it->second;
    commit();
}

void IncrementalEquilibrium::commit() {
    journal_.clear();
    alpha_journal_.clear();
    ++trial_;
}

EquilibriumResult equilibrium_iterative(const OpinionInstance& inst, std::span<const NodeId> active,
                                        std::span<const double> x0, const IterativeOptions& options) {
    IncrementalEquilibrium solver(inst, OpinionVector(x0.begin(), x0.end()), options);
    const auto stats = solver.propagate(active);
    EquilibriumResult result;
    result.x_star = solver.opinions();
    result.iterations = stats.sweeps;
    result.converged = stats.converged;
    result.residual = stats.residual;
    return result;
}

MonteCarloEstimate equilibrium_montecarlo(const OpinionInstance& inst, NodeId v, std::size_t walks,
                                          std::uint64_t seed, std::size_t max_steps) {
    if (walks == 0) throw DataError("Monte Carlo needs at least one walk");
    if (v >= inst.size()) throw DataError("start node out of range");

    const auto& w = inst.influence;
    // Cumulative weights per column for inverse-CDF sampling of the next state.
    std::vector<double> cumulative(w.nonzeros());
    std::size_t offset = 0;
    std::vector<std::size_t> col_start(inst.size() + 1, 0);
    for (NodeId u = 0; u < inst.size(); ++u) {
        col_start[u] = offset;
        double acc = 0.0;
        for (const auto& e : w.influencers(u)) {
            acc += e.weight;
            cumulative[offset++] = acc;
        }
    }
    col_start[inst.size()] = offset;

    std::vector<double> outcome(walks);
    std::vector<char> overflow(walks, 0);

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < walks; ++i) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        NodeId state = v;
        std::size_t steps = 0;
        while (!(unit(rng) < inst.resistance[state])) {
            if (++steps > max_steps) {
                overflow[i] = 1;
                break;
            }
            auto col = w.influencers(state);
            const double* first = cumulative.data() + col_start[state];
            const double* last = cumulative.data() + col_start[state + 1];
            const double r = unit(rng) * (last[-1]);
            auto pos = static_cast<std::size_t>(std::upper_bound(first, last, r) - first);
            state = col[std::min(pos, col.size() - 1)].node;
        }
        outcome[i] = inst.innate[state];
    }

    for (std::size_t i = 0; i < walks; ++i) {
        if (overflow[i]) {
            throw NonConvergence("random walk from node " + std::to_string(v) + " exceeded " +
                                 std::to_string(max_steps) +
                                 " steps; the region it explores may be non-absorbing");
        }
    }

    double mean = 0.0;
    for (double o : outcome) mean += o;
    mean /= static_cast<double>(walks);
    double ss = 0.0;
    for (double o : outcome) ss += (o - mean) * (o - mean);
    MonteCarloEstimate est;
    est.mean = mean;
    est.walks = walks;
    est.standard_error = walks > 1 ? std::sqrt(ss / static_cast<double>(walks - 1) / static_cast<double>(walks)) : 0.0;
    return est;
}

} // namespace fj
