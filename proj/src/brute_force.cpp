#include <cmath>
#include <limits>
#include <string>

#include "fjstooges/errors.hpp"
#include "fjstooges/selection.hpp"

namespace fj {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kSaturated / a) return kSaturated;
    return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return b > kSaturated - a ? kSaturated : a + b; }

// Advances `combo` to the next k-subset of [0, n) in lexicographic order.
bool next_combination(std::vector<NodeId>& combo, std::size_t n) {
    const std::size_t k = combo.size();
    for (std::size_t i = k; i-- > 0;) {
        if (combo[i] < n - k + i) {
            ++combo[i];
            for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

std::uint64_t brute_force_configurations(std::size_t n, std::size_t k) {
    std::uint64_t total = 0;
    std::uint64_t choose = 1; // C(n, j)
    std::uint64_t pow2 = 1;   // 2^j
    for (std::size_t j = 0; j <= k && j <= n; ++j) {
        if (j > 0) {
            // C(n, j) = C(n, j-1) * (n - j + 1) / j, exact in integers when done in this order.
            const std::uint64_t num = saturating_mul(choose, n - j + 1);
            choose = num == kSaturated ? kSaturated : num / j;
            pow2 = saturating_mul(pow2, 2);
        }
        total = saturating_add(total, saturating_mul(choose, pow2));
    }
    return total;
}

SelectionResult brute_force(const OpinionInstance& inst, std::size_t k, Objective obj, Direction dir,
                            const BruteForceOptions& options) {
    const std::size_t n = inst.size();
    const std::uint64_t needed = brute_force_configurations(n, k);
    if (needed > options.budget) {
        throw DataError("brute force needs " + std::to_string(needed) + " equilibrium evaluations, budget is " +
                        std::to_string(options.budget));
    }
    const double center = theta_hat(inst.innate);
    const double sign = dir == Direction::Maximize ? 1.0 : -1.0;

    OpinionInstance trial = inst;
    const double initial = objective_value(obj, equilibrium_solve(inst).x_star, center);
    double best_score = sign * initial;
    StoogeAssignment best;
    std::size_t evaluations = 1;

    for (std::size_t size = 1; size <= k && size <= n; ++size) {
        std::vector<NodeId> combo(size);
        for (std::size_t i = 0; i < size; ++i) combo[i] = static_cast<NodeId>(i);
        do {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << size); ++mask) {
                trial.resistance = inst.resistance;
                StoogeAssignment config;
                config.reserve(size);
                for (std::size_t i = 0; i < size; ++i) {
                    const Beta b = ((mask >> i) & 1U) ? Beta::One : Beta::Zero;
                    trial.resistance[combo[i]] = to_resistance(b);
                    config.push_back({combo[i], b});
                }
                ++evaluations;
                double score = 0.0;
                try {
                    score = sign * objective_value(obj, equilibrium_solve(trial).x_star, center);
                } catch (const NonUniqueEquilibrium&) {
                    continue; // a resistance-free closed group: no well-defined equilibrium
                }
                // Round-off ties keep the earlier (smaller) configuration.
                if (score > best_score + 1e-14) {
                    best_score = score;
                    best = std::move(config);
                }
            }
        } while (next_combination(combo, n));
    }

    SelectionResult result;
    result.initial_objective = initial;
    result.assignment = best;
    result.evaluations = evaluations;
    result.stopped_early = best.size() < k;
    StoogeAssignment prefix;
    double previous = initial;
    for (const auto& s : best) {
        prefix.push_back(s);
        const auto eq = equilibrium_solve(apply_stooges(inst, prefix));
        const double value = objective_value(obj, eq.x_star, center);
        result.objective_trace.push_back(value);
        result.gain_trace.push_back(value - previous);
        result.evaluation_trace.push_back(evaluations);
        previous = value;
    }
    result.final_instance = apply_stooges(inst, best);
    result.final_equilibrium = equilibrium_solve(result.final_instance);
    return result;
}

} // namespace fj
