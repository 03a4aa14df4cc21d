/**
 * @file linesearch.hpp
 * @brief Expansion linesearch along each search direction ("approximate
 * optimization" step shared by every outer algorithm).
 *
 * For direction i the trial step starts at nu_i = max(alpha_tilde_i, nu_bar)
 * and grows by 1/delta as long as the trial point y^i + beta d^i passes the
 * sufficient non-domination test against the evolving set Y^{i+1}. Accepted
 * points join the set immediately; the failing trial that ends the loop is
 * discarded. The next direction starts from the last accepted point.
 */

#ifndef DFMO_LINESEARCH_HPP
#define DFMO_LINESEARCH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "directions.hpp"
#include "evaluator.hpp"
#include "pareto.hpp"
#include "types.hpp"

namespace dfmo {

/// Raised when a trial step grows past nu / delta^60 along one direction,
/// which only happens for objectives unbounded below.
class ExpansionOverflow : public OracleError {
public:
    using OracleError::OracleError;
};

struct AcceptedPoint {
    DecisionPoint point;
    ObjectiveVector objectives;
    std::size_t direction = 0;
    double step = 0.0;
};

struct ExplorationResult {
    std::vector<AcceptedPoint> accepted;  ///< Y^{r+1} minus the base set, in acceptance order
    StepsizeVector final_alphas;          ///< alpha^i per direction
    Vector initial_steps;                 ///< nu^i per direction
    bool success = false;
    bool truncated = false;               ///< budget ran out mid-exploration
    std::size_t evals_used = 0;
};

static_assert(std::is_nothrow_move_constructible_v<AcceptedPoint>);

inline constexpr int kMaxExpansionExponent = 60;

inline ExplorationResult approximate_optimization(const ListEntry& x, std::span<const ObjectiveVector> base_set,
                                                  double nu_bar, const DirectionSet& dirs,
                                                  const AlgoParams& params, Evaluator& eval) {
    if (!(nu_bar > 0.0)) throw std::invalid_argument("approximate_optimization: nu_bar must be > 0");
    const std::size_t r = dirs.size();
    if (x.steps.size() != r) {
        throw DimensionError("approximate_optimization: entry has " + std::to_string(x.steps.size()) +
                             " stepsizes for " + std::to_string(r) + " directions");
    }
    if (x.point.size() != dirs.dimension()) {
        throw DimensionError("approximate_optimization: point and directions differ in dimension");
    }

    // Y^{i+1}: the base set plus everything accepted so far. Spans into
    // accepted objectives stay valid because moving a vector keeps its buffer.
    std::vector<std::span<const double>> set;
    set.reserve(base_set.size() + 8);
    for (const auto& f : base_set) set.push_back(f.view());

    ExplorationResult res;
    Vector alphas(r);
    res.initial_steps.resize(r);
    for (std::size_t i = 0; i < r; ++i) res.initial_steps[i] = std::max(x.steps[i], nu_bar);

    const std::size_t evals_before = eval.count();
    DecisionPoint y = x.point;
    const std::size_t n = y.size();
    const double growth_cap = std::pow(1.0 / params.delta, kMaxExpansionExponent);

    std::size_t i = 0;
    for (; i < r && !res.truncated; ++i) {
        const Vector& d = dirs[i];
        const DecisionPoint start = y;  // y^i: every trial along d^i is measured from here
        const double nu = res.initial_steps[i];
        double alpha = nu;
        double beta = nu;
        alphas[i] = nu;
        while (true) {
            if (beta > nu * growth_cap) {
                throw ExpansionOverflow("expansion step exceeded " + std::to_string(kMaxExpansionExponent) +
                                        " growth factors along direction " + std::to_string(i) + " from x = " +
                                        detail::format_vector(start.view()) +
                                        "; the objectives look unbounded below");
            }
            Vector trial(n);
            for (std::size_t j = 0; j < n; ++j) trial[j] = start[j] + beta * d[j];
            DecisionPoint trial_point(std::move(trial));
            auto f = eval.evaluate(trial_point);
            if (!f) {
                res.truncated = true;
                break;
            }
            if (!sufficiently_nondominated(f->view(), set, params.gamma, beta)) break;
            alpha = beta;
            res.accepted.push_back(AcceptedPoint{trial_point, std::move(*f), i, alpha});
            set.push_back(res.accepted.back().objectives.view());
            beta = alpha / params.delta;
            y = std::move(trial_point);
            alphas[i] = alpha;
        }
    }
    for (; i < r; ++i) alphas[i] = res.initial_steps[i];

    res.final_alphas = StepsizeVector(std::move(alphas));
    res.success = !res.accepted.empty();
    res.evals_used = eval.count() - evals_before;
    return res;
}

}  // namespace dfmo

#endif  // DFMO_LINESEARCH_HPP
