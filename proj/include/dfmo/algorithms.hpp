/**
 * @file algorithms.hpp
 * @brief Outer loops: the full-list variant (every entry explored per
 * iteration) and the single-entry variant with pluggable selection, plus the
 * per-iteration instrumentation (hypervolume, cost function, criticality).
 *
 * Conventions shared by both loops:
 *  - record k of the trace describes the list L_k at the start of iteration k;
 *    its success flag tells whether iteration k changed the point set. The last
 *    record is the terminal state and has success == false.
 *  - new entries get parent_id = the explored entry and born_iter = k + 1;
 *    an entry whose steps shrink keeps its id.
 *  - insertion order breaks every tie.
 */

#ifndef DFMO_ALGORITHMS_HPP
#define DFMO_ALGORITHMS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "criticality.hpp"
#include "directions.hpp"
#include "evaluator.hpp"
#include "hypervolume.hpp"
#include "linesearch.hpp"
#include "pareto.hpp"
#include "problems.hpp"
#include "types.hpp"

namespace dfmo {

enum class Algorithm { strong, light };

enum class SelectionKind { min_max_step, max_max_step, round_robin, user_hook };

/// Returns the position in the list of the entry to explore at iteration k.
using SelectionHook = std::function<std::size_t(const ParetoList&, std::size_t k)>;

struct SelectionStrategy {
    SelectionKind kind = SelectionKind::min_max_step;
    SelectionHook hook;
};

/// Optional replacement of the direction set before iteration k (full-list
/// variant only). Empty means the set stays constant.
using DirectionRefresh = std::function<DirectionSet(std::size_t k, const DirectionSet& current)>;

struct IterationRecord {
    std::size_t k = 0;
    std::size_t list_size = 0;
    double delta_bar = 0.0;  ///< largest max-step (the algorithm's own value for the full-list variant)
    double xi = 0.0;         ///< smallest max-step over L_k
    double hi = 0.0;         ///< hypervolume of F(X_k)
    double phi_delta = 0.0;  ///< -hi + eta * delta_bar^{2q}
    double phi_xi = 0.0;     ///< -hi + eta * xi^{2q}
    std::size_t nf_cum = 0;  ///< oracle calls issued before iteration k
    bool success = false;
    std::optional<EntryId> selected_id;
    std::optional<double> gamma_max;
    std::optional<double> gamma_min;
    bool rho_clipped = false;
};

enum class StopReason { max_iters, delta_tol, max_evals, truncated };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::max_iters: return "max_iters";
        case StopReason::delta_tol: return "delta_tol";
        case StopReason::max_evals: return "max_evals";
        case StopReason::truncated: return "truncated";
    }
    return "unknown";
}

struct LineageEdge {
    EntryId child = 0;
    EntryId parent = 0;
    std::size_t born_iter = 0;
};

/// Settings that only affect what is recorded, never the iterates.
struct Instrumentation {
    ReferencePoint rho;
    ObjectiveFn diagnostic_fn;  ///< used for criticality columns; calls counted separately
    bool trace_criticality = false;
    double fd_step = kDefaultFdStep;
    bool check_properties = true;
};

struct SolverResult {
    ParetoList final_list;
    std::vector<IterationRecord> trace;
    std::vector<LineageEdge> lineage;
    std::size_t nf_algorithm = 0;
    std::size_t nf_diagnostic = 0;
    StopReason stop = StopReason::max_iters;
    bool rho_clipped = false;
    std::vector<std::string> violations;  ///< runtime property checks that failed
};

/// Position of the entry to explore; ties go to the earliest entry.
inline std::size_t select_entry(const SelectionStrategy& strategy, const ParetoList& list, std::size_t k) {
    if (list.empty()) throw std::invalid_argument("select_entry: empty list");
    switch (strategy.kind) {
        case SelectionKind::min_max_step:
        case SelectionKind::max_max_step: {
            const bool want_min = strategy.kind == SelectionKind::min_max_step;
            std::size_t best = 0;
            double best_val = max_step(list[0]);
            for (std::size_t i = 1; i < list.size(); ++i) {
                const double v = max_step(list[i]);
                if (want_min ? v < best_val : v > best_val) {
                    best = i;
                    best_val = v;
                }
            }
            return best;
        }
        case SelectionKind::round_robin:
            return k % list.size();
        case SelectionKind::user_hook: {
            if (!strategy.hook) throw ConfigError("select_entry: user_hook strategy without a hook");
            const std::size_t pos = strategy.hook(list, k);
            if (pos >= list.size()) throw ConfigError("select_entry: hook returned an out-of-range position");
            return pos;
        }
    }
    return 0;
}

namespace detail {

class Bookkeeper {
public:
    explicit Bookkeeper(const ParetoList& initial) {
        for (const auto& e : initial) {
            next_id_ = std::max(next_id_, e.id + 1);
        }
    }

    ListEntry make_child(const AcceptedPoint& p, const StepsizeVector& steps, EntryId parent, std::size_t iter) {
        ListEntry e{p.point, p.objectives, steps, next_id_++, parent, iter};
        lineage_.push_back(LineageEdge{e.id, parent, iter});
        return e;
    }

    std::vector<LineageEdge> take_lineage() { return std::move(lineage_); }

private:
    EntryId next_id_ = 1;
    std::vector<LineageEdge> lineage_;
};

inline IterationRecord snapshot(std::size_t k, const ParetoList& list, double delta_bar, const AlgoParams& params,
                                const Instrumentation& inst, std::size_t nf, std::size_t& nf_diag) {
    IterationRecord rec;
    rec.k = k;
    rec.list_size = list.size();
    rec.delta_bar = delta_bar;
    rec.xi = list_min_step(list);
    const auto objs = list.objectives();
    const auto hv = hypervolume_clipped(objs, inst.rho);
    rec.hi = hv.value;
    rec.rho_clipped = hv.clipped;
    const double two_q = 2.0 * static_cast<double>(inst.rho.size());
    rec.phi_delta = -rec.hi + params.eta * std::pow(delta_bar, two_q);
    rec.phi_xi = -rec.hi + params.eta * std::pow(rec.xi, two_q);
    rec.nf_cum = nf;
    if (inst.trace_criticality) {
        if (!inst.diagnostic_fn) throw ConfigError("trace_criticality requires a diagnostic objective");
        rec.gamma_max = gamma_max(list, inst.diagnostic_fn, inst.fd_step, &nf_diag);
        rec.gamma_min = gamma_min(list, inst.diagnostic_fn, inst.fd_step, &nf_diag);
    }
    return rec;
}

inline std::optional<StopReason> should_stop(const StoppingRule& stop, std::size_t k, double delta_bar,
                                             const Evaluator& eval) {
    if (stop.delta_tol && delta_bar <= *stop.delta_tol) return StopReason::delta_tol;
    if (stop.max_iters && k >= *stop.max_iters) return StopReason::max_iters;
    if (eval.exhausted()) return StopReason::max_evals;
    return std::nullopt;
}

inline void validate_start(const ParetoList& list, const DirectionSet& dirs, const AlgoParams& params,
                           const Instrumentation& inst) {
    if (list.empty()) throw ConfigError("initial list is empty");
    const std::size_t q = list[0].objectives.size();
    params.validate(q);
    if (inst.rho.size() != q) throw ConfigError("reference point has the wrong number of objectives");
    for (const auto& e : list) {
        if (e.steps.size() != dirs.size()) throw ConfigError("initial entry stepsizes do not match the direction count");
        if (e.point.size() != dirs.dimension()) throw ConfigError("initial entry dimension does not match directions");
    }
}

// Full-list variant: the cost function must fall by at least
// tilde_c * delta_{k+1}^{2q}, and a successful iteration must gain
// (gamma c^2 delta^2)^q or (gamma delta^2)^q of hypervolume.
inline void check_strong_step(const IterationRecord& prev, const IterationRecord& next, const AlgoParams& params,
                              std::size_t q, std::vector<std::string>& violations) {
    if (prev.rho_clipped || next.rho_clipped) return;
    const double qd = static_cast<double>(q);
    const double bound = params.decrease_constant(q) * std::pow(next.delta_bar, 2.0 * qd);
    if (next.phi_delta - prev.phi_delta > -bound + 1e-10) {
        violations.push_back("cost decrease violated at iteration " + std::to_string(prev.k));
    }
    if (next.hi < prev.hi - 1e-10) {
        violations.push_back("hypervolume decreased at iteration " + std::to_string(prev.k));
    }
    if (prev.success) {
        const double d2 = next.delta_bar * next.delta_bar;
        const double need = next.delta_bar > prev.delta_bar ? std::pow(params.gamma * d2, qd)
                                                             : std::pow(params.gamma * params.c * params.c * d2, qd);
        if (next.hi - prev.hi < need - 1e-10) {
            violations.push_back("hypervolume increase below bound at iteration " + std::to_string(prev.k));
        }
    }
}

}  // namespace detail

/**
 * @brief Full-list variant: every entry of L_k is explored once per iteration.
 *
 * Entries are explored in insertion order from a snapshot of L_k taken at the
 * start of the iteration, while the base set grows with every accepted point.
 * The reference step passed to the linesearch is c * Delta_bar_k; Delta_bar_{k+1}
 * is taken over the temporary list before filtering.
 */
inline SolverResult dfmo_strong(Evaluator& eval, ParetoList list, DirectionSet dirs, const AlgoParams& params,
                                const Instrumentation& inst, const DirectionRefresh& refresh = {}) {
    detail::validate_start(list, dirs, params, inst);
    const std::size_t q = list[0].objectives.size();
    detail::Bookkeeper book(list);
    SolverResult out;
    double delta_bar = list_max_step(list);

    for (std::size_t k = 0;; ++k) {
        IterationRecord rec = detail::snapshot(k, list, delta_bar, params, inst, eval.count(), out.nf_diagnostic);
        out.rho_clipped = out.rho_clipped || rec.rho_clipped;
        if (auto stop = detail::should_stop(params.stop, k, delta_bar, eval)) {
            out.stop = *stop;
            out.trace.push_back(rec);
            break;
        }
        if (refresh) dirs = refresh(k, dirs);

        const std::size_t m = list.size();
        std::vector<ListEntry> tilde(list.entries());
        std::vector<ObjectiveVector> tilde_obj = list.objectives();
        bool truncated = false;
        for (std::size_t pos = 0; pos < m; ++pos) {
            const ListEntry x = tilde[pos];
            ExplorationResult res =
                approximate_optimization(x, tilde_obj, params.c * delta_bar, dirs, params, eval);
            if (res.success) {
                for (const auto& p : res.accepted) {
                    tilde.push_back(book.make_child(p, res.final_alphas, x.id, k + 1));
                    tilde_obj.push_back(p.objectives);
                }
            } else if (!res.truncated) {
                tilde[pos].steps = res.final_alphas.scaled(params.theta);
            }
            if (res.truncated) {
                truncated = true;
                break;
            }
        }

        const double next_delta_bar = list_max_step(std::span<const ListEntry>(tilde));
        ParetoList next = filter_nondominated(std::move(tilde));
        rec.success = next.ids() != list.ids();
        out.trace.push_back(rec);
        list = std::move(next);
        delta_bar = next_delta_bar;

        if (truncated) {
            IterationRecord last =
                detail::snapshot(k + 1, list, delta_bar, params, inst, eval.count(), out.nf_diagnostic);
            out.rho_clipped = out.rho_clipped || last.rho_clipped;
            out.trace.push_back(last);
            out.stop = StopReason::truncated;
            break;
        }
    }

    if (inst.check_properties) {
        const std::size_t transitions = out.trace.size() - 1 - (out.stop == StopReason::truncated ? 1 : 0);
        for (std::size_t i = 0; i + 1 < out.trace.size() && i < transitions; ++i) {
            detail::check_strong_step(out.trace[i], out.trace[i + 1], params, q, out.violations);
        }
    }
    out.final_list = std::move(list);
    out.lineage = book.take_lineage();
    out.nf_algorithm = eval.count();
    return out;
}

/**
 * @brief Single-entry variant: one entry, chosen by the strategy, is explored
 * per iteration with reference step c * Delta_k (its own largest step).
 *
 * min_max_step and max_max_step give the smallest-step and largest-step
 * selection rules. On failure only the selected entry's steps shrink (the list
 * is not re-filtered since dominance cannot change).
 */
inline SolverResult dfmo_light(Evaluator& eval, ParetoList list, const DirectionSet& dirs, const AlgoParams& params,
                               const Instrumentation& inst, const SelectionStrategy& strategy) {
    detail::validate_start(list, dirs, params, inst);
    detail::Bookkeeper book(list);
    SolverResult out;

    for (std::size_t k = 0;; ++k) {
        IterationRecord rec =
            detail::snapshot(k, list, list_max_step(list), params, inst, eval.count(), out.nf_diagnostic);
        out.rho_clipped = out.rho_clipped || rec.rho_clipped;
        if (auto stop = detail::should_stop(params.stop, k, rec.delta_bar, eval)) {
            out.stop = *stop;
            out.trace.push_back(rec);
            break;
        }

        const std::size_t pos = select_entry(strategy, list, k);
        const ListEntry x = list[pos];
        rec.selected_id = x.id;
        const std::vector<ObjectiveVector> base = list.objectives();
        ExplorationResult res = approximate_optimization(x, base, params.c * max_step(x), dirs, params, eval);

        if (res.success) {
            std::vector<ListEntry> tilde(list.entries());
            for (const auto& p : res.accepted) tilde.push_back(book.make_child(p, res.final_alphas, x.id, k + 1));
            list = filter_nondominated(std::move(tilde));
        } else if (!res.truncated) {
            list.replace_steps(pos, res.final_alphas.scaled(params.theta));
        }
        rec.success = res.success;
        out.trace.push_back(rec);

        if (res.truncated) {
            IterationRecord last =
                detail::snapshot(k + 1, list, list_max_step(list), params, inst, eval.count(), out.nf_diagnostic);
            out.rho_clipped = out.rho_clipped || last.rho_clipped;
            out.trace.push_back(last);
            out.stop = StopReason::truncated;
            break;
        }
    }

    if (inst.check_properties) {
        for (std::size_t i = 0; i + 1 < out.trace.size(); ++i) {
            const auto& a = out.trace[i];
            const auto& b = out.trace[i + 1];
            if (!a.rho_clipped && !b.rho_clipped && b.hi < a.hi - 1e-10) {
                out.violations.push_back("hypervolume decreased at iteration " + std::to_string(a.k));
            }
        }
    }
    out.final_list = std::move(list);
    out.lineage = book.take_lineage();
    out.nf_algorithm = eval.count();
    return out;
}

/// Fully resolved run configuration; enough to reproduce a run bit for bit.
struct RunConfig {
    std::string problem = "remark_a1";
    std::optional<std::string> external_cmd;
    std::vector<Vector> x0;  ///< start points; empty means the problem's suggestion
    Algorithm algo = Algorithm::strong;
    SelectionKind strategy = SelectionKind::min_max_step;
    AlgoParams params;
    std::size_t r_extra = 0;
    std::optional<Vector> ref_point;  ///< explicit rho
    std::optional<Vector> f_max;      ///< rho = f_max + s when no explicit rho
    double fd_step = kDefaultFdStep;
    bool trace_criticality = false;
};

struct RunArtifacts {
    RunConfig config;  ///< echo, with rho and start points filled in
    Problem problem;
    ParetoList final_front;
    std::vector<IterationRecord> trace;
    std::vector<LineageEdge> lineage;
    std::size_t nf_algorithm = 0;
    std::size_t nf_diagnostic = 0;
    StopReason stop = StopReason::max_iters;
    bool rho_clipped = false;
    std::size_t directions = 0;
    std::vector<std::string> violations;
};

/// Evaluates the start points (counted) and builds L_0 with uniform steps.
inline ParetoList make_initial_list(const std::vector<Vector>& starts, Evaluator& eval, std::size_t r,
                                    double initial_step) {
    std::vector<ListEntry> entries;
    EntryId id = 1;
    for (const auto& x : starts) {
        DecisionPoint p(x);
        auto f = eval.evaluate(p);
        if (!f) throw ConfigError("evaluation budget too small to evaluate the start points");
        entries.push_back(ListEntry{p, std::move(*f), StepsizeVector(Vector(r, initial_step)), id++, std::nullopt, 0});
    }
    return filter_nondominated(std::move(entries));
}

/// Runs a configured algorithm on a given problem.
inline RunArtifacts run(RunConfig config, Problem problem) {
    if (config.x0.empty()) {
        for (const auto& p : problem.suggested_start) config.x0.push_back(p.coords);
    }
    if (config.x0.empty()) throw ConfigError("no start points");
    for (const auto& x : config.x0) {
        if (x.size() != problem.n) throw ConfigError("start point dimension does not match the problem");
    }
    config.params.stop.validate();
    if (!(config.fd_step > 0.0)) throw ConfigError("fd_step must be > 0");

    const DirectionSet dirs = make_directions(problem.n, config.r_extra, config.params.seed);
    Evaluator eval(problem.eval, config.params.stop.max_evals);
    ParetoList l0 = make_initial_list(config.x0, eval, dirs.size(), config.params.initial_step);
    const std::size_t q = l0[0].objectives.size();
    if (problem.q != 0 && problem.q != q) throw ConfigError("problem returned an unexpected number of objectives");
    problem.q = q;
    config.params.validate(q);

    ReferencePoint rho;
    if (config.ref_point) {
        if (config.ref_point->size() != q) throw ConfigError("ref_point must have q components");
        rho = ReferencePoint{ObjectiveVector(*config.ref_point)};
    } else if (config.f_max) {
        if (config.f_max->size() != q) throw ConfigError("f_max must have q components");
        rho = make_reference(ObjectiveVector(*config.f_max), config.params.s);
    } else {
        Vector hi = l0[0].objectives.values;
        for (const auto& e : l0) {
            for (std::size_t i = 0; i < q; ++i) hi[i] = std::max(hi[i], e.objectives[i]);
        }
        rho = make_reference(ObjectiveVector(hi), config.params.s);
    }
    config.ref_point = rho.rho.values;

    Instrumentation inst{rho, problem.eval, config.trace_criticality, config.fd_step, true};
    SolverResult res = config.algo == Algorithm::strong
                           ? dfmo_strong(eval, std::move(l0), dirs, config.params, inst)
                           : dfmo_light(eval, std::move(l0), dirs, config.params, inst,
                                        SelectionStrategy{config.strategy, {}});

    RunArtifacts art;
    art.config = std::move(config);
    art.problem = std::move(problem);
    art.final_front = std::move(res.final_list);
    art.trace = std::move(res.trace);
    art.lineage = std::move(res.lineage);
    art.nf_algorithm = res.nf_algorithm;
    art.nf_diagnostic = res.nf_diagnostic;
    art.stop = res.stop;
    art.rho_clipped = res.rho_clipped;
    art.directions = dirs.size();
    art.violations = std::move(res.violations);
    return art;
}

/// Resolves the problem from the configuration (built-in or external) and runs.
inline RunArtifacts run(const RunConfig& config) {
    if (config.external_cmd) {
        if (config.x0.empty()) throw ConfigError("an external problem needs explicit start points");
        std::vector<DecisionPoint> start;
        for (const auto& x : config.x0) start.emplace_back(x);
        return run(config, external_blackbox(*config.external_cmd, std::move(start)));
    }
    return run(config, builtin(config.problem));
}

}  // namespace dfmo

#endif  // DFMO_ALGORITHMS_HPP
