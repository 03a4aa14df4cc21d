/**
 * @file pareto.hpp
 * @brief Pareto dominance, the sufficient non-domination test used by the
 * expansion linesearch, and the mutually non-dominated list.
 */

#ifndef DFMO_PARETO_HPP
#define DFMO_PARETO_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace dfmo {

/// True iff a <= b componentwise and a != b.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
    detail::require_same_size(a, b, "dominates");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    return dominates(a.view(), b.view());
}

/// a <= b componentwise (a dominates or equals b).
inline bool weakly_dominates(std::span<const double> a, std::span<const double> b) {
    detail::require_same_size(a, b, "weakly_dominates");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
    }
    return true;
}

/// Acceptance test of the expansion step: y is accepted iff for every member
/// f of the set, y is NOT strictly greater than f - gamma * step^2 in all
/// coordinates. Vacuously true for an empty set.
template <typename Range>
bool sufficiently_nondominated(std::span<const double> y, const Range& set, double gamma, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sufficiently_nondominated: step must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("sufficiently_nondominated: gamma must lie in (0,1)");
    }
    const double margin = gamma * step * step;
    for (const auto& member : set) {
        std::span<const double> f = member;
        detail::require_same_size(y, f, "sufficiently_nondominated");
        bool all_greater = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (!(y[i] > f[i] - margin)) {
                all_greater = false;
                break;
            }
        }
        if (all_greater) return false;
    }
    return true;
}

inline bool sufficiently_nondominated(const ObjectiveVector& y, const std::vector<ObjectiveVector>& set,
                                      double gamma, double step) {
    std::vector<std::span<const double>> views;
    views.reserve(set.size());
    for (const auto& v : set) views.push_back(v.view());
    return sufficiently_nondominated(y.view(), views, gamma, step);
}

/// Delta of one entry: its largest stepsize.
inline double max_step(const ListEntry& entry) {
    return *std::max_element(entry.steps.alphas.begin(), entry.steps.alphas.end());
}

/**
 * @brief Insertion-ordered collection of mutually non-dominated entries with
 * pairwise distinct objective vectors.
 *
 * Only filter_nondominated() and checked() construct non-empty lists, so the
 * invariant holds for every instance. Stepsizes may be replaced in place since
 * they never affect dominance.
 */
class ParetoList {
public:
    ParetoList() = default;

    /// Validates the invariant instead of filtering; throws ConfigError.
    static ParetoList checked(std::vector<ListEntry> entries);

    const std::vector<ListEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const ListEntry& operator[](std::size_t i) const { return entries_[i]; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    void replace_steps(std::size_t index, StepsizeVector steps) {
        if (steps.size() != entries_.at(index).steps.size()) {
            throw DimensionError("ParetoList::replace_steps: stepsize count changed");
        }
        entries_[index].steps = std::move(steps);
    }

    std::ptrdiff_t index_of(EntryId id) const {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].id == id) return static_cast<std::ptrdiff_t>(i);
        }
        return -1;
    }

    std::vector<EntryId> ids() const {
        std::vector<EntryId> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.id);
        return out;
    }

    std::vector<ObjectiveVector> objectives() const {
        std::vector<ObjectiveVector> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.objectives);
        return out;
    }

private:
    explicit ParetoList(std::vector<ListEntry> entries) : entries_(std::move(entries)) {}
    friend ParetoList filter_nondominated(std::vector<ListEntry> entries);

    std::vector<ListEntry> entries_;
};

namespace detail {

// Positions of the entries to keep, in increasing order.
inline std::vector<std::size_t> nondominated_positions(const std::vector<ListEntry>& entries) {
    const std::size_t m = entries.size();
    std::vector<std::size_t> keep;
    if (m == 0) return keep;
    const std::size_t q = entries.front().objectives.size();
    for (const auto& e : entries) {
        if (e.objectives.size() != q) throw DimensionError("filter_nondominated: mixed objective counts");
    }

    if (q == 2) {
        // Sweep by (f1, f2, position): an entry survives iff its f2 is strictly
        // below every f2 seen so far; exact duplicates fall to the earliest.
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& fa = entries[a].objectives.values;
            const auto& fb = entries[b].objectives.values;
            if (fa[0] != fb[0]) return fa[0] < fb[0];
            if (fa[1] != fb[1]) return fa[1] < fb[1];
            return a < b;
        });
        bool have = false;
        double best = 0.0;
        for (std::size_t idx : order) {
            const double f2 = entries[idx].objectives.values[1];
            if (!have || f2 < best) {
                keep.push_back(idx);
                best = f2;
                have = true;
            }
        }
        std::sort(keep.begin(), keep.end());
        return keep;
    }

    for (std::size_t i = 0; i < m; ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < m && !drop; ++j) {
            if (i == j) continue;
            const auto& fi = entries[i].objectives;
            const auto& fj = entries[j].objectives;
            if (dominates(fj, fi) || (j < i && fj == fi)) drop = true;
        }
        if (!drop) keep.push_back(i);
    }
    return keep;
}

}  // namespace detail

/// Keeps entries dominated by no other entry; among identical objective
/// vectors the earliest survives. Insertion order is preserved.
inline ParetoList filter_nondominated(std::vector<ListEntry> entries) {
    const auto keep = detail::nondominated_positions(entries);
    std::vector<ListEntry> out;
    out.reserve(keep.size());
    for (std::size_t idx : keep) out.push_back(std::move(entries[idx]));
    return ParetoList(std::move(out));
}

inline ParetoList ParetoList::checked(std::vector<ListEntry> entries) {
    const auto keep = detail::nondominated_positions(entries);
    if (keep.size() != entries.size()) {
        throw ConfigError("ParetoList: entries are not mutually non-dominated and distinct");
    }
    return filter_nondominated(std::move(entries));
}

/// Largest max_step over the list (Delta bar).
inline double list_max_step(std::span<const ListEntry> entries) {
    if (entries.empty()) throw std::invalid_argument("list_max_step: empty list");
    double best = max_step(entries.front());
    for (const auto& e : entries) best = std::max(best, max_step(e));
    return best;
}

/// Smallest max_step over the list (xi).
inline double list_min_step(std::span<const ListEntry> entries) {
    if (entries.empty()) throw std::invalid_argument("list_min_step: empty list");
    double best = max_step(entries.front());
    for (const auto& e : entries) best = std::min(best, max_step(e));
    return best;
}

inline double list_max_step(const ParetoList& list) { return list_max_step(std::span(list.entries())); }
inline double list_min_step(const ParetoList& list) { return list_min_step(std::span(list.entries())); }

}  // namespace dfmo

#endif  // DFMO_PARETO_HPP
