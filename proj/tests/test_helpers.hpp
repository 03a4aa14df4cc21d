#ifndef DFMO_TEST_HELPERS_HPP
#define DFMO_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "dfmo/dfmo.hpp"

namespace dfmo::testing {

inline ListEntry entry(Vector f, EntryId id = 0, Vector steps = {1.0, 1.0}) {
    return ListEntry{DecisionPoint(Vector{0.0}), ObjectiveVector(std::move(f)), StepsizeVector(std::move(steps)), id,
                     std::nullopt, 0};
}

inline Vector uniform_vector(std::mt19937_64& rng, std::size_t q, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(q);
    for (double& x : v) x = u(rng);
    return v;
}

inline std::vector<ObjectiveVector> uniform_front(std::mt19937_64& rng, std::size_t m, std::size_t q) {
    std::vector<ObjectiveVector> out;
    for (std::size_t i = 0; i < m; ++i) out.emplace_back(uniform_vector(rng, q));
    return out;
}

/// All-pairs dominance filter: keeps i iff no j dominates it and no earlier j equals it.
inline std::vector<std::size_t> brute_force_nondominated(const std::vector<ObjectiveVector>& objs) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < objs.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < objs.size(); ++j) {
            if (j == i) continue;
            bool le = true, lt = false;
            for (std::size_t t = 0; t < objs[i].size(); ++t) {
                if (objs[j][t] > objs[i][t]) le = false;
                if (objs[j][t] < objs[i][t]) lt = true;
            }
            if ((le && lt) || (le && !lt && j < i)) dominated = true;
        }
        if (!dominated) keep.push_back(i);
    }
    return keep;
}

/// Full list with default parameters for the built-in problems.
inline AlgoParams remark_params() {
    AlgoParams p;
    p.theta = 0.5;
    p.gamma = 0.5;
    p.delta = 0.5;
    p.c = 0.9;
    p.eta = 0.1;
    p.s = 1.0;
    return p;
}

}  // namespace dfmo::testing

#endif  // DFMO_TEST_HELPERS_HPP
