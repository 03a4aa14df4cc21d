/**
 * @file criticality.hpp
 * @brief Pareto-criticality diagnostics from finite-difference gradients.
 *
 * mu(x) is evaluated in its dual form: the minimum Euclidean norm over convex
 * combinations of the objective gradients. These measures are diagnostics
 * only; the solvers never consult them.
 */

#ifndef DFMO_CRITICALITY_HPP
#define DFMO_CRITICALITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "directions.hpp"
#include "evaluator.hpp"
#include "pareto.hpp"
#include "types.hpp"

namespace dfmo {

/// Central-difference estimates of the q objective gradients at one point.
struct GradientEstimate {
    std::vector<Vector> grads;  ///< grads[i] estimates the gradient of f_i
    double fd_step = 0.0;

    std::size_t objectives() const { return grads.size(); }
    std::size_t dimension() const { return grads.empty() ? 0 : grads.front().size(); }
};

class CriticalityConvergenceError : public std::runtime_error {
public:
    CriticalityConvergenceError(const std::string& what, double best)
        : std::runtime_error(what), best_value(best) {}
    double best_value;
};

inline constexpr double kDefaultFdStep = 1e-5;

/// (f(x + h e_j) - f(x - h e_j)) / 2h for every coordinate; 2n oracle calls,
/// each added to *calls when given.
inline GradientEstimate fd_gradients(const ObjectiveFn& f, const DecisionPoint& x, double h,
                                     std::size_t* calls = nullptr) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradients: step h must be > 0");
    const std::size_t n = x.size();
    GradientEstimate est;
    est.fd_step = h;
    Vector probe = x.coords;
    for (std::size_t j = 0; j < n; ++j) {
        probe[j] = x[j] + h;
        Vector up = f(probe);
        probe[j] = x[j] - h;
        Vector down = f(probe);
        probe[j] = x[j];
        if (calls) *calls += 2;
        if (!detail::all_finite(up) || !detail::all_finite(down) || up.size() != down.size() || up.empty()) {
            throw OracleError("fd_gradients: non-finite or inconsistent objective values near x = " +
                              detail::format_vector(x.view()));
        }
        if (est.grads.empty()) est.grads.assign(up.size(), Vector(n, 0.0));
        if (est.grads.size() != up.size()) throw OracleError("fd_gradients: objective count changed");
        for (std::size_t i = 0; i < up.size(); ++i) est.grads[i][j] = (up[i] - down[i]) / (2.0 * h);
    }
    return est;
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Euclidean projection onto the unit simplex (sort-based).
inline Vector project_simplex(const Vector& v) {
    Vector u(v);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumsum += u[k];
        const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) tau = t;
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
    return out;
}

inline Vector gram_times(const std::vector<Vector>& gram, const Vector& lam) {
    Vector out(lam.size(), 0.0);
    for (std::size_t i = 0; i < lam.size(); ++i) out[i] = dot(gram[i], lam);
    return out;
}

// Frank-Wolfe gap of h(l) = l'Ql/2 on the simplex; bounds h(l) - h*.
inline double fw_gap(const std::vector<Vector>& gram, const Vector& lam) {
    const Vector g = gram_times(gram, lam);
    return dot(g, lam) - *std::min_element(g.begin(), g.end());
}

// Minimiser of l'Ql/2 over the affine hull of the given indices (KKT system
// with one multiplier); entries may be negative. Empty when singular.
inline Vector affine_minimizer(const std::vector<Vector>& gram, const std::vector<std::size_t>& support) {
    const std::size_t s = support.size();
    if (s == 0) return {};
    const std::size_t dim = s + 1;
    std::vector<Vector> a(dim, Vector(dim + 1, 0.0));
    for (std::size_t r = 0; r < s; ++r) {
        for (std::size_t c = 0; c < s; ++c) a[r][c] = gram[support[r]][support[c]];
        a[r][s] = 1.0;
    }
    for (std::size_t c = 0; c < s; ++c) a[s][c] = 1.0;
    a[s][dim] = 1.0;
    double scale = 1.0;
    for (std::size_t r = 0; r < s; ++r) scale = std::max(scale, std::abs(a[r][r]));
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < dim; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-14 * scale) return {};
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < dim; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= dim; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    Vector out(s);
    for (std::size_t r = 0; r < s; ++r) out[r] = a[r][dim] / a[r][r];
    return out;
}

// Exact solve on the support of lam; empty when singular or infeasible.
inline Vector polish_on_support(const std::vector<Vector>& gram, const Vector& lam) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (lam[i] > 1e-9) support.push_back(i);
    }
    const Vector v = affine_minimizer(gram, support);
    if (v.empty()) return {};
    Vector out(lam.size(), 0.0);
    for (std::size_t r = 0; r < support.size(); ++r) {
        if (v[r] < 0.0) return {};
        out[support[r]] = v[r];
    }
    return out;
}

// Wolfe's minimum-norm-point method on the Gram matrix: keeps an affinely
// independent corral and moves to its affine minimiser, clipping back into
// the hull when that minimiser leaves it. Empty if it stalls.
inline Vector wolfe_min_norm(const std::vector<Vector>& gram) {
    const std::size_t q = gram.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < q; ++i) scale = std::max(scale, gram[i][i]);
    const double eps = 1e-14 * std::max(scale, 1e-300);

    std::size_t first = 0;
    for (std::size_t i = 1; i < q; ++i) {
        if (gram[i][i] < gram[first][first]) first = i;
    }
    std::vector<std::size_t> corral{first};
    Vector w{1.0};
    auto full = [&] {
        Vector lam(q, 0.0);
        for (std::size_t r = 0; r < corral.size(); ++r) lam[corral[r]] = w[r];
        return lam;
    };

    for (std::size_t major = 0; major < 50 * q + 50; ++major) {
        const Vector lam = full();
        const Vector g = gram_times(gram, lam);
        const double xx = dot(g, lam);
        const std::size_t j = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
        if (xx - g[j] <= eps || std::find(corral.begin(), corral.end(), j) != corral.end()) return lam;
        corral.push_back(j);
        w.push_back(0.0);

        for (std::size_t minor = 0; minor <= q; ++minor) {
            const Vector v = affine_minimizer(gram, corral);
            if (v.empty()) return {};
            if (std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; })) {
                w = v;
                break;
            }
            double theta = 1.0;
            for (std::size_t r = 0; r < v.size(); ++r) {
                if (v[r] <= 0.0 && w[r] - v[r] > 0.0) theta = std::min(theta, w[r] / (w[r] - v[r]));
            }
            for (std::size_t r = 0; r < v.size(); ++r) w[r] = theta * v[r] + (1.0 - theta) * w[r];
            std::vector<std::size_t> kept;
            Vector kept_w;
            for (std::size_t r = 0; r < corral.size(); ++r) {
                if (w[r] > 1e-15) {
                    kept.push_back(corral[r]);
                    kept_w.push_back(w[r]);
                }
            }
            if (kept.empty()) return {};
            const double total = std::accumulate(kept_w.begin(), kept_w.end(), 0.0);
            for (double& x : kept_w) x /= total;
            corral = std::move(kept);
            w = std::move(kept_w);
        }
    }
    return {};
}

inline double combo_norm(const std::vector<Vector>& grads, const Vector& lam) {
    Vector sum(grads.front().size(), 0.0);
    for (std::size_t i = 0; i < grads.size(); ++i) {
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += lam[i] * grads[i][j];
    }
    return std::sqrt(dot(sum, sum));
}

}  // namespace detail

inline constexpr double kMuTolerance = 1e-10;
inline constexpr std::size_t kMuIterationCap = 200000;

/// min over the unit simplex of || sum_i lambda_i g_i ||.
inline double mu(const GradientEstimate& est) {
    const auto& g = est.grads;
    if (g.empty()) throw std::invalid_argument("mu: no gradients");
    const std::size_t q = g.size();
    for (const auto& gi : g) detail::require_same_size(gi, g.front(), "mu");

    if (q == 1) return std::sqrt(detail::dot(g[0], g[0]));

    if (q == 2) {
        // lambda g1 + (1 - lambda) g2, lambda* = (g2 - g1).g2 / |g1 - g2|^2 clamped to [0,1].
        Vector diff(g[0].size());
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = g[0][j] - g[1][j];
        const double dd = detail::dot(diff, diff);
        double lam = 0.0;
        if (dd > 0.0) lam = std::clamp(-detail::dot(diff, g[1]) / dd, 0.0, 1.0);
        return detail::combo_norm(g, Vector{lam, 1.0 - lam});
    }

    std::vector<Vector> gram(q, Vector(q));
    double trace = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j < q; ++j) gram[i][j] = detail::dot(g[i], g[j]);
        trace += gram[i][i];
    }
    if (trace == 0.0) return 0.0;
    const double tol = kMuTolerance * (1.0 + trace);

    const Vector exact = detail::wolfe_min_norm(gram);
    if (!exact.empty() && detail::fw_gap(gram, exact) <= tol) return detail::combo_norm(g, exact);

    // Fallback: accelerated projected gradient with adaptive restart; step 1/L, L <= trace(Q).
    const double step = 1.0 / trace;
    Vector lam(q, 1.0 / static_cast<double>(q));
    Vector yk = lam;
    double t = 1.0;
    auto value = [&](const Vector& l) { return 0.5 * detail::dot(detail::gram_times(gram, l), l); };
    Vector best = lam;
    double best_val = value(lam);
    for (std::size_t it = 0; it < kMuIterationCap; ++it) {
        const Vector grad = detail::gram_times(gram, yk);
        Vector next(q);
        for (std::size_t i = 0; i < q; ++i) next[i] = yk[i] - step * grad[i];
        next = detail::project_simplex(next);
        const double next_val = value(next);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (next_val > value(lam)) {
            yk = lam;  // restart momentum
            t = 1.0;
            continue;
        }
        for (std::size_t i = 0; i < q; ++i) yk[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - lam[i]);
        lam = std::move(next);
        t = t_next;
        if (next_val < best_val) {
            best_val = next_val;
            best = lam;
        }
        if (detail::fw_gap(gram, lam) <= 1e-2 * tol) break;
    }

    // The support is usually identified long before the iterates settle, so
    // an exact solve on it removes the remaining first-order error.
    const Vector polished = detail::polish_on_support(gram, best);
    if (!polished.empty() && value(polished) <= best_val) best = polished;
    const double result = detail::combo_norm(g, best);
    if (detail::fw_gap(gram, best) > tol) {
        throw CriticalityConvergenceError("mu: projected gradient did not reach tolerance", result);
    }
    return result;
}

struct DirectionalCriticality {
    double value = 0.0;
    bool no_common_descent = false;  ///< value <= 0: no direction in D decreases every objective
};

/// -min_{d in D} max_i g_i'd.
inline DirectionalCriticality mu_D(const GradientEstimate& est, const DirectionSet& dirs) {
    if (est.grads.empty()) throw std::invalid_argument("mu_D: no gradients");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& gi : est.grads) {
            detail::require_same_size(gi, d, "mu_D");
            worst = std::max(worst, detail::dot(gi, d));
        }
        best = std::min(best, worst);
    }
    return DirectionalCriticality{-best, -best <= 0.0};
}

/// Gamma(X) = max over the list of mu.
inline double gamma_max(const ParetoList& list, const ObjectiveFn& f, double h, std::size_t* calls = nullptr) {
    if (list.empty()) throw std::invalid_argument("gamma_max: empty list");
    double out = 0.0;
    for (const auto& e : list) out = std::max(out, mu(fd_gradients(f, e.point, h, calls)));
    return out;
}

/// Gamma bar(X) = min over the list of mu.
inline double gamma_min(const ParetoList& list, const ObjectiveFn& f, double h, std::size_t* calls = nullptr) {
    if (list.empty()) throw std::invalid_argument("gamma_min: empty list");
    double out = std::numeric_limits<double>::infinity();
    for (const auto& e : list) out = std::min(out, mu(fd_gradients(f, e.point, h, calls)));
    return out;
}

}  // namespace dfmo

#endif  // DFMO_CRITICALITY_HPP
