/**
 * @file hypervolume.hpp
 * @brief Exact and Monte Carlo hypervolume indicator.
 *
 * The exact routine is a recursive dimension sweep: points are sorted by the
 * last objective and the dominated region is cut into slabs, each slab being a
 * (q-1)-dimensional hypervolume times its thickness. q = 1 and q = 2 have
 * closed forms. Cost is O(m^{q-1} log m), fine for q <= 5 and moderate fronts.
 */

#ifndef DFMO_HYPERVOLUME_HPP
#define DFMO_HYPERVOLUME_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pareto.hpp"
#include "types.hpp"

namespace dfmo {

/// Corner rho closing the hypervolume box.
struct ReferencePoint {
    ObjectiveVector rho;

    std::size_t size() const { return rho.size(); }
    std::span<const double> view() const { return rho.view(); }
};

/// rho_i = observed_max_i + s.
inline ReferencePoint make_reference(const ObjectiveVector& observed_max, double s) {
    if (!(s > 0.0)) throw ConfigError("make_reference: offset s must be > 0");
    Vector rho(observed_max.values);
    for (double& v : rho) v += s;
    return ReferencePoint{ObjectiveVector(std::move(rho))};
}

namespace detail {

// Points are assumed weakly below ref in every coordinate; equality yields a
// zero-thickness box.
inline double hv_recursive(std::vector<Vector> pts, std::span<const double> ref, std::size_t q) {
    if (pts.empty()) return 0.0;
    if (q == 1) {
        double lo = pts.front()[0];
        for (const auto& p : pts) lo = std::min(lo, p[0]);
        return ref[0] - lo;
    }
    if (q == 2) {
        std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
            return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
        });
        double area = 0.0;
        double floor2 = ref[1];
        for (const auto& p : pts) {
            if (p[1] < floor2) {
                area += (ref[0] - p[0]) * (floor2 - p[1]);
                floor2 = p[1];
            }
        }
        return area;
    }
    const std::size_t last = q - 1;
    std::sort(pts.begin(), pts.end(), [last](const Vector& a, const Vector& b) { return a[last] < b[last]; });
    double volume = 0.0;
    std::vector<Vector> active;
    active.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Vector proj(pts[i].begin(), pts[i].begin() + static_cast<std::ptrdiff_t>(last));
        // Drop projected points already covered by an active one.
        bool covered = false;
        for (const auto& a : active) {
            if (weakly_dominates(a, proj)) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            std::erase_if(active, [&](const Vector& a) { return weakly_dominates(proj, a); });
            active.push_back(std::move(proj));
        }
        const double top = (i + 1 < pts.size()) ? pts[i + 1][last] : ref[last];
        const double thickness = top - pts[i][last];
        if (thickness > 0.0) volume += thickness * hv_recursive(active, ref.first(last), last);
    }
    return volume;
}

inline void check_front(std::span<const ObjectiveVector> front, const ReferencePoint& rho) {
    for (const auto& v : front) {
        require_same_size(v.view(), rho.view(), "hypervolume");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] < rho.rho[i])) {
                throw std::domain_error("hypervolume: front member not strictly below the reference point in "
                                        "objective " + std::to_string(i));
            }
        }
    }
}

}  // namespace detail

/// Volume of the union of boxes [a, rho] over the front. Every member must be
/// strictly below rho in every objective.
inline double hypervolume(std::span<const ObjectiveVector> front, const ReferencePoint& rho) {
    detail::check_front(front, rho);
    std::vector<Vector> pts;
    pts.reserve(front.size());
    for (const auto& v : front) pts.push_back(v.values);
    return detail::hv_recursive(std::move(pts), rho.view(), rho.size());
}

struct ClippedVolume {
    double value = 0.0;
    bool clipped = false;  ///< some member reached or exceeded rho
};

/// Hypervolume where members beyond rho are clipped to it, so they only
/// contribute the part of their box lying inside [., rho].
inline ClippedVolume hypervolume_clipped(std::span<const ObjectiveVector> front, const ReferencePoint& rho) {
    ClippedVolume out;
    std::vector<Vector> pts;
    pts.reserve(front.size());
    for (const auto& v : front) {
        detail::require_same_size(v.view(), rho.view(), "hypervolume_clipped");
        Vector p = v.values;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!(p[i] < rho.rho[i])) {
                out.clipped = true;
                p[i] = rho.rho[i];
            }
        }
        pts.push_back(std::move(p));
    }
    out.value = detail::hv_recursive(std::move(pts), rho.view(), rho.size());
    return out;
}

/**
 * @brief Hypervolume gained by adding y to the front.
 *
 * Computed as the exclusive volume of y: vol([y, rho]) minus the hypervolume of
 * the front members clipped from below at y. Returns exactly 0 whenever some
 * member weakly dominates y, and is never negative.
 */
inline double hv_increase(std::span<const ObjectiveVector> front, const ObjectiveVector& y,
                          const ReferencePoint& rho) {
    detail::check_front(front, rho);
    detail::check_front(std::span(&y, 1), rho);
    for (const auto& v : front) {
        if (weakly_dominates(v.view(), y.view())) return 0.0;
    }
    double box = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) box *= rho.rho[i] - y[i];
    std::vector<Vector> limited;
    limited.reserve(front.size());
    for (const auto& v : front) {
        Vector p(v.values);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(p[i], y[i]);
        limited.push_back(std::move(p));
    }
    const double covered = detail::hv_recursive(std::move(limited), rho.view(), rho.size());
    return std::max(0.0, box - covered);
}

/**
 * @brief Monte Carlo estimate: uniform samples in [lower, rho], counting those
 * dominated by some front member. Deterministic for a fixed seed.
 */
inline double hypervolume_mc(std::span<const ObjectiveVector> front, const ReferencePoint& rho,
                             const ObjectiveVector& lower, std::size_t samples, std::uint64_t seed) {
    detail::require_same_size(lower.view(), rho.view(), "hypervolume_mc");
    if (samples == 0) throw std::invalid_argument("hypervolume_mc: samples must be >= 1");
    const std::size_t q = rho.size();
    double box = 1.0;
    for (std::size_t i = 0; i < q; ++i) {
        if (!(lower[i] < rho.rho[i])) throw std::invalid_argument("hypervolume_mc: degenerate sampling box");
        box *= rho.rho[i] - lower[i];
    }
    if (front.empty()) return 0.0;
    for (const auto& v : front) detail::require_same_size(v.view(), rho.view(), "hypervolume_mc");

    std::mt19937_64 rng(seed);
    std::vector<std::uniform_real_distribution<double>> dist;
    for (std::size_t i = 0; i < q; ++i) dist.emplace_back(lower[i], rho.rho[i]);
    Vector sample(q);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < q; ++i) sample[i] = dist[i](rng);
        for (const auto& v : front) {
            if (weakly_dominates(v.view(), sample)) {
                ++hits;
                break;
            }
        }
    }
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace dfmo

#endif  // DFMO_HYPERVOLUME_HPP
