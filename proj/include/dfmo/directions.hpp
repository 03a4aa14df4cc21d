#ifndef DFMO_DIRECTIONS_HPP
#define DFMO_DIRECTIONS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "types.hpp"

namespace dfmo {

/// r >= 2 unit search directions in R^n.
class DirectionSet {
public:
    explicit DirectionSet(std::vector<Vector> dirs) : dirs_(std::move(dirs)) {
        if (dirs_.size() < 2) throw ConfigError("DirectionSet: need at least two directions");
        const std::size_t n = dirs_.front().size();
        if (n == 0) throw ConfigError("DirectionSet: zero-dimensional direction");
        for (const auto& d : dirs_) {
            if (d.size() != n) throw DimensionError("DirectionSet: directions of different dimension");
            double sq = 0.0;
            for (double v : d) sq += v * v;
            if (std::abs(std::sqrt(sq) - 1.0) > 1e-12) throw ConfigError("DirectionSet: direction is not unit norm");
        }
    }

    std::size_t size() const { return dirs_.size(); }
    std::size_t dimension() const { return dirs_.front().size(); }
    const Vector& operator[](std::size_t i) const { return dirs_[i]; }
    const std::vector<Vector>& dirs() const { return dirs_; }
    auto begin() const { return dirs_.begin(); }
    auto end() const { return dirs_.end(); }

private:
    std::vector<Vector> dirs_;
};

/// The 2n coordinate directions +e_1, -e_1, ..., +e_n, -e_n followed by
/// r_extra seeded random unit vectors.
inline DirectionSet make_directions(std::size_t n, std::size_t r_extra, std::uint64_t seed) {
    if (n < 1) throw ConfigError("make_directions: n must be >= 1");
    std::vector<Vector> dirs;
    dirs.reserve(2 * n + r_extra);
    for (std::size_t j = 0; j < n; ++j) {
        Vector plus(n, 0.0), minus(n, 0.0);
        plus[j] = 1.0;
        minus[j] = -1.0;
        dirs.push_back(std::move(plus));
        dirs.push_back(std::move(minus));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    while (dirs.size() < 2 * n + r_extra) {
        Vector d(n);
        double sq = 0.0;
        for (double& v : d) {
            v = normal(rng);
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm < 1e-8) continue;
        for (double& v : d) v /= norm;
        dirs.push_back(std::move(d));
    }
    return DirectionSet(std::move(dirs));
}

}  // namespace dfmo

#endif  // DFMO_DIRECTIONS_HPP
