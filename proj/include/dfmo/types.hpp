/**
 * @file types.hpp
 * @brief Domain types shared by every solver component: points, objective
 * vectors, stepsize vectors, list entries and algorithm parameters.
 */

#ifndef DFMO_TYPES_HPP
#define DFMO_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfmo {

using Vector = std::vector<double>;
using EntryId = std::uint64_t;

/// Invalid parameters or configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mismatched vector lengths passed to a dominance or volume routine.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The objective oracle failed: non-finite value, protocol fault, timeout.
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void require_same_size(std::span<const double> a, std::span<const double> b,
                              const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

}  // namespace detail

/// A point of the decision space R^n.
struct DecisionPoint {
    Vector coords;

    DecisionPoint() = default;
    explicit DecisionPoint(Vector c) : coords(std::move(c)) {
        if (!detail::all_finite(coords)) throw ConfigError("DecisionPoint: non-finite coordinate");
    }
    std::size_t size() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    std::span<const double> view() const { return coords; }
    bool operator==(const DecisionPoint&) const = default;
};

/// The q objective values F(x) of one point. Never holds NaN or infinities.
struct ObjectiveVector {
    Vector values;

    ObjectiveVector() = default;
    explicit ObjectiveVector(Vector v) : values(std::move(v)) {
        if (values.empty()) throw ConfigError("ObjectiveVector: needs at least one objective");
        if (!detail::all_finite(values)) throw OracleError("ObjectiveVector: non-finite objective value");
    }
    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    std::span<const double> view() const { return values; }
    bool operator==(const ObjectiveVector&) const = default;
};

/// Per-direction stepsizes, one strictly positive value per search direction.
struct StepsizeVector {
    Vector alphas;

    StepsizeVector() = default;
    explicit StepsizeVector(Vector a) : alphas(std::move(a)) {
        if (alphas.empty()) throw ConfigError("StepsizeVector: needs at least one component");
        for (double v : alphas) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError("StepsizeVector: every stepsize must be finite and > 0");
            }
        }
    }
    std::size_t size() const { return alphas.size(); }
    double operator[](std::size_t i) const { return alphas[i]; }
    bool operator==(const StepsizeVector&) const = default;

    StepsizeVector scaled(double factor) const {
        Vector out(alphas.size());
        for (std::size_t i = 0; i < alphas.size(); ++i) out[i] = factor * alphas[i];
        return StepsizeVector(std::move(out));
    }
};

/// A (point, stepsizes) pair of the solver's list, with cached objectives and
/// lineage metadata. Lineage never influences algorithmic decisions.
struct ListEntry {
    DecisionPoint point;
    ObjectiveVector objectives;
    StepsizeVector steps;
    EntryId id = 0;
    std::optional<EntryId> parent_id;
    std::size_t born_iter = 0;
};

/// Stopping criteria. At least one must be set.
struct StoppingRule {
    std::optional<std::size_t> max_iters;
    std::optional<std::size_t> max_evals;
    std::optional<double> delta_tol;

    void validate() const {
        if (!max_iters && !max_evals && !delta_tol) {
            throw ConfigError("StoppingRule: at least one of max_iters, max_evals, delta_tol must be set");
        }
        if (delta_tol && !(*delta_tol > 0.0)) throw ConfigError("StoppingRule: delta_tol must be > 0");
    }
};

/// Algorithm constants. The constraint eta < gamma^q depends on the number of
/// objectives, so it is checked by validate(q) once q is known.
struct AlgoParams {
    double theta = 0.5;   ///< stepsize reduction factor on failure
    double gamma = 0.5;   ///< sufficient non-domination constant
    double delta = 0.5;   ///< expansion factor (beta <- alpha / delta)
    double c = 0.9;       ///< fraction of the reference step used as lower bound
    double eta = 0.1;     ///< weight of the step term in the cost function
    double s = 1.0;       ///< reference-point offset
    double initial_step = 1.0;
    std::uint64_t seed = 0;
    StoppingRule stop{std::nullopt, 100000, 1e-3};

    void validate(std::size_t q) const {
        auto open_unit = [](double v, const char* name) {
            if (!(v > 0.0 && v < 1.0)) {
                throw ConfigError(std::string(name) + " must lie in the open interval (0,1), got " +
                                  std::to_string(v));
            }
        };
        open_unit(theta, "theta");
        open_unit(gamma, "gamma");
        open_unit(delta, "delta");
        open_unit(c, "c");
        if (q < 1) throw ConfigError("number of objectives q must be >= 1");
        const double gq = std::pow(gamma, static_cast<double>(q));
        if (!(eta > 0.0 && eta < gq)) {
            throw ConfigError("eta must satisfy 0 < eta < gamma^q (gamma^q = " + std::to_string(gq) +
                              " for q = " + std::to_string(q) + "), got eta = " + std::to_string(eta));
        }
        if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("s must be a positive finite offset");
        if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
            throw ConfigError("initial_step must be a positive finite stepsize");
        }
        stop.validate();
    }

    /// Lower bound on the per-iteration cost decrease, relative to Delta^{2q}:
    /// min{ eta (1 - theta^{2q}) / theta^{2q},  gamma^q c^{2q},  gamma^q - eta }.
    double decrease_constant(std::size_t q) const {
        const double qd = static_cast<double>(q);
        const double t2q = std::pow(theta, 2.0 * qd);
        const double gq = std::pow(gamma, qd);
        return std::min({eta * (1.0 - t2q) / t2q, gq * std::pow(c, 2.0 * qd), gq - eta});
    }
};

/// Vector-valued black box F : R^n -> R^q.
using ObjectiveFn = std::function<Vector(std::span<const double>)>;

}  // namespace dfmo

#endif  // DFMO_TYPES_HPP
