/**
 * @file problems.hpp
 * @brief Built-in test problems with known Pareto data, and the adapter that
 * turns an external line-protocol server into a Problem.
 */

#ifndef DFMO_PROBLEMS_HPP
#define DFMO_PROBLEMS_HPP

#include <charconv>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protocol.hpp"
#include "types.hpp"

namespace dfmo {

struct Problem {
    std::string name;
    std::size_t n = 0;
    std::size_t q = 0;  ///< 0 for external problems until the first reply
    ObjectiveFn eval;
    std::string pareto_description;
    std::vector<DecisionPoint> known_pareto;  ///< sample of Pareto-optimal points
    std::vector<DecisionPoint> suggested_start;
    std::optional<ObjectiveVector> f_max;  ///< upper bound of the objectives over the start's level set
};

namespace problems {

/// min { x^2, (x - 4)^2 / 18 }, Pareto set [0, 4].
inline Problem remark_a1() {
    Problem p;
    p.name = "remark_a1";
    p.n = 1;
    p.q = 2;
    p.eval = [](std::span<const double> x) {
        const double t = x[0];
        return Vector{t * t, (t - 4.0) * (t - 4.0) / 18.0};
    };
    p.pareto_description = "interval [0, 4]";
    for (int i = 0; i <= 16; ++i) p.known_pareto.emplace_back(Vector{0.25 * i});
    p.suggested_start = {DecisionPoint(Vector{1.0})};
    // Largest objective values over points not dominated by x0 = 1.
    p.f_max = ObjectiveVector(Vector{49.0, 25.0 / 18.0});
    return p;
}

/// min { |x|^2, |x - 4*1|^2 / 18 } in R^n, Pareto set the segment [0, 4*1].
inline Problem remark_a1_nd(std::size_t n) {
    if (n < 1) throw ConfigError("remark_a1_nd: n must be >= 1");
    Problem p;
    p.name = "remark_a1_n" + std::to_string(n);
    p.n = n;
    p.q = 2;
    p.eval = [](std::span<const double> x) {
        double a = 0.0, b = 0.0;
        for (double v : x) {
            a += v * v;
            b += (v - 4.0) * (v - 4.0);
        }
        return Vector{a, b / 18.0};
    };
    p.pareto_description = "segment t*1, t in [0, 4]";
    for (int i = 0; i <= 16; ++i) p.known_pareto.emplace_back(Vector(n, 0.25 * i));
    p.suggested_start = {DecisionPoint(Vector(n, 1.0))};
    // Non-dominated w.r.t. x0 = 1 means |x|^2 < n or |x - 4|^2 < 9n; the
    // extremes are (7^2 n, 25n/18).
    p.f_max = ObjectiveVector(Vector{49.0 * static_cast<double>(n), 25.0 * static_cast<double>(n) / 18.0});
    return p;
}

/// Three objectives |x - a_i|^2 with anchors (0,0), (1,0), (0,1) in R^2; the
/// Pareto set is their convex hull (the unit right triangle).
inline Problem tri_sphere() {
    Problem p;
    p.name = "tri_sphere";
    p.n = 2;
    p.q = 3;
    p.eval = [](std::span<const double> x) {
        const double a = x[0], b = x[1];
        return Vector{a * a + b * b, (a - 1.0) * (a - 1.0) + b * b, a * a + (b - 1.0) * (b - 1.0)};
    };
    p.pareto_description = "triangle with vertices (0,0), (1,0), (0,1)";
    for (int i = 0; i <= 4; ++i) {
        for (int j = 0; i + j <= 4; ++j) p.known_pareto.emplace_back(Vector{0.25 * i, 0.25 * j});
    }
    p.suggested_start = {DecisionPoint(Vector{0.5, 0.5})};
    return p;
}

}  // namespace problems

inline std::vector<std::string> builtin_names() {
    return {"remark_a1", "remark_a1_n<N> (e.g. remark_a1_n2)", "tri_sphere"};
}

/// Looks up a built-in problem; throws ConfigError for unknown names.
inline Problem builtin(std::string_view name) {
    if (name == "remark_a1") return problems::remark_a1();
    if (name == "tri_sphere") return problems::tri_sphere();
    constexpr std::string_view prefix = "remark_a1_n";
    if (name.substr(0, prefix.size()) == prefix && name.size() > prefix.size()) {
        const auto digits = name.substr(prefix.size());
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1) return problems::remark_a1_nd(n);
    }
    throw ConfigError("unknown built-in problem '" + std::string(name) + "'");
}

/**
 * @brief A Problem whose objective is served by an external process over the
 * line protocol. The process is started here and lives as long as any copy of
 * the returned Problem's eval.
 */
inline Problem external_blackbox(const std::string& command, std::vector<DecisionPoint> start,
                                 std::size_t q = 0, int timeout_ms = timeout_from_env()) {
    if (start.empty()) throw ConfigError("external_blackbox: at least one start point is required");
    auto client = std::make_shared<LineProtocolClient>(command, timeout_ms);
    Problem p;
    p.name = "external";
    p.n = start.front().size();
    p.q = q;
    p.eval = [client, q](std::span<const double> x) { return client->evaluate(x, q); };
    p.pareto_description = "unknown";
    p.suggested_start = std::move(start);
    return p;
}

}  // namespace dfmo

#endif  // DFMO_PROBLEMS_HPP
