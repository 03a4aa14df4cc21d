#ifndef DFMO_EVALUATOR_HPP
#define DFMO_EVALUATOR_HPP

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "types.hpp"

namespace dfmo {

namespace detail {

inline std::string format_vector(std::span<const double> v) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

}  // namespace detail

/**
 * @brief Counts oracle calls and enforces the evaluation budget.
 *
 * evaluate() returns nullopt once the budget is spent; it never issues a call
 * beyond it. A non-finite objective value throws OracleError naming the point.
 */
class Evaluator {
public:
    explicit Evaluator(ObjectiveFn f, std::optional<std::size_t> budget = std::nullopt)
        : f_(std::move(f)), budget_(budget) {}

    std::optional<ObjectiveVector> evaluate(const DecisionPoint& x) {
        if (exhausted()) return std::nullopt;
        ++count_;
        Vector values = f_(x.view());
        if (values.empty() || !detail::all_finite(values)) {
            throw OracleError("objective returned a non-finite or empty value at x = " +
                              detail::format_vector(x.view()) + ": " + detail::format_vector(values));
        }
        if (q_ == 0) {
            q_ = values.size();
        } else if (values.size() != q_) {
            throw OracleError("objective changed its number of values from " + std::to_string(q_) + " to " +
                              std::to_string(values.size()));
        }
        return ObjectiveVector(std::move(values));
    }

    std::size_t count() const { return count_; }
    bool exhausted() const { return budget_ && count_ >= *budget_; }
    std::optional<std::size_t> budget() const { return budget_; }

private:
    ObjectiveFn f_;
    std::optional<std::size_t> budget_;
    std::size_t count_ = 0;
    std::size_t q_ = 0;
};

}  // namespace dfmo

#endif  // DFMO_EVALUATOR_HPP
