#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dfmo/hypervolume.hpp"
#include "dfmo/pareto.hpp"
#include "test_helpers.hpp"

using namespace dfmo;
using dfmo::testing::uniform_front;
using dfmo::testing::uniform_vector;

namespace {

ReferencePoint ref(Vector v) { return ReferencePoint{ObjectiveVector(std::move(v))}; }

const ReferencePoint kRemarkRho = ref({49.0, 25.0 / 18.0});

// Inclusion-exclusion over all subsets; exact for small fronts.
double inclusion_exclusion(const std::vector<ObjectiveVector>& front, const ReferencePoint& rho) {
    const std::size_t m = front.size(), q = rho.size();
    double total = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        Vector corner(q, -1e300);
        int bits = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) {
                ++bits;
                for (std::size_t t = 0; t < q; ++t) corner[t] = std::max(corner[t], front[i][t]);
            }
        }
        double vol = 1.0;
        for (std::size_t t = 0; t < q; ++t) vol *= rho.rho[t] - corner[t];
        total += (bits % 2 ? 1.0 : -1.0) * vol;
    }
    return total;
}

}  // namespace

TEST(Hypervolume, RemarkSinglePoint) {
    const std::vector<ObjectiveVector> front{ObjectiveVector(Vector{1.0, 0.5})};
    EXPECT_NEAR(hypervolume(front, kRemarkRho), 128.0 / 3.0, 1e-12);
}

TEST(Hypervolume, RemarkIncrease) {
    const std::vector<ObjectiveVector> front{ObjectiveVector(Vector{1.0, 0.5})};
    EXPECT_NEAR(hv_increase(front, ObjectiveVector(Vector{0.0, 16.0 / 18.0}), kRemarkRho), 0.5, 1e-12);
}

TEST(Hypervolume, TwoBoxUnion) {
    const std::vector<ObjectiveVector> front{ObjectiveVector(Vector{0.0, 0.5}), ObjectiveVector(Vector{0.5, 0.0})};
    EXPECT_NEAR(hypervolume(front, ref({1.0, 1.0})), 0.75, 1e-15);
}

TEST(Hypervolume, EmptyFrontIsZero) { EXPECT_EQ(hypervolume({}, ref({1.0, 1.0, 1.0})), 0.0); }

TEST(Hypervolume, MemberOnReferencePointThrows) {
    const std::vector<ObjectiveVector> front{ObjectiveVector(Vector{1.0, 0.5})};
    EXPECT_THROW(hypervolume(front, ref({1.0, 1.0})), std::domain_error);
    const auto clipped = hypervolume_clipped(front, ref({1.0, 1.0}));
    EXPECT_TRUE(clipped.clipped);
    EXPECT_EQ(clipped.value, 0.0);
    const auto inside = hypervolume_clipped(front, ref({2.0, 1.0}));
    EXPECT_FALSE(inside.clipped);
    EXPECT_DOUBLE_EQ(inside.value, 0.5);
}

TEST(Hypervolume, MatchesInclusionExclusion) {
    std::mt19937_64 rng(17);
    for (std::size_t q : {2u, 3u, 4u, 5u}) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto front = uniform_front(rng, 1 + trial % 8, q);
            const auto rho = ref(Vector(q, 1.5));
            const double exact = inclusion_exclusion(front, rho);
            EXPECT_NEAR(hypervolume(front, rho), exact, 1e-12 * std::max(1.0, exact)) << "q=" << q;
        }
    }
}

TEST(HvIncrease, EqualsDifferenceOfVolumes) {
    std::mt19937_64 rng(23);
    for (std::size_t q : {2u, 3u, 4u}) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto front = uniform_front(rng, 1 + trial % 10, q);
            const ObjectiveVector y(uniform_vector(rng, q));
            const auto rho = ref(Vector(q, 2.0));
            std::vector<ObjectiveVector> with = front;
            with.push_back(y);
            const double diff = hypervolume(with, rho) - hypervolume(front, rho);
            EXPECT_NEAR(hv_increase(front, y, rho), std::max(0.0, diff), 1e-12);
        }
    }
}

TEST(HvIncrease, PositiveExactlyForNewNondominatedPoints) {
    std::mt19937_64 rng(29);
    for (std::size_t q : {2u, 3u}) {
        for (int trial = 0; trial < 1000; ++trial) {
            const auto front = uniform_front(rng, 1 + trial % 10, q);
            // Reuse or shift a front member now and then so ties get exercised.
            ObjectiveVector y(uniform_vector(rng, q));
            if (trial % 5 == 0) y = front[trial % front.size()];
            if (trial % 7 == 0) {
                y = front[0];
                y.values[0] += 0.1;
            }
            bool weakly_covered = false;
            for (const auto& f : front) weakly_covered |= weakly_dominates(f.view(), y.view());
            const auto rho = ref(Vector(q, 2.0));
            EXPECT_EQ(hv_increase(front, y, rho) > 1e-12, !weakly_covered);
        }
    }
}

TEST(HvIncrease, BoundedByBoxOfSufficientlyNondominatedPoint) {
    // A point passing the acceptance test at step a gains at least (gamma a^2)^q
    // once rho leaves room for the box [y, y + gamma a^2].
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> astep(0.01, 0.3);
    int checked = 0;
    for (std::size_t q : {2u, 3u}) {
        for (int trial = 0; trial < 2000; ++trial) {
            const auto front = uniform_front(rng, 1 + trial % 6, q);
            const ObjectiveVector y(uniform_vector(rng, q));
            const double a = astep(rng);
            if (!sufficiently_nondominated(y, front, 0.5, a)) continue;
            ++checked;
            const auto rho = ref(Vector(q, 2.0));
            EXPECT_GE(hv_increase(front, y, rho), std::pow(0.5 * a * a, static_cast<double>(q)) - 1e-12);
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(Hypervolume, Properties) {
    std::mt19937_64 rng(37);
    for (std::size_t q : {2u, 3u, 4u}) {
        for (int trial = 0; trial < 200; ++trial) {
            auto front = uniform_front(rng, 2 + trial % 8, q);
            const auto rho = ref(Vector(q, 1.0 + 1e-9));
            const double hv = hypervolume(front, rho);

            // Permutation invariance.
            std::shuffle(front.begin(), front.end(), rng);
            EXPECT_NEAR(hypervolume(front, rho), hv, 1e-12);

            // Monotone under insertion, and dominated points add nothing.
            auto grown = front;
            grown.emplace_back(uniform_vector(rng, q));
            EXPECT_GE(hypervolume(grown, rho), hv - 1e-12);
            auto with_dominated = front;
            Vector worse = front[0].values;
            for (double& v : worse) v = std::min(1.0, v + 0.01);
            with_dominated.emplace_back(worse);
            EXPECT_NEAR(hypervolume(with_dominated, rho), hv, 1e-12);

            EXPECT_GE(hv, 0.0);
            EXPECT_LE(hv, std::pow(1.0 + 1e-9, static_cast<double>(q)) + 1e-12);
        }
    }
}

TEST(HypervolumeMc, ConvergesToExact) {
    std::mt19937_64 rng(41);
    for (std::size_t q : {2u, 3u}) {
        const auto front = uniform_front(rng, 6, q);
        const auto rho = ref(Vector(q, 1.0));
        const ObjectiveVector lower(Vector(q, 0.0));
        const double exact = hypervolume(front, rho);
        const double mc = hypervolume_mc(front, rho, lower, 200000, 5);
        EXPECT_NEAR(mc, exact, 0.02 * exact);
        EXPECT_EQ(mc, hypervolume_mc(front, rho, lower, 200000, 5));
    }
}

TEST(HypervolumeMc, Errors) {
    const std::vector<ObjectiveVector> front{ObjectiveVector(Vector{0.5, 0.5})};
    EXPECT_THROW(hypervolume_mc(front, ref({1.0, 1.0}), ObjectiveVector(Vector{0.0, 0.0}), 0, 1),
                 std::invalid_argument);
    EXPECT_THROW(hypervolume_mc(front, ref({1.0, 1.0}), ObjectiveVector(Vector{1.0, 0.0}), 10, 1),
                 std::invalid_argument);
    EXPECT_EQ(hypervolume_mc({}, ref({1.0, 1.0}), ObjectiveVector(Vector{0.0, 0.0}), 10, 1), 0.0);
}

TEST(MakeReference, OffsetsByS) {
    const auto rho = make_reference(ObjectiveVector(Vector{49.0, 25.0 / 18.0}), 1.0);
    EXPECT_EQ(rho.rho.values, (Vector{50.0, 25.0 / 18.0 + 1.0}));
    EXPECT_THROW(make_reference(ObjectiveVector(Vector{1.0}), 0.0), ConfigError);
    EXPECT_THROW(make_reference(ObjectiveVector(Vector{1.0}), -1.0), ConfigError);
}
