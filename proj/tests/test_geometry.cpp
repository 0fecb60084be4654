#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"

using gss::Rng;
using gss::geometry::GradientSet;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
    VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

GradientSet random_set(std::size_t m, Eigen::Index d, Rng& rng) {
    std::vector<VectorXd> vs;
    for (std::size_t i = 0; i < m; ++i) vs.push_back(oracle::random_vector(d, rng));
    return GradientSet(std::move(vs));
}

}  // namespace

TEST(Cosine, KnownAngles) {
    EXPECT_DOUBLE_EQ(gss::geometry::cosine(vec({1, 0}), vec({3, 0})), 1.0);
    EXPECT_DOUBLE_EQ(gss::geometry::cosine(vec({1, 0}), vec({0, 2})), 0.0);
    EXPECT_DOUBLE_EQ(gss::geometry::cosine(vec({1, 1}), vec({-2, -2})), -1.0);
    EXPECT_THROW(gss::geometry::cosine(vec({0, 0}), vec({1, 0})), gss::DegenerateVectorError);
    EXPECT_THROW(gss::geometry::cosine(vec({1, 0}), vec({1, 0, 0})), gss::ShapeError);
}

TEST(Surrogate, HandComputedSets) {
    EXPECT_DOUBLE_EQ(gss::geometry::surrogate(GradientSet({vec({1, 0}), vec({2, 0})})), 4.0);
    EXPECT_DOUBLE_EQ(gss::geometry::surrogate(GradientSet({vec({1, 0}), vec({0, 1})})), 2.0);
    EXPECT_DOUBLE_EQ(gss::geometry::surrogate(GradientSet({vec({1, 0}), vec({-1, 0})})), 0.0);
    EXPECT_THROW(gss::geometry::surrogate(GradientSet()), gss::EmptyInputError);
}

TEST(Surrogate, DirectionVarianceExtremes) {
    EXPECT_NEAR(gss::geometry::direction_variance(GradientSet({vec({1, 0}), vec({5, 0}), vec({0.1, 0})})), 0.0, 1e-15);
    EXPECT_NEAR(gss::geometry::direction_variance(GradientSet({vec({1, 0}), vec({-1, 0})})), 1.0, 1e-15);
}

TEST(Surrogate, EqualsVarianceOfUnitDirections) {
    // 1 - S/M^2 against an explicit mean-of-squared-deviation computation
    Rng rng(31);
    for (std::size_t m : {1u, 2u, 7u, 50u}) {
        for (Eigen::Index d : {2, 40, 500}) {
            const auto set = random_set(m, d, rng);
            VectorXd mean = VectorXd::Zero(d);
            for (const auto& v : set.vectors()) mean += v / v.norm();
            mean /= static_cast<double>(m);
            double var = 0.0;
            for (const auto& v : set.vectors()) var += (v / v.norm() - mean).squaredNorm();
            var /= static_cast<double>(m);
            EXPECT_NEAR(gss::geometry::direction_variance(set), var, 1e-10) << "m=" << m << " d=" << d;
        }
    }
}

TEST(Surrogate, InvariantUnderPositiveRescaling) {
    Rng rng(32);
    const auto set = random_set(6, 20, rng);
    std::vector<VectorXd> scaled;
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (const auto& v : set.vectors()) scaled.push_back(u(rng) * v);
    EXPECT_NEAR(gss::geometry::surrogate(set), gss::geometry::surrogate(GradientSet(scaled)), 1e-12);
}

TEST(Surrogate, BoundsOnRandomSets) {
    Rng rng(33);
    for (int t = 0; t < 50; ++t) {
        const auto set = random_set(5, 10, rng);
        const double s = gss::geometry::surrogate(set);
        EXPECT_GE(s, -1e-12);
        EXPECT_LE(s, 25.0 + 1e-12);
    }
}

TEST(GradientSetInput, RejectsBadMembers) {
    EXPECT_THROW(GradientSet({vec({1, 0}), vec({0, 0})}), gss::DegenerateVectorError);
    EXPECT_THROW(GradientSet({vec({1, 0}), vec({1, 0, 0})}), gss::ShapeError);
}

TEST(SolidAngle, RankOneIsAHalf) {
    Rng rng(41);
    const auto est = gss::geometry::solid_angle_mc(GradientSet({vec({1, 2, 3}), vec({2, 4, 6})}), 200000, rng);
    EXPECT_EQ(est.span_rank, 1u);
    EXPECT_NEAR(est.fraction, 0.5, 3.0 * std::sqrt(0.25 / 200000.0));
}

TEST(SolidAngle, OrthogonalPairIsAQuarter) {
    Rng rng(42);
    const auto est = gss::geometry::solid_angle_mc(GradientSet({vec({1, 0, 0, 0}), vec({0, 1, 0, 0})}), 200000, rng);
    EXPECT_EQ(est.span_rank, 2u);
    EXPECT_NEAR(est.fraction, 0.25, 3.0 * std::sqrt(0.25 * 0.75 / 200000.0));
}

TEST(SolidAngle, PlanarPairMatchesArcLength) {
    // two directions at angle alpha in a plane: feasible arc is (pi - alpha) / (2 pi)
    const double alpha = std::numbers::pi / 3.0;
    Rng rng(43);
    const auto est = gss::geometry::solid_angle_mc(
        GradientSet({vec({1, 0, 0}), vec({std::cos(alpha), std::sin(alpha), 0})}), 200000, rng);
    const double p = (std::numbers::pi - alpha) / (2.0 * std::numbers::pi);
    EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(est.fraction, p, 3.0 * std::sqrt(p * (1 - p) / 200000.0));
}

TEST(SolidAngle, IndependentSeedsAgree) {
    Rng gen(44);
    const auto set = random_set(5, 50, gen);
    Rng a(1), b(2);
    const auto ea = gss::geometry::solid_angle_mc(set, 1000000, a);
    const auto eb = gss::geometry::solid_angle_mc(set, 1000000, b);
    EXPECT_NEAR(ea.fraction, eb.fraction, 4.0 * std::hypot(ea.std_error, eb.std_error));
    EXPECT_EQ(ea.span_rank, 5u);
}

TEST(SolidAngle, SupersetWithSameSpanNeverCountsMore) {
    Rng gen(45);
    for (int t = 0; t < 20; ++t) {
        std::vector<VectorXd> a;
        for (int i = 0; i < 3; ++i) a.push_back(oracle::random_vector(8, gen));
        auto b = a;
        b.push_back(0.7 * a[0] - 0.2 * a[1] + 0.4 * a[2]);
        Rng ra(t), rb(t);
        const auto ea = gss::geometry::solid_angle_mc(GradientSet(a), 20000, ra);
        const auto eb = gss::geometry::solid_angle_mc(GradientSet(b), 20000, rb);
        EXPECT_EQ(eb.span_rank, ea.span_rank);
        EXPECT_LE(eb.feasible_count, ea.feasible_count);
    }
}

TEST(SolidAngle, PowerOfTwoScalingIsBitIdentical) {
    Rng gen(46);
    const auto set = random_set(4, 12, gen);
    std::vector<VectorXd> scaled;
    for (const auto& v : set.vectors()) scaled.push_back(8.0 * v);
    Rng ra(9), rb(9);
    EXPECT_EQ(gss::geometry::solid_angle_mc(set, 50000, ra).feasible_count,
              gss::geometry::solid_angle_mc(GradientSet(scaled), 50000, rb).feasible_count);
}

TEST(SolidAngle, DeterministicAndShardable) {
    Rng gen(47);
    const auto set = random_set(3, 6, gen);
    Rng ra(5), rb(5);
    EXPECT_EQ(gss::geometry::solid_angle_mc(set, 30000, ra).feasible_count,
              gss::geometry::solid_angle_mc(set, 30000, rb).feasible_count);
    const std::vector<std::uint64_t> seeds{11, 12, 13, 14};
    const auto sharded = gss::geometry::solid_angle_mc_sharded(set, 10000, seeds);
    std::uint64_t total = 0;
    for (auto s : seeds) {
        Rng r(s);
        total += gss::geometry::solid_angle_mc(set, 10000, r).feasible_count;
    }
    EXPECT_EQ(sharded.feasible_count, total);
    EXPECT_EQ(sharded.samples_used, 40000u);
}

TEST(SolidAngle, EmptySetIsRejected) {
    Rng rng(1);
    EXPECT_THROW(gss::geometry::solid_angle_mc(GradientSet(), 10, rng), gss::DegenerateVectorError);
}

TEST(Spearman, TiesUseAverageRanks) {
    const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
    const auto r = gss::geometry::average_ranks(v);
    EXPECT_EQ(r, (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
    const std::vector<double> x{1, 2, 3, 4, 5}, y{5, 6, 7, 8, 7};
    // y ranks to (1, 2, 3.5, 5, 3.5); value from scipy.stats.spearmanr
    const auto rho = gss::geometry::spearman(x, y);
    ASSERT_TRUE(rho.has_value());
    EXPECT_NEAR(*rho, 0.8207826816681233, 1e-12);
}

TEST(Spearman, PerfectAndDegenerateCases) {
    const std::vector<double> x{1, 2, 3}, down{9, 4, 1}, flat{2, 2, 2};
    EXPECT_NEAR(*gss::geometry::spearman(x, x), 1.0, 1e-15);
    EXPECT_NEAR(*gss::geometry::spearman(x, down), -1.0, 1e-15);
    EXPECT_FALSE(gss::geometry::spearman(x, flat).has_value());
    EXPECT_FALSE(gss::geometry::spearman(std::vector<double>{1.0}, std::vector<double>{2.0}).has_value());
}

TEST(Correlation, SingleTrialHasNoRho) {
    Rng rng(1);
    const auto res = gss::geometry::correlation_experiment(10, 3, 1, 1000, rng);
    EXPECT_EQ(res.pairs.size(), 1u);
    EXPECT_FALSE(res.rho.has_value());
}

TEST(Correlation, DeterministicGivenSeed) {
    Rng a(3), b(3);
    const auto ra = gss::geometry::correlation_experiment(20, 4, 15, 5000, a);
    const auto rb = gss::geometry::correlation_experiment(20, 4, 15, 5000, b);
    ASSERT_EQ(ra.pairs.size(), 15u);
    for (std::size_t i = 0; i < ra.pairs.size(); ++i) {
        EXPECT_EQ(ra.pairs[i].surrogate, rb.pairs[i].surrogate);
        EXPECT_EQ(ra.pairs[i].angle_fraction, rb.pairs[i].angle_fraction);
    }
    EXPECT_EQ(*ra.rho, *rb.rho);
}
