#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"

using gss::Example;
using gss::Rng;
using gss::model::MlpModel;

namespace {

MlpModel small_model(Rng& rng, std::size_t in = 7, std::size_t classes = 4) {
    return MlpModel::random({in, 6, 5, classes}, rng);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST(Forward, ZeroParametersGiveZeroLogits) {
    MlpModel m({5, 4, 3});
    Eigen::VectorXd x = Eigen::VectorXd::Constant(5, 0.7);
    EXPECT_TRUE(gss::model::forward(m, x).isZero(0.0));
}

TEST(Forward, SingleUnitPassThrough) {
    MlpModel m({1, 1});
    m.weights(0)(0, 0) = 1.0;
    Eigen::VectorXd x(1);
    x << 2.0;
    EXPECT_DOUBLE_EQ(gss::model::forward(m, x)[0], 2.0);
}

TEST(Forward, MatchesHandRolledMatrixArithmetic) {
    Rng rng(11);
    auto m = MlpModel::random({9, 8, 6, 3}, rng);
    const auto ex = oracle::random_example(9, 3, rng);
    const auto got = gss::model::forward(m, ex.features);
    const auto want = oracle::forward(m, oracle::to_std(ex.features));
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[static_cast<Eigen::Index>(k)], want[k], 1e-13);
}

TEST(Forward, RejectsWrongInputLength) {
    MlpModel m({3, 2});
    EXPECT_THROW(gss::model::forward(m, Eigen::VectorXd::Zero(4)), gss::ShapeError);
}

TEST(Loss, UniformLogitsGiveLogTwo) {
    EXPECT_NEAR(gss::model::loss(Eigen::Vector2d(0.0, 0.0), 0), 0.6931471805599453, 1e-15);
}

TEST(Loss, SaturatedLogitsDoNotOverflow) {
    const double v = gss::model::loss(Eigen::Vector2d(1000.0, 0.0), 0);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, 0.0, 1e-300);
    EXPECT_NEAR(gss::model::loss(Eigen::Vector2d(1000.0, 0.0), 1), 1000.0, 1e-9);
}

TEST(Loss, MatchesExtendedPrecisionValue) {
    // -log(e^3 / (e + e^2 + e^3)) evaluated at 40 digits
    EXPECT_NEAR(gss::model::loss(Eigen::Vector3d(1.0, 2.0, 3.0), 2), 0.407605964444380304, 1e-15);
}

TEST(Loss, RejectsOutOfRangeLabel) {
    EXPECT_THROW(gss::model::loss(Eigen::Vector2d(0.0, 0.0), 2), gss::LabelError);
}

TEST(Loss, SoftmaxSumsToOne) {
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        Eigen::VectorXd z = 30.0 * oracle::random_vector(10, rng);
        EXPECT_NEAR(gss::model::softmax(z).sum(), 1.0, 1e-12);
    }
}

TEST(Gradient, MatchesFiniteDifferencesOnRandomCoordinates) {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        auto m = small_model(rng);
        const auto ex = oracle::random_example(7, 4, rng);
        const auto g = gss::model::example_gradient(m, ex);
        ASSERT_EQ(static_cast<std::size_t>(g.size()), m.parameter_count());
        for (auto k : gss::selection::sample_indices(m.parameter_count(), 20, rng)) {
            const double fd = oracle::finite_difference(m, ex, k, 1e-5);
            EXPECT_LT(rel_err(g.values[static_cast<Eigen::Index>(k)], fd), 1e-4) << "coordinate " << k;
        }
    }
}

TEST(Gradient, VanishesWhenPerfectlyClassified) {
    MlpModel m({2, 3});
    m.bias(0) << 0.0, 60.0, 0.0;
    Example ex{Eigen::Vector2d(0.3, 0.4), 1, 0};
    EXPECT_LT(gss::model::example_gradient(m, ex).values.norm(), 1e-6);
}

TEST(Gradient, IsFinite) {
    Rng rng(5);
    auto m = small_model(rng);
    auto ex = oracle::random_example(7, 4, rng);
    ex.features *= 1e3;
    EXPECT_TRUE(gss::model::example_gradient(m, ex).values.allFinite());
}

TEST(BatchGradient, SingletonEqualsExampleGradient) {
    Rng rng(6);
    auto m = small_model(rng);
    const auto ex = oracle::random_example(7, 4, rng);
    const std::vector<Example> batch{ex};
    EXPECT_EQ(gss::model::batch_gradient(m, batch).values, gss::model::example_gradient(m, ex).values);
}

TEST(BatchGradient, DuplicateEqualsExampleGradient) {
    Rng rng(7);
    auto m = small_model(rng);
    const auto ex = oracle::random_example(7, 4, rng);
    const std::vector<Example> batch{ex, ex};
    const Eigen::VectorXd diff = gss::model::batch_gradient(m, batch).values - gss::model::example_gradient(m, ex).values;
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BatchGradient, IsMeanOfExampleGradients) {
    Rng rng(8);
    for (std::size_t size : {2u, 5u, 17u, 32u}) {
        auto m = small_model(rng);
        std::vector<Example> batch;
        for (std::size_t i = 0; i < size; ++i) batch.push_back(oracle::random_example(7, 4, rng));
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.parameter_count()));
        for (const auto& ex : batch) sum += gss::model::example_gradient(m, ex).values;
        const Eigen::VectorXd diff = gss::model::batch_gradient(m, batch).values - sum / static_cast<double>(size);
        EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12) << "batch size " << size;
    }
}

TEST(BatchGradient, EmptyBatchIsAnError) {
    MlpModel m({2, 2});
    EXPECT_THROW(gss::model::batch_gradient(m, std::vector<Example>{}), gss::EmptyInputError);
}

TEST(SgdStep, ZeroRateOrZeroDirectionIsNoOp) {
    Rng rng(9);
    auto m = small_model(rng);
    const auto before = m;
    const auto g = gss::model::example_gradient(m, oracle::random_example(7, 4, rng));
    gss::model::sgd_step(m, g, 0.0);
    EXPECT_EQ(m, before);
    gss::model::sgd_step(m, gss::GradientVector{Eigen::VectorXd::Zero(g.size())}, 0.5);
    EXPECT_EQ(m, before);
}

TEST(SgdStep, StepsAreAdditive) {
    Rng rng(10);
    auto m1 = small_model(rng);
    auto m2 = m1;
    const auto a = gss::model::example_gradient(m1, oracle::random_example(7, 4, rng));
    const auto b = gss::model::example_gradient(m1, oracle::random_example(7, 4, rng));
    gss::model::sgd_step(m1, a, 0.1);
    gss::model::sgd_step(m1, b, 0.1);
    gss::model::sgd_step(m2, gss::GradientVector{a.values + b.values}, 0.1);
    EXPECT_LT((m1.flatten() - m2.flatten()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SgdStep, RejectsWrongLength) {
    MlpModel m({2, 2});
    EXPECT_THROW(gss::model::sgd_step(m, gss::GradientVector{Eigen::VectorXd::Zero(3)}, 0.1), gss::ShapeError);
}

TEST(Parameters, CountAndFlattenRoundTrip) {
    Rng rng(12);
    auto m = MlpModel::random({64, 100, 100, 10}, rng);
    EXPECT_EQ(m.parameter_count(), 64u * 100 + 100 + 100 * 100 + 100 + 100 * 10 + 10);
    MlpModel copy({64, 100, 100, 10});
    copy.unflatten(m.flatten());
    EXPECT_EQ(copy, m);
    EXPECT_THROW(copy.unflatten(Eigen::VectorXd::Zero(3)), gss::ShapeError);
}

TEST(Parameters, InitializationRespectsFanInBound) {
    Rng rng(13);
    auto m = MlpModel::random({16, 9, 4}, rng);
    EXPECT_LE(m.weights(0).cwiseAbs().maxCoeff(), 1.0 / 4.0);
    EXPECT_LE(m.weights(1).cwiseAbs().maxCoeff(), 1.0 / 3.0);
}

TEST(Evaluate, ConstantPredictorOnBalancedSet) {
    MlpModel m({2, 2});
    m.bias(0) << 1.0, 0.0;  // always class 0
    std::vector<Example> test{{Eigen::Vector2d(0.1, 0.2), 0, 0}, {Eigen::Vector2d(0.3, 0.1), 1, 1}};
    const auto ev = gss::model::evaluate(m, test, std::vector<std::vector<int>>{{0}, {1}});
    EXPECT_DOUBLE_EQ(ev.overall, 0.5);
    EXPECT_DOUBLE_EQ(ev.group(0), 1.0);
    EXPECT_DOUBLE_EQ(ev.group(1), 0.0);
}

TEST(Evaluate, GroupsWithoutTestExamplesAreOmitted) {
    MlpModel m({2, 4});
    std::vector<Example> test{{Eigen::Vector2d(0.1, 0.2), 0, 0}, {Eigen::Vector2d(0.3, 0.1), 1, 1}};
    const auto ev = gss::model::evaluate(m, test, std::vector<std::vector<int>>{{0, 1}, {2, 3}});
    EXPECT_EQ(ev.per_group.size(), 1u);
    EXPECT_EQ(ev.per_group.count(1), 0u);
}

TEST(Evaluate, MatchesIndependentArgmaxRecount) {
    Rng rng(14);
    auto m = MlpModel::random({7, 6, 4}, rng);
    std::vector<Example> train, test;
    for (int i = 0; i < 80; ++i) train.push_back(oracle::random_example(7, 4, rng));
    for (int i = 0; i < 60; ++i) test.push_back(oracle::random_example(7, 4, rng));
    for (int epoch = 0; epoch < 20; ++epoch) gss::model::sgd_step(m, gss::model::batch_gradient(m, train), 0.5);
    std::size_t hits = 0;
    for (const auto& ex : test) {
        const auto z = oracle::forward(m, oracle::to_std(ex.features));
        hits += static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin()) == ex.label ? 1 : 0;
    }
    std::vector<int> groups(test.size(), 0);
    EXPECT_DOUBLE_EQ(gss::model::evaluate(m, test, groups).overall, static_cast<double>(hits) / 60.0);
    EXPECT_THROW(gss::model::evaluate(m, std::vector<Example>{}, std::vector<int>{}), gss::EmptyInputError);
}
