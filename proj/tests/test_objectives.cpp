#include "rbb/objectives.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rbb;

TEST(Objectives, GenRosenbrockMinimum)
{
    const auto o = make_objective("GenRosenbrock", 10);
    const Vector x(10, 1.0);
    EXPECT_EQ(o.value(x), 0.0);
    for (double g : o.gradient_at(x))
        EXPECT_EQ(g, 0.0);
}

TEST(Objectives, DqdrticAtZero)
{
    const auto o = make_objective("DQDRTIC", 5);
    EXPECT_EQ(o.value(Vector(5, 0.0)), 0.0);
}

TEST(Objectives, PowerAtOnes)
{
    EXPECT_DOUBLE_EQ(make_objective("POWER", 3).value(Vector(3, 1.0)), 14.0);
}

TEST(Objectives, GradientsMatchFiniteDifferences)
{
    for (const auto& r : objective_registry()) {
        const std::size_t n = r.name == "ExtWood" ? 16 : 12;
        const auto o = make_objective(r.name, n);
        EXPECT_LE(validate_gradient(o, 20), 1e-5) << r.name;
    }
}

TEST(Objectives, GenRosenbrockLargeGradient)
{
    EXPECT_LE(validate_gradient(make_objective("GenRosenbrock", 100), 20), 1e-5);
}

TEST(Objectives, QuadraticWrapperGradient)
{
    const auto prob = build_problem({SpectrumFamily::P2, 30, 1e3, 5}, MinimizerMode::Ones);
    EXPECT_LE(validate_gradient(quadratic_objective(prob), 5), 1e-7);
}

TEST(Objectives, CorruptedGradientIsDetected)
{
    auto o = make_objective("CUBE", 8);
    auto g = o.gradient;
    o.gradient = [g](std::span<const double> x, std::span<double> d) {
        g(x, d);
        d[3] *= 1.1;
    };
    EXPECT_GT(validate_gradient(o, 3), 1e-2);
}

TEST(Objectives, Errors)
{
    EXPECT_THROW(make_objective("Nope", 10), std::invalid_argument);
    EXPECT_THROW(make_objective("ExtWhiteHolst", 7), std::invalid_argument);
    EXPECT_THROW(make_objective("ExtWood", 10), std::invalid_argument);
    EXPECT_THROW(make_objective("CUBE", 1), std::invalid_argument);
}

TEST(Objectives, FiniteAtStandardStart)
{
    for (const auto& r : objective_registry()) {
        const auto o = make_objective(r.name, 1000);
        ASSERT_EQ(o.standard_start.size(), 1000u);
        EXPECT_TRUE(std::isfinite(o.value(o.standard_start))) << r.name;
        for (double g : o.gradient_at(o.standard_start))
            ASSERT_TRUE(std::isfinite(g)) << r.name;
    }
}

TEST(Objectives, ExtWhiteHolstIsSeparable)
{
    const auto small = make_objective("ExtWhiteHolst", 20);
    const auto big = make_objective("ExtWhiteHolst", 200);
    EXPECT_NEAR(big.value(big.standard_start), 10.0 * small.value(small.standard_start), 1e-9);
}

TEST(Objectives, StandardStarts)
{
    EXPECT_EQ(make_objective("CUBE", 4).standard_start, (Vector{-1.2, 1, -1.2, 1}));
    EXPECT_EQ(make_objective("LIARWHD", 3).standard_start, Vector(3, 4.0));
    EXPECT_EQ(make_objective("ExtWood", 4).standard_start, (Vector{-3, -1, -3, -1}));
}
