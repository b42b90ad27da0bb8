#include "rbb/quadgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace rbb;

TEST(Spectrum, P1Small)
{
    const Vector v = spectrum({SpectrumFamily::P1, 5, 100.0, 1});
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v[0], 0.1);
    EXPECT_EQ(v[4], 100.0);
    for (int i = 1; i <= 3; ++i) {
        EXPECT_GT(v[i], 1.0);
        EXPECT_LT(v[i], 100.0);
    }
}

TEST(Spectrum, HardLogSmall)
{
    const Vector v = spectrum({SpectrumFamily::HardLog, 4, 1e4, 0});
    EXPECT_EQ(v[0], 0.1);
    EXPECT_NEAR(v[1], std::pow(10.0, 8.0 / 3.0), 1e-10);
    EXPECT_NEAR(v[2], std::pow(10.0, 4.0 / 3.0), 1e-12);
    EXPECT_EQ(v[3], 1e4);
}

TEST(Spectrum, P6Bands)
{
    const Vector v = spectrum({SpectrumFamily::P6, 100, 1e4, 3});
    for (int i = 2; i <= 10; ++i) {
        EXPECT_GT(v[i - 1], 1.0);
        EXPECT_LT(v[i - 1], 100.0);
    }
    for (int i = 11; i <= 99; ++i) {
        EXPECT_GT(v[i - 1], 5e3);
        EXPECT_LT(v[i - 1], 1e4);
    }
}

// Open-band membership for every family at a dimension that does not divide evenly.
TEST(Spectrum, AllFamiliesRespectBands)
{
    const long n = 103;
    const double kappa = 1e4, half = kappa / 2;
    auto in = [](double x, double lo, double hi) { return x > lo && x < hi; };
    for (int f = 0; f < 7; ++f) {
        const auto fam = static_cast<SpectrumFamily>(f);
        const Vector v = spectrum({fam, static_cast<std::size_t>(n), kappa, 77u + f});
        EXPECT_EQ(v.front(), 0.1);
        EXPECT_EQ(v.back(), kappa);
        const long n5 = n / 5, n2 = n / 2, n45 = 4 * n / 5;
        for (long i = 2; i <= n - 1; ++i) {
            const double x = v[i - 1];
            bool ok = false;
            switch (fam) {
            case SpectrumFamily::P1: ok = in(x, 1, kappa); break;
            case SpectrumFamily::P2: ok = i <= n5 ? in(x, 1, 100) : in(x, half, kappa); break;
            case SpectrumFamily::P3: ok = i <= n2 ? in(x, 1, 100) : in(x, half, kappa); break;
            case SpectrumFamily::P4: ok = i <= n45 ? in(x, 1, 100) : in(x, half, kappa); break;
            case SpectrumFamily::P5:
                ok = i <= n5 ? in(x, 1, 100) : i <= n45 ? in(x, 100, half) : in(x, half, kappa);
                break;
            case SpectrumFamily::P6: ok = i <= 10 ? in(x, 1, 100) : in(x, half, kappa); break;
            case SpectrumFamily::P7: ok = i <= n - 10 ? in(x, 1, 100) : in(x, half, kappa); break;
            default: break;
            }
            EXPECT_TRUE(ok) << to_string(fam) << " i=" << i << " v=" << x;
        }
    }
}

TEST(Spectrum, Errors)
{
    EXPECT_THROW(spectrum({SpectrumFamily::P6, 8, 1e4, 0}), std::invalid_argument);
    EXPECT_THROW(spectrum({SpectrumFamily::P1, 2, 1e4, 0}), std::invalid_argument);
    EXPECT_THROW(spectrum({SpectrumFamily::P1, 10, 1.0, 0}), std::invalid_argument);
    EXPECT_THROW(spectrum({SpectrumFamily::P5, 50, 100.0, 0}), std::invalid_argument);
    EXPECT_THROW(parse_family("P9"), std::invalid_argument);
}

TEST(Spectrum, Deterministic)
{
    EXPECT_EQ(spectrum({SpectrumFamily::P3, 40, 1e4, 5}), spectrum({SpectrumFamily::P3, 40, 1e4, 5}));
    EXPECT_NE(spectrum({SpectrumFamily::P3, 40, 1e4, 5}), spectrum({SpectrumFamily::P3, 40, 1e4, 6}));
}

TEST(Householder, Orthogonal)
{
    const auto q = householder_orthogonal(50, 9);
    EXPECT_EQ(q.reflectors().size(), 3u);
    for (const auto& w : q.reflectors())
        EXPECT_NEAR(norm2(w), 1.0, 1e-15);
    const Vector x = random_start(50, 1);
    Vector y = x;
    q.apply(y);
    EXPECT_NEAR(norm2(y) / norm2(x), 1.0, 1e-14);
    q.apply_transpose(y);
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_NEAR(y[i], x[i], 1e-13);
}

TEST(Householder, Deterministic)
{
    EXPECT_EQ(householder_orthogonal(20, 4).reflectors(), householder_orthogonal(20, 4).reflectors());
}

TEST(BuildProblem, ZerosMode)
{
    const auto p = build_problem({SpectrumFamily::P2, 30, 1e3, 1});
    for (double b : p.b())
        EXPECT_EQ(b, 0.0);
    for (double x : p.x_star())
        EXPECT_EQ(x, 0.0);
}

TEST(BuildProblem, OnesModeDiagonal)
{
    const QuadraticProblem p({1.0, 2.0}, HouseholderQ{}, MinimizerMode::Ones);
    EXPECT_EQ(p.b(), (Vector{1.0, 2.0}));
}

TEST(BuildProblem, MinimizerResidual)
{
    const auto p = build_problem({SpectrumFamily::P4, 60, 1e4, 2}, MinimizerMode::Ones);
    const Vector g = p.gradient(p.x_star());
    EXPECT_LE(norm_inf(g), 1e-12 * p.eigen()->lambda_max());
}

TEST(BuildProblem, EigenpairsAndCondition)
{
    const auto p = build_problem({SpectrumFamily::P5, 40, 1e4, 3});
    const auto& ed = *p.eigen();
    EXPECT_TRUE(std::is_sorted(ed.values.begin(), ed.values.end()));
    EXPECT_DOUBLE_EQ(ed.condition(), 1e4 / 0.1);
    for (std::size_t j = 0; j < p.n(); ++j) {
        const Vector v = p.eigenvector(j);
        const Vector av = p.apply(v);
        for (std::size_t i = 0; i < v.size(); ++i)
            EXPECT_NEAR(av[i], ed.values[j] * v[i], 1e-12 * ed.lambda_max());
    }
}

TEST(BuildProblem, HardLogIsDiagonalWithSortedEigenData)
{
    const auto p = build_problem({SpectrumFamily::HardLog, 6, 1e3, 0});
    EXPECT_TRUE(p.q().is_identity());
    const Vector e2 = p.eigenvector(1);
    // second-smallest eigenvalue sits at the end of the descending interior
    EXPECT_EQ(e2[4], 1.0);
}

TEST(BuildProblem, DropEigenData)
{
    auto p = build_problem({SpectrumFamily::P1, 10, 1e3, 0});
    p.drop_eigen_data();
    EXPECT_FALSE(p.eigen().has_value());
    EXPECT_THROW(p.eigenvector(0), std::logic_error);
}

TEST(RandomStart, RangeAndDeterminism)
{
    const Vector a = random_start(500, 3);
    for (double x : a) {
        EXPECT_GE(x, -5.0);
        EXPECT_LE(x, 5.0);
    }
    EXPECT_EQ(a, random_start(500, 3));
    EXPECT_NE(a, random_start(500, 4));
}

TEST(ReplayFile, RoundTripIsExact)
{
    const auto p = build_problem({SpectrumFamily::P7, 25, 1e4, 42}, MinimizerMode::Ones);
    std::stringstream ss;
    write_problem(ss, p);
    const auto q = read_problem(ss);
    EXPECT_EQ(q.diag(), p.diag());
    EXPECT_EQ(q.q().reflectors(), p.q().reflectors());
    EXPECT_EQ(q.b(), p.b());
    EXPECT_EQ(q.info().family, "P7");
    EXPECT_EQ(q.info().seed, 42u);
    EXPECT_EQ(q.info().mode, MinimizerMode::Ones);
}

TEST(ReplayFile, RejectsGarbage)
{
    std::stringstream ss("not a problem");
    EXPECT_THROW(read_problem(ss), std::runtime_error);
    std::stringstream trunc("rbb-problem 1\nn 3\nfamily P1\nkappa 10\nseed 0\nminimizer_mode zeros\neigenvalues\n1 2\n");
    EXPECT_THROW(read_problem(trunc), std::runtime_error);
}
