#include "rbb/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace rbb;

namespace {

SolverConfig traced(StepsizeRule rule, TauSchedule tau = TauSchedule::two_step())
{
    SolverConfig c;
    c.rule = rule;
    c.tau = tau;
    c.record_iterates = true;
    return c;
}

IterationTrace run(const QuadraticProblem& p, StepsizeRule rule, std::uint64_t start_seed,
                   TauSchedule tau = TauSchedule::two_step())
{
    return run_quadratic(p, traced(rule, tau), random_start(p.n(), start_seed));
}

} // namespace

TEST(Fluctuation, Examples)
{
    EXPECT_EQ(fluctuation(std::vector<double>{1, 3, 2}), 2.0);
    EXPECT_EQ(fluctuation(std::vector<double>{9, 4, 1, 0.5}), 0.0);
    EXPECT_EQ(fluctuation(std::vector<double>{5, 5, 5}), 0.0);
    EXPECT_EQ(fluctuation(std::vector<double>{7}), 0.0);
}

TEST(Fluctuation, Errors)
{
    EXPECT_THROW(fluctuation(std::vector<double>{}), metric_error);
    EXPECT_THROW(fluctuation(std::vector<double>{1, std::numeric_limits<double>::quiet_NaN()}), metric_error);
    EXPECT_THROW(fluctuation(std::vector<double>{1, std::numeric_limits<double>::infinity()}), metric_error);
}

TEST(Mu, Examples)
{
    const double X = 123.5;
    EXPECT_NEAR(mu_ratio(0.0345 * X, X), 0.0345, 1e-15);
    EXPECT_EQ(mu_ratio(0.0, 0.0), 1.0);
    EXPECT_EQ(mu_ratio(0.0, 5.0), 0.0);
    EXPECT_TRUE(std::isinf(mu_ratio(1.0, 0.0)));
    EXPECT_THROW(mu_ratio(-1.0, 1.0), metric_error);
}

TEST(Report, FromTrace)
{
    const auto p = build_problem({SpectrumFamily::P1, 20, 1e3, 1});
    const auto tr = run(p, StepsizeRule::bb1(), 2);
    const auto r = make_report("bb1", "P1", tr, 0.5);
    EXPECT_EQ(r.iterations, tr.iterations());
    EXPECT_GE(r.delta_f, 0.0);
    EXPECT_TRUE(r.converged);
}

TEST(ErrorCoefficients, DiagonalIsComponentwise)
{
    const QuadraticProblem p({3.0, 1.0, 2.0}, HouseholderQ{}, MinimizerMode::Ones);
    const auto tr = run(p, StepsizeRule::bb1(), 5);
    const auto c = error_coefficients(tr, p);
    // eigen order is ascending: 1.0 (index 1), 2.0 (index 2), 3.0 (index 0)
    const std::size_t order[] = {1, 2, 0};
    for (std::size_t k = 0; k < c.iterates(); ++k)
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_EQ(c(j, k), p.x_star()[order[j]] - tr.iterates[k][order[j]]);
}

TEST(ErrorCoefficients, ParsevalAndTail)
{
    const auto p = build_problem({SpectrumFamily::P3, 40, 1e3, 6}, MinimizerMode::Ones);
    const auto tr = run(p, StepsizeRule::rbb_quadratic(), 3);
    ASSERT_TRUE(tr.converged());
    const auto c = error_coefficients(tr, p);
    EXPECT_LE(c.parseval_residual(), 1e-10);
    // ||g_K|| <= 1e-8 ||g_0|| bounds ||e_K|| by 1e-8 cond(A) ||e_0||
    const double bound = 1e-8 * p.eigen()->condition() * c.error_norms.front();
    for (std::size_t i = 0; i < c.n(); ++i)
        EXPECT_LE(std::abs(c(i, c.iterates() - 1)), bound);
}

TEST(ErrorCoefficients, CapabilityErrors)
{
    auto p = build_problem({SpectrumFamily::P1, 10, 1e3, 0});
    SolverConfig plain;
    const auto untraced = run_quadratic(p, plain, random_start(10, 1));
    EXPECT_THROW(error_coefficients(untraced, p), capability_error);
    const auto tr = run(p, StepsizeRule::bb1(), 1);
    p.drop_eigen_data();
    EXPECT_THROW(error_coefficients(tr, p), capability_error);
}

TEST(ShiftIdentities, HoldOnRbbTraces)
{
    for (auto mode : {MinimizerMode::Zeros, MinimizerMode::Ones}) {
        const auto p = build_problem({SpectrumFamily::P2, 50, 1e4, 8}, mode);
        const auto tr = run(p, StepsizeRule::rbb_quadratic(), 4);
        const auto rep = verify_shift_identities(tr, p);
        EXPECT_GT(rep.checked, 10u);
        EXPECT_TRUE(rep.within(1e-10)) << rep.max_gradient_residual << " " << rep.max_update_residual;
    }
}

TEST(ShiftIdentities, FirstStepUsesInitialAlpha)
{
    const auto p = build_problem({SpectrumFamily::P1, 20, 1e3, 2}, MinimizerMode::Ones);
    auto tr = run(p, StepsizeRule::bb1(), 3);
    tr.iterates.resize(2);
    tr.records.resize(2);
    EXPECT_EQ(verify_shift_identities(tr, p).checked, 1u);
    EXPECT_TRUE(verify_shift_identities(tr, p).within(1e-12));
}

TEST(ShiftIdentities, CorruptedTraceFails)
{
    const auto p = build_problem({SpectrumFamily::P1, 20, 1e3, 2});
    auto tr = run(p, StepsizeRule::bb1(), 3);
    tr.records[3].alpha *= 1.5;
    EXPECT_GT(verify_shift_identities(tr, p).max_gradient_residual, 1e-3);
}

TEST(QLinear, HoldsOnGeneratedProblems)
{
    for (int fam = 0; fam < 7; ++fam) {
        const auto p = build_problem({static_cast<SpectrumFamily>(fam), 60, 1e4, 30u + fam});
        const auto& ed = *p.eigen();
        for (auto rule : {StepsizeRule::bb1(), StepsizeRule::bb2(), StepsizeRule::rbb_quadratic()}) {
            const auto tr = run(p, rule, 9);
            const auto c = error_coefficients(tr, p);
            const auto r = verify_q_linear_e1(c, ed.lambda_min(), ed.lambda_max());
            EXPECT_TRUE(r.passed) << to_string(rule) << " worst " << r.worst;
            EXPECT_GT(r.checked, 0u);
        }
    }
}

TEST(QLinear, ScalarMatrixKillsFirstCoefficient)
{
    const QuadraticProblem p(Vector(5, 2.5), householder_orthogonal(5, 1), MinimizerMode::Ones);
    const auto tr = run(p, StepsizeRule::bb1(), 1);
    const auto c = error_coefficients(tr, p);
    ASSERT_GE(c.iterates(), 3u);
    EXPECT_LE(std::abs(c(0, 2)), 1e-14 * c.error_norms.front());
}

TEST(QLinear, FabricatedAlphaFails)
{
    ErrorCoefficients c;
    c.columns = {{1.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}};
    c.error_norms = {std::sqrt(2.0), std::sqrt(2.0), std::sqrt(5.0)};
    EXPECT_FALSE(verify_q_linear_e1(c, 1.0, 10.0).passed);
}

TEST(Contraction, HoldsOnP1)
{
    const auto p = build_problem({SpectrumFamily::P1, 20, 1e3, 5});
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto tr = run(p, StepsizeRule::rbb_quadratic(), s);
        const auto c = error_coefficients(tr, p);
        EXPECT_TRUE(verify_contraction_bound(c, p.eigen()->values).passed);
    }
}

TEST(Contraction, RandomDiagonalProblems)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        Vector d(12);
        for (auto& v : d)
            v = std::pow(10.0, rng.uniform(-1.0, 3.0));
        const QuadraticProblem p(d, HouseholderQ{}, MinimizerMode::Ones);
        const auto tr = run(p, seed % 2 ? StepsizeRule::bb2() : StepsizeRule::rbb_quadratic(), seed);
        const auto c = error_coefficients(tr, p);
        EXPECT_TRUE(verify_contraction_bound(c, p.eigen()->values).passed) << "seed " << seed;
    }
}

TEST(Contraction, SpectrumLengthMismatch)
{
    ErrorCoefficients c;
    c.columns = {{1.0, 1.0}};
    c.error_norms = {1.0};
    const Vector lam{1.0};
    EXPECT_THROW(verify_contraction_bound(c, lam), std::invalid_argument);
}

TEST(ClassifyMode, Examples)
{
    const Vector lam{1.0, 2.0, 5.0, 9.0};
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Vector e(4);
        for (auto& v : e)
            v = rng.uniform(-1.0, 1.0);
        EXPECT_EQ(classify_mode(e, lam, rng.uniform(0.0, 2.0), 0), Mode::Shrinking);
        EXPECT_EQ(classify_mode(e, lam, 0.3, 3), Mode::Fluctuation);
    }
    const Vector only_top{0.0, 0.0, 0.0, 1.0};
    EXPECT_EQ(classify_mode(only_top, lam, 0.0, 3), Mode::Shrinking);
    const Vector l2{1.0, 2.0}, e{1.0, 0.0};
    EXPECT_EQ(classify_mode(e, l2, 0.0, 1), Mode::Fluctuation);
    EXPECT_THROW(classify_mode(e, l2, 0.0, 2), std::invalid_argument);
}

TEST(AlphaRecurrence, RebuildsRecordedStepsizes)
{
    const auto p = build_problem({SpectrumFamily::P1, 10, 100.0, 4});
    for (auto tau : {TauSchedule::two_step(), TauSchedule::fixed(0.0), TauSchedule::fixed(1e-3)}) {
        const auto tr = run(p, StepsizeRule::rbb_quadratic(), 6, tau);
        const auto c = error_coefficients(tr, p);
        EXPECT_LE(verify_alpha_recurrence(tr, c, p.eigen()->values), 1e-9);
    }
}

TEST(AlphaRecurrence, TauZeroIsBb1)
{
    const auto p = build_problem({SpectrumFamily::P1, 10, 100.0, 4});
    const auto tr = run(p, StepsizeRule::bb1(), 6);
    const auto c = error_coefficients(tr, p);
    EXPECT_LE(verify_alpha_recurrence(tr, c, p.eigen()->values), 1e-9);
}

TEST(StableInterval, Examples)
{
    IterationTrace tr;
    tr.records.resize(6);
    for (auto& r : tr.records)
        r.alpha = 7.0;
    EXPECT_EQ(stable_interval_check(tr, 7.0, 1e3), 1.0);
    tr.records[2].alpha = 1.0;
    EXPECT_DOUBLE_EQ(stable_interval_check(tr, 7.0, 1e3), 0.75);
    EXPECT_EQ(stable_interval_check(tr, 7.0, 1.5), 1.0);
}

TEST(StableInterval, MonotoneBelowTwo)
{
    const QuadraticProblem p({1.0, 1.3, 1.5}, householder_orthogonal(3, 2), MinimizerMode::Ones);
    const auto tr = run(p, StepsizeRule::rbb_quadratic(), 2);
    EXPECT_EQ(stable_interval_check(tr, 1.5, 1.5), 1.0);
    EXPECT_EQ(fluctuation(tr.f_history()), 0.0);
}
