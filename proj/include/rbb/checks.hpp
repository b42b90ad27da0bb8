#pragma once

// Seeded property sweeps shared by the `verify` subcommand and the
// acceptance suite. Each sweep returns one PropertyResult per property with
// the worst residual it saw and the tolerance it was held to.

#include "rbb/analysis.hpp"
#include "rbb/linalg.hpp"
#include "rbb/objectives.hpp"
#include "rbb/quadgen.hpp"
#include "rbb/random.hpp"
#include "rbb/solver.hpp"
#include "rbb/sphdesign.hpp"
#include "rbb/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rbb {

struct PropertyResult {
    std::string name;
    bool passed = true;
    double worst = 0.0;
    double tol = 0.0;
    std::string note;
};

namespace detail {

/// Small SPD operator with log-uniform spectrum in [1e-2, 1e2] and a random
/// Householder basis, together with a random s and y = A s.
struct SpdInstance {
    QuadraticProblem A;
    Vector s, y, Ay;
};

inline SpdInstance random_spd_instance(std::uint64_t seed, std::size_t max_n = 8)
{
    Rng rng(derive_seed(seed, 0x5bd));
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % (max_n - 1));
    Vector lam(n);
    for (auto& l : lam)
        l = std::pow(10.0, rng.uniform(-2.0, 2.0));
    QuadraticProblem A(std::move(lam), householder_orthogonal(n, derive_seed(seed, 0x9a)), MinimizerMode::Zeros);
    Vector s(n);
    for (auto& v : s)
        v = rng.uniform(-1.0, 1.0);
    Vector y = A.apply(s);
    Vector Ay = A.apply(y);
    return {std::move(A), std::move(s), std::move(y), std::move(Ay)};
}

inline void note_failure(PropertyResult& r, double value)
{
    r.worst = std::max(r.worst, value);
    if (!(value <= r.tol))
        r.passed = false;
}

inline SolverConfig make_config(StepsizeRule rule, TauSchedule tau, double eps, std::size_t max_iter,
                                bool iterates)
{
    SolverConfig c;
    c.rule = rule;
    c.tau = tau;
    c.eps = eps;
    c.max_iter = max_iter;
    c.record_iterates = iterates;
    return c;
}

/// Rotation of rule/tau combinations used by the quadratic sweeps.
inline std::pair<StepsizeRule, TauSchedule> mixed_rule(std::size_t i)
{
    switch (i % 6) {
    case 0: return {StepsizeRule::bb1(), TauSchedule::fixed(0.0)};
    case 1: return {StepsizeRule::bb2(), TauSchedule::fixed(0.0)};
    case 2: return {StepsizeRule::rbb_quadratic(), TauSchedule::two_step()};
    case 3: return {StepsizeRule::rbb_quadratic(), TauSchedule::fixed(1e-4)};
    case 4: return {StepsizeRule::rbb_extended(), TauSchedule::two_step()};
    default: return {StepsizeRule::dai(0.5), TauSchedule::fixed(0.0)};
    }
}

/// Families whose band layout fits dimension n.
inline std::size_t family_count(std::size_t n) { return n >= 20 ? 7 : 5; }

} // namespace detail

/// Special cases, the Dai round trip, Rayleigh bounds, tau monotonicity,
/// Cauchy and Schwarz chains, and closed-form optimality, over `instances`
/// random SPD problems with n <= 8.
inline std::vector<PropertyResult> check_stepsize_properties(int instances, std::uint64_t seed)
{
    PropertyResult tau0{"rbb(tau=0) == bb1 (bitwise)", true, 0.0, 0.0, {}};
    PropertyResult dai_ends{"dai(0) == bb2, dai(1) == bb1", true, 0.0, 0.0, {}};
    PropertyResult round{"gamma_to_tau round trip", true, 0.0, 1e-10, {}};
    PropertyResult bound{"rbbq in [lambda_1, lambda_n]", true, 0.0, 1e-14, {}};
    PropertyResult mono{"rbbq nondecreasing in tau", true, 0.0, 1e-12, {}};
    PropertyResult cauchy{"bb1 <= bb2", true, 0.0, 1e-14, {}};
    PropertyResult schwarz{"Schwarz quotient chain", true, 0.0, 1e-12, {}};
    PropertyResult optimal{"closed form minimizes regularized LS", true, 0.0, 1e-12, {}};
    std::size_t negative_tau = 0, degenerate = 0, round_trips = 0;

    for (int t = 0; t < instances; ++t) {
        const auto inst = detail::random_spd_instance(derive_seed(seed, static_cast<std::uint64_t>(t)));
        const DisplacementPair p(inst.s, inst.y);
        const auto& ed = *inst.A.eigen();
        const double b1 = bb1(p), b2 = bb2(p);

        const double r0 = rbb_quadratic(p, inst.Ay, 0.0);
        const double rx0 = rbb_extended(p, 0.0);
        const double rg0 = rbb_general(inst.s, inst.y, inst.y, inst.Ay, 0.0);
        detail::note_failure(tau0, std::max({std::abs(r0 - b1), std::abs(rx0 - b1), std::abs(rg0 - b1)}));
        detail::note_failure(dai_ends, std::max(std::abs(dai_family(p, 0.0) - b2), std::abs(dai_family(p, 1.0) - b1)));
        detail::note_failure(cauchy, (b1 - b2) / b2);

        for (int gi = 0; gi <= 10; ++gi) {
            const double gamma = gi / 10.0;
            double tau;
            try {
                tau = gamma_to_tau(p, inst.Ay, gamma);
            } catch (const std::domain_error&) {
                ++degenerate;
                continue;
            }
            if (tau < 0.0) {
                ++negative_tau;
                continue;
            }
            const double d = dai_family(p, gamma);
            detail::note_failure(round, std::abs(rbb_quadratic(p, inst.Ay, tau) - d) / d);
            ++round_trips;
        }

        const double l1 = ed.lambda_min(), ln = ed.lambda_max();
        double prev = -1.0;
        for (double tau : {0.0, 1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e8}) {
            const double a = rbb_quadratic(p, inst.Ay, tau);
            detail::note_failure(bound, std::max((l1 - a) / l1, (a - ln) / ln));
            if (prev >= 0.0)
                detail::note_failure(mono, (prev - a) / ln);
            prev = a;
        }

        // s'y/s's <= s'Ay/s'As <= s'A^2y/s'A^2s with y = A s
        const Vector As = inst.y;
        const Vector A2s = inst.Ay;
        const double q1 = dot(inst.s, inst.y) / dot(inst.s, inst.s);
        const double q2 = dot(inst.s, inst.Ay) / dot(inst.s, As);
        const Vector A2y = inst.A.apply(inst.Ay);
        const double q3 = dot(inst.s, A2y) / dot(inst.s, A2s);
        detail::note_failure(schwarz, std::max((q1 - q2) / q2, (q2 - q3) / q3));

        // Closed form vs direct evaluation, with L1 = L2 = A and with random diagonal L's.
        Rng rng(derive_seed(seed, 0xc1f + static_cast<std::uint64_t>(t)));
        const std::size_t n = inst.s.size();
        Vector L1s(n), L2y(n);
        for (std::size_t i = 0; i < n; ++i) {
            L1s[i] = rng.uniform(0.5, 2.0) * inst.s[i];
            L2y[i] = rng.uniform(0.5, 2.0) * inst.y[i];
        }
        for (double tau : {0.0, 0.3, 5.0}) {
            for (int variant = 0; variant < 2; ++variant) {
                const std::span<const double> a1 = variant ? std::span<const double>(L1s) : std::span<const double>(As);
                const std::span<const double> a2 = variant ? std::span<const double>(L2y) : std::span<const double>(inst.Ay);
                const double star = rbb_general(inst.s, inst.y, a1, a2, tau);
                const double f0 = rbb_least_squares(star, inst.s, inst.y, a1, a2, tau);
                for (double delta : {1e-3, 1e-2, -1e-3, -1e-2}) {
                    const double f1 = rbb_least_squares(star + delta, inst.s, inst.y, a1, a2, tau);
                    detail::note_failure(optimal, (f0 - f1) / std::max(f0, 1e-300));
                }
            }
        }
    }
    round.note = std::to_string(round_trips) + " pairs checked, " + std::to_string(negative_tau) +
                 " with tau < 0, " + std::to_string(degenerate) + " degenerate";
    if (round_trips == 0)
        round.passed = false;
    return {tau0, dai_ends, round, bound, mono, cauchy, schwarz, optimal};
}

/// Every post-safeguard alpha_k (k >= 1) of RBBQuadratic runs lies in
/// [lambda_1, lambda_n], on `count` seeded P1-P7 problems.
inline PropertyResult check_trace_alpha_bound(int count, std::size_t n, double kappa, std::uint64_t seed)
{
    PropertyResult r{"trace alpha in [lambda_1, lambda_n]", true, 0.0, 0.0, {}};
    std::size_t checked = 0;
    for (int i = 0; i < count; ++i) {
        const auto fam = static_cast<SpectrumFamily>(static_cast<std::size_t>(i) % detail::family_count(n));
        const auto prob = build_problem({fam, n, kappa, derive_seed(seed, static_cast<std::uint64_t>(i))});
        const auto tau = i % 2 ? TauSchedule::two_step() : TauSchedule::fixed(1e-3 * i);
        const auto cfg = detail::make_config(StepsizeRule::rbb_quadratic(), tau, 1e-8, 20000, false);
        const auto trace = run_quadratic(prob, cfg, random_start(n, derive_seed(seed, 0x51a + i)));
        const double l1 = prob.eigen()->lambda_min(), ln = prob.eigen()->lambda_max();
        for (std::size_t k = 1; k < trace.records.size(); ++k) {
            const double a = trace.records[k].alpha;
            if (a == 0.0)
                continue; // no alpha formed (stationary)
            ++checked;
            detail::note_failure(r, std::max({0.0, (l1 - a) / l1, (a - ln) / ln}));
        }
    }
    r.note = std::to_string(checked) + " stepsizes";
    return r;
}

struct TheoremSweep {
    int seeds = 50;
    std::vector<std::size_t> dims = {10, 100};
    double kappa = 1e3;
    /// The alpha recurrence is compared against the alphas the solver
    /// actually formed; rounding in x_k perturbs those by about
    /// eps * cond(A)^2, so it is swept on P1 at this smaller kappa.
    double recurrence_kappa = 100.0;
    std::uint64_t seed = 2024;
    /// Scales one recorded alpha per trace so the shift identity breaks.
    bool inject_fault = false;
};

inline std::vector<PropertyResult> check_theorem_suite(const TheoremSweep& sw)
{
    PropertyResult shift{"shift identities A e_k = alpha_k s_k, e_{k+1} = (I - A/alpha_k) e_k", true, 0.0, 1e-10, {}};
    PropertyResult parseval{"Parseval sum_i (e_i^k)^2 = ||e_k||^2", true, 0.0, 1e-10, {}};
    PropertyResult qlin{"Q-linear e_1 decay, factor 1 - lambda_1/lambda_n", true, 0.0, 0.0, {}};
    PropertyResult contr{"per-index contraction bound", true, 0.0, 0.0, {}};
    PropertyResult recur{"alpha recurrence from error coefficients", true, 0.0, 1e-9, {}};
    std::size_t runs = 0, qchecks = 0, cchecks = 0;

    for (std::size_t n : sw.dims) {
        for (int s = 0; s < sw.seeds; ++s) {
            const std::uint64_t ps = derive_seed(sw.seed, (static_cast<std::uint64_t>(n) << 20) + s);
            const auto fam = static_cast<SpectrumFamily>(static_cast<std::size_t>(s) % detail::family_count(n));
            const auto mode = s % 4 == 3 ? MinimizerMode::Ones : MinimizerMode::Zeros;
            const auto prob = build_problem({fam, n, sw.kappa, ps}, mode);
            const auto [rule, tau] = detail::mixed_rule(static_cast<std::size_t>(s));
            auto trace = run_quadratic(prob, detail::make_config(rule, tau, 1e-10, 20000, true),
                                       random_start(n, derive_seed(ps, 1)));
            if (sw.inject_fault && trace.records.size() > 3)
                trace.records[2].alpha *= 1.5;
            ++runs;

            const auto rep = verify_shift_identities(trace, prob);
            detail::note_failure(shift, std::max(rep.max_gradient_residual, rep.max_update_residual));

            const auto coeffs = error_coefficients(trace, prob);
            detail::note_failure(parseval, coeffs.parseval_residual());

            const auto& ed = *prob.eigen();
            const double xs = norm2(prob.x_star());
            const auto q = verify_q_linear_e1(coeffs, ed.lambda_min(), ed.lambda_max(), xs);
            qchecks += q.checked;
            if (!q.passed) {
                qlin.passed = false;
                qlin.worst += static_cast<double>(q.violations);
            }
            const auto c = verify_contraction_bound(coeffs, ed.values, xs);
            cchecks += c.checked;
            if (!c.passed) {
                contr.passed = false;
                contr.worst += static_cast<double>(c.violations);
            }
        }
        for (int s = 0; s < sw.seeds; ++s) {
            const std::uint64_t ps = derive_seed(sw.seed ^ 0xa1fa, (static_cast<std::uint64_t>(n) << 20) + s);
            const auto prob = build_problem({SpectrumFamily::P1, n, sw.recurrence_kappa, ps});
            const auto [rule, tau] = s % 3 == 0 ? std::pair{StepsizeRule::bb1(), TauSchedule::fixed(0.0)}
                                     : s % 3 == 1 ? std::pair{StepsizeRule::rbb_quadratic(), TauSchedule::two_step()}
                                                  : std::pair{StepsizeRule::rbb_quadratic(), TauSchedule::fixed(1e-3)};
            auto trace = run_quadratic(prob, detail::make_config(rule, tau, 1e-10, 20000, true),
                                       random_start(n, derive_seed(ps, 1)));
            if (sw.inject_fault && trace.records.size() > 3)
                trace.records[2].alpha *= 1.5;
            const auto coeffs = error_coefficients(trace, prob);
            detail::note_failure(recur, verify_alpha_recurrence(trace, coeffs, prob.eigen()->values));
        }
    }
    qlin.note = std::to_string(qchecks) + " steps over " + std::to_string(runs) + " traces; worst = violation count";
    contr.note = std::to_string(cchecks) + " (i, k) pairs; worst = violation count";
    recur.note = "P1, kappa = " + std::to_string(static_cast<int>(sw.recurrence_kappa));
    return {shift, parseval, qlin, contr, recur};
}

/// kappa(A) in (1, 2): f never increases and ||e_k|| strictly decreases, for
/// BB1 and both RBB variants.
inline PropertyResult check_monotone_regime(int count, std::size_t n, std::uint64_t seed)
{
    PropertyResult r{"monotone f and ||e_k|| for kappa(A) < 2", true, 0.0, 0.0, {}};
    std::size_t traces = 0;
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const double kappa = rng.uniform(1.05, 1.95);
        Vector lam(n);
        for (auto& l : lam)
            l = rng.uniform(1.0, kappa);
        lam.front() = 1.0;
        lam.back() = kappa;
        const QuadraticProblem prob(std::move(lam), householder_orthogonal(n, derive_seed(seed, 0xe0 + i)),
                                    i % 2 ? MinimizerMode::Ones : MinimizerMode::Zeros);
        const Vector x0 = random_start(n, derive_seed(seed, 0x770 + i));
        for (const auto& [rule, tau] : {std::pair{StepsizeRule::bb1(), TauSchedule::fixed(0.0)},
                                        std::pair{StepsizeRule::rbb_quadratic(), TauSchedule::two_step()},
                                        std::pair{StepsizeRule::rbb_extended(), TauSchedule::two_step()}}) {
            const auto trace = run_quadratic(prob, detail::make_config(rule, tau, 1e-8, 20000, true), x0);
            ++traces;
            const auto f = trace.f_history();
            const double e0 = norm2(subtract(prob.x_star(), trace.iterates.front()));
            double prev_e = e0;
            for (std::size_t k = 1; k < f.size(); ++k) {
                if (f[k] > f[k - 1])
                    detail::note_failure(r, (f[k] - f[k - 1]) / std::max(1.0, std::abs(f[k - 1])) + 1.0);
                const double ek = norm2(subtract(prob.x_star(), trace.iterates[k]));
                if (prev_e >= 1e3 * std::numeric_limits<double>::epsilon() * e0 && !(ek < prev_e))
                    detail::note_failure(r, 1.0);
                prev_e = ek;
            }
        }
    }
    r.note = std::to_string(traces) + " traces";
    return r;
}

/// Directional central difference of A_{N,t} along random tangent
/// directions, with the sphere retraction applied to both probes.
inline double validate_design_gradient(int t, std::size_t N, int trials, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, 0xd51));
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const PointSet X = spiral_points(N, derive_seed(seed, static_cast<std::uint64_t>(trial)), 0.3);
        const Vector g = a_nt_gradient(X, t);
        Vector d(3 * N);
        for (auto& v : d)
            v = rng.uniform(-1.0, 1.0);
        for (std::size_t j = 0; j < N; ++j) {
            const auto x = X[j];
            const double r = d[3 * j] * x[0] + d[3 * j + 1] * x[1] + d[3 * j + 2] * x[2];
            for (int c = 0; c < 3; ++c)
                d[3 * j + c] -= r * x[c];
        }
        const double h = 1e-6;
        Vector xp = X.coords(), xm = X.coords();
        for (std::size_t i = 0; i < d.size(); ++i) {
            xp[i] += h * d[i];
            xm[i] -= h * d[i];
        }
        retract_to_spheres(xp);
        retract_to_spheres(xm);
        const double fd = (a_nt(xp, t) - a_nt(xm, t)) / (2.0 * h);
        const double an = dot(g, d);
        worst = std::max(worst, std::abs(fd - an) / std::max(norm2(g) * norm2(d), 1e-12));
    }
    return worst;
}

/// Central-difference gradient validation for every registered objective
/// plus the design functional.
inline std::vector<PropertyResult> check_gradients(std::size_t n, std::uint64_t seed, double tol = 1e-5)
{
    std::vector<PropertyResult> out;
    for (const auto& info : objective_registry()) {
        const auto obj = make_objective(info.name, n);
        PropertyResult r{"gradient " + info.name, true, 0.0, tol, {}};
        detail::note_failure(r, validate_gradient(obj, 3, seed));
        out.push_back(r);
    }
    for (int t : {1, 2, 4, 6}) {
        PropertyResult r{"gradient A_{N,t} t=" + std::to_string(t), true, 0.0, tol, {}};
        detail::note_failure(r, validate_design_gradient(t, static_cast<std::size_t>((t + 1) * (t + 1)), 5, seed));
        out.push_back(r);
    }
    return out;
}

} // namespace rbb
