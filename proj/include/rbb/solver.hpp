#pragma once

// Gradient iteration x_{k+1} = x_k - g_k / alpha_k with BB-family alpha.
//
// One engine serves both the quadratic driver (run_quadratic) and general
// objectives (run_general). Writing t_k = 1/alpha_k turns this into the
// "x_{k+1} = x_k - t_k g_k" form; the two are the same iteration.
//
// Gradient evaluation order: g_0 is computed once at x_0, and every later
// gradient exactly once, right after the step that produced its iterate.
// The pair (s_k, y_k) and alpha_{k+1} are formed from those stored
// gradients, so there is no second evaluation at the top of the loop.
//
// Trace layout: records[k] describes iterate x_k. records[k].alpha is the
// scalar used for the step out of x_k (alpha_0 = ||g_0||_inf, i.e.
// t_0 = 1/||g_0||_inf) and records[k].tau is the regularization parameter
// that produced it. records[k].step_norm is ||x_k - x_{k-1}|| (0 for k = 0).
// On termination the last record still carries the alpha that the next step
// would have used.

#include "rbb/linalg.hpp"
#include "rbb/objective.hpp"
#include "rbb/quadgen.hpp"
#include "rbb/stepsize.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rbb {

enum class StopMode { GradOnly, GradOrStep };

enum class StopReason { GradTol, StepTol, MaxIter, Stationary };

inline std::string to_string(StopReason r)
{
    switch (r) {
    case StopReason::GradTol: return "grad_tol";
    case StopReason::StepTol: return "step_tol";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::Stationary: return "stationary";
    }
    return "?";
}

struct SolverConfig {
    double eps = 1e-8;
    std::size_t max_iter = 20000;
    StepsizeRule rule = StepsizeRule::bb1();
    TauSchedule tau = TauSchedule::fixed(0.0);
    StopMode stop_mode = StopMode::GradOnly;
    /// Keep every x_k in the trace (needed by the eigen-coefficient checks).
    bool record_iterates = false;

    void validate() const
    {
        if (!(eps > 0.0))
            throw std::invalid_argument("SolverConfig: eps must be > 0");
        if (max_iter < 1)
            throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    }
};

struct IterationRecord {
    std::size_t k = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double alpha = 0.0;
    double tau = 0.0;
    double step_norm = 0.0;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    std::vector<Vector> iterates; // empty unless record_iterates
    Vector final_x;
    StopReason stop_reason = StopReason::MaxIter;
    /// Set when x_k - g_k / alpha_k rounded back to x_k. Reported as StepTol
    /// but not counted as convergence.
    bool stalled = false;

    std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
    bool converged() const { return stop_reason != StopReason::MaxIter && !stalled; }

    std::vector<double> f_history() const
    {
        std::vector<double> f;
        f.reserve(records.size());
        for (const auto& r : records)
            f.push_back(r.f);
        return f;
    }

    std::vector<double> alpha_history() const
    {
        std::vector<double> a;
        a.reserve(records.size());
        for (const auto& r : records)
            a.push_back(r.alpha);
        return a;
    }
};

/// Thrown when f or g becomes non-finite; carries everything recorded so far.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, IterationTrace partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    const IterationTrace& partial_trace() const { return partial_; }

private:
    IterationTrace partial_;
};

/// Thrown by initial_stepsize() when g_0 = 0.
class stationary_start : public std::domain_error {
public:
    stationary_start() : std::domain_error("initial gradient is zero: start point is stationary") {}
};

/// t_0 = 1 / ||g_0||_inf.
inline double initial_stepsize(std::span<const double> g0)
{
    const double m = norm_inf(g0);
    if (m == 0.0)
        throw stationary_start();
    return 1.0 / m;
}

/// GradOnly: stop iff ||g_k|| <= eps ||g_0||.
/// GradOrStep: stop iff min(||x_k - x_{k-1}||, ||g_k|| / ||g_0||) <= eps.
/// step_norm is ignored when absent (no step taken yet).
inline std::optional<StopReason> check_stop(double grad_norm, double g0_norm, std::optional<double> step_norm,
                                            const SolverConfig& cfg)
{
    if (grad_norm <= cfg.eps * g0_norm)
        return StopReason::GradTol;
    if (cfg.stop_mode == StopMode::GradOrStep && step_norm && *step_norm <= cfg.eps)
        return StopReason::StepTol;
    return std::nullopt;
}

namespace detail {

using HessianApply = std::function<void(std::span<const double>, std::span<double>)>;

inline double current_tau(const SolverConfig& cfg, std::size_t k, const std::vector<IterationRecord>& recs)
{
    if (!cfg.rule.uses_tau())
        return 0.0;
    if (cfg.tau.kind == TauKind::Fixed)
        return cfg.tau.tau;
    // tau_k = alpha_{k-1} / alpha_{k-2}; tau_0 = tau_1 = 0.
    if (k < 2)
        return 0.0;
    return two_step_tau(recs[k - 1].alpha, recs[k - 2].alpha, cfg.tau.tau_max);
}

/// Unsafeguarded alpha from the configured rule; NaN where a formula is undefined.
inline double raw_alpha(const SolverConfig& cfg, const DisplacementPair& p, double tau, const HessianApply& hess)
{
    try {
        switch (cfg.rule.kind) {
        case RuleKind::BB1: return bb1(p);
        case RuleKind::BB2: return bb2(p);
        case RuleKind::DaiFamily: return dai_family(p, cfg.rule.gamma);
        case RuleKind::RBBExtended: return rbb_extended(p, tau);
        case RuleKind::RBBQuadratic: {
            Vector ay(p.y.size());
            hess(p.y, ay);
            return rbb_quadratic(p, ay, tau);
        }
        }
    } catch (const std::domain_error&) {
    }
    return std::numeric_limits<double>::quiet_NaN();
}

template <class Eval>
IterationTrace iterate(Eval&& eval, const HessianApply& hess, const std::function<void(std::span<double>)>& retract,
                       const SolverConfig& cfg, Vector x)
{
    cfg.validate();
    if (cfg.rule.kind == RuleKind::RBBQuadratic && !hess)
        throw std::invalid_argument("RBBQuadratic rule needs a Hessian operator; use RBBExtended for general objectives");

    const std::size_t n = x.size();
    IterationTrace trace;
    Vector g(n), g_new(n), x_new(n), s(n), y(n);

    auto fail = [&](const char* what) {
        trace.final_x = x;
        throw divergence_error(what, std::move(trace));
    };

    double f = eval(std::span<const double>(x), std::span<double>(g));
    if (!std::isfinite(f) || !all_finite(g))
        fail("non-finite objective or gradient at the start point");
    const double g0_norm = norm2(g);
    if (cfg.record_iterates)
        trace.iterates.push_back(x);

    if (g0_norm == 0.0) {
        trace.records.push_back({0, f, 0.0, 0.0, 0.0, 0.0});
        trace.final_x = std::move(x);
        trace.stop_reason = StopReason::Stationary;
        return trace;
    }
    trace.records.push_back({0, f, g0_norm, 1.0 / initial_stepsize(g), 0.0, 0.0});

    for (std::size_t k = 0;; ++k) {
        if (k >= cfg.max_iter) {
            trace.stop_reason = StopReason::MaxIter;
            break;
        }
        const double alpha = trace.records[k].alpha;
        for (std::size_t i = 0; i < n; ++i)
            x_new[i] = x[i] - g[i] / alpha;
        if (retract)
            retract(x_new);
        const double f_new = eval(std::span<const double>(x_new), std::span<double>(g_new));
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        x.swap(x_new);
        g.swap(g_new);
        if (cfg.record_iterates)
            trace.iterates.push_back(x);
        if (!std::isfinite(f_new) || !all_finite(g))
            fail("non-finite objective or gradient during iteration");

        const double step_norm = norm2(s);
        const double grad_norm = norm2(g);
        IterationRecord rec{k + 1, f_new, grad_norm, 0.0, 0.0, step_norm};

        std::optional<double> next_alpha;
        if (step_norm > 0.0) {
            const DisplacementPair pair(s, y);
            rec.tau = current_tau(cfg, k, trace.records);
            next_alpha = safeguard(raw_alpha(cfg, pair, rec.tau, hess), pair);
        }
        rec.alpha = next_alpha.value_or(0.0);
        trace.records.push_back(rec);

        if (auto stop = check_stop(grad_norm, g0_norm, step_norm, cfg)) {
            trace.stop_reason = *stop;
            break;
        }
        if (step_norm == 0.0) {
            trace.stop_reason = StopReason::StepTol;
            trace.stalled = true;
            break;
        }
        if (!next_alpha) {
            trace.stop_reason = StopReason::Stationary;
            break;
        }
    }
    trace.final_x = std::move(x);
    return trace;
}

} // namespace detail

/// Minimizes 1/2 x'Ax - b'x. With the RBBQuadratic rule each iteration costs
/// one extra application of A (to y).
inline IterationTrace run_quadratic(const QuadraticProblem& prob, const SolverConfig& cfg, const Vector& x0)
{
    if (x0.size() != prob.n())
        throw std::invalid_argument("run_quadratic: x0 has wrong length");
    const auto& b = prob.b();
    auto eval = [&](std::span<const double> x, std::span<double> g) {
        prob.apply(x, g);
        // f = 1/2 x'Ax - b'x, with Ax still in g
        const double f = 0.5 * dot(x, g) - dot(b, x);
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] -= b[i];
        return f;
    };
    detail::HessianApply hess = [&](std::span<const double> v, std::span<double> out) { prob.apply(v, out); };
    return detail::iterate(eval, hess, {}, cfg, x0);
}

/// General smooth objective. RBBQuadratic is rejected (no Hessian available).
inline IterationTrace run_general(const Objective& obj, const SolverConfig& cfg, const Vector& x0)
{
    if (x0.size() != obj.dim)
        throw std::invalid_argument("run_general: x0 has wrong length");
    auto eval = [&](std::span<const double> x, std::span<double> g) {
        obj.gradient(x, g);
        return obj.value(x);
    };
    return detail::iterate(eval, {}, obj.retract, cfg, x0);
}

} // namespace rbb
