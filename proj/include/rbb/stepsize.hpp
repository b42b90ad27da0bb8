#pragma once

// Barzilai-Borwein family stepsize scalars and regularization-parameter
// schedules. Every function here is pure: it reads the displacement pair
// (s, y) plus any auxiliary vectors and returns a scalar. Nonpositive results
// are returned as-is; the solver decides what to do with them (see
// safeguard()).
//
// The iteration convention throughout the library is
//     x_{k+1} = x_k - g_k / alpha_k,
// so every "stepsize" here is the inverse step length alpha (a Hessian
// eigenvalue estimate), not t = 1/alpha.

#include "rbb/linalg.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace rbb {

/// s = x_k - x_{k-1}, y = g_k - g_{k-1}.
struct DisplacementPair {
    std::span<const double> s;
    std::span<const double> y;

    DisplacementPair(std::span<const double> s_, std::span<const double> y_) : s(s_), y(y_)
    {
        if (s.size() != y.size() || s.empty())
            throw std::invalid_argument("DisplacementPair: s and y must have equal nonzero length");
    }

    double ss() const { return dot(s, s); }
    double sy() const { return dot(s, y); }
    double yy() const { return dot(y, y); }
};

enum class RuleKind { BB1, BB2, DaiFamily, RBBQuadratic, RBBExtended };

struct StepsizeRule {
    RuleKind kind = RuleKind::BB1;
    double gamma = 1.0; // DaiFamily only

    static StepsizeRule bb1() { return {RuleKind::BB1, 1.0}; }
    static StepsizeRule bb2() { return {RuleKind::BB2, 0.0}; }
    static StepsizeRule dai(double gamma)
    {
        if (!(gamma >= 0.0 && gamma <= 1.0))
            throw std::invalid_argument("StepsizeRule: Dai gamma must lie in [0, 1]");
        return {RuleKind::DaiFamily, gamma};
    }
    static StepsizeRule rbb_quadratic() { return {RuleKind::RBBQuadratic, 1.0}; }
    static StepsizeRule rbb_extended() { return {RuleKind::RBBExtended, 1.0}; }

    bool uses_tau() const { return kind == RuleKind::RBBQuadratic || kind == RuleKind::RBBExtended; }
};

enum class TauKind { Fixed, TwoStep };

inline constexpr double default_tau_max = 1e6;

struct TauSchedule {
    TauKind kind = TauKind::Fixed;
    double tau = 0.0; // Fixed only
    double tau_max = default_tau_max;

    static TauSchedule fixed(double tau, double tau_max = default_tau_max)
    {
        if (!(tau >= 0.0) || !std::isfinite(tau))
            throw std::invalid_argument("TauSchedule: fixed tau must be finite and >= 0");
        if (!(tau_max > 0.0))
            throw std::invalid_argument("TauSchedule: tau_max must be > 0");
        return {TauKind::Fixed, tau, tau_max};
    }
    static TauSchedule two_step(double tau_max = default_tau_max)
    {
        if (!(tau_max > 0.0))
            throw std::invalid_argument("TauSchedule: tau_max must be > 0");
        return {TauKind::TwoStep, 0.0, tau_max};
    }
};

// -------------------------------------------------------------------------

/// Long BB scalar s'y / s's.
inline double bb1(const DisplacementPair& p)
{
    const double ss = p.ss();
    if (!(ss > 0.0))
        throw std::domain_error("bb1: s has zero norm");
    return p.sy() / ss;
}

/// Short BB scalar y'y / s'y.
inline double bb2(const DisplacementPair& p)
{
    const double sy = p.sy();
    if (sy == 0.0)
        throw std::domain_error("bb2: s'y is zero");
    return p.yy() / sy;
}

/// gamma * bb1 + (1 - gamma) * bb2.
inline double dai_family(const DisplacementPair& p, double gamma)
{
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("dai_family: gamma must lie in [0, 1]");
    if (gamma == 1.0)
        return bb1(p);
    if (gamma == 0.0)
        return bb2(p);
    return gamma * bb1(p) + (1.0 - gamma) * bb2(p);
}

/// ||alpha s - y||^2 + tau ||alpha L1 s - L2 y||^2, evaluated directly.
inline double rbb_least_squares(double alpha, std::span<const double> s, std::span<const double> y,
                                std::span<const double> L1s, std::span<const double> L2y, double tau)
{
    long double a = 0.0L, b = 0.0L;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const long double r1 = static_cast<long double>(alpha) * s[i] - y[i];
        const long double r2 = static_cast<long double>(alpha) * L1s[i] - L2y[i];
        a += r1 * r1;
        b += r2 * r2;
    }
    return static_cast<double>(a + tau * b);
}

/// Minimizer over alpha of rbb_least_squares, given the products
/// L1s = L1 * s and L2y = L2 * y.
inline double rbb_general(std::span<const double> s, std::span<const double> y,
                          std::span<const double> L1s, std::span<const double> L2y, double tau)
{
    if (!(tau >= 0.0))
        throw std::invalid_argument("rbb_general: tau must be >= 0");
    const double ss = dot(s, s);
    const double sy = dot(s, y);
    if (tau == 0.0) {
        if (!(ss > 0.0))
            throw std::domain_error("rbb_general: zero denominator");
        return sy / ss;
    }
    const double num = sy + tau * dot(L1s, L2y);
    const double den = ss + tau * dot(L1s, L1s);
    if (!(den > 0.0) || !std::isfinite(den))
        throw std::domain_error("rbb_general: zero denominator");
    return num / den;
}

/// Quadratic specialization with L1 = L2 = A and y = A s:
///     (s'y + tau y'Ay) / (s's + tau y'y).
/// Ay is the one extra operator application per iteration.
inline double rbb_quadratic(const DisplacementPair& p, std::span<const double> Ay, double tau)
{
    if (!(tau >= 0.0))
        throw std::invalid_argument("rbb_quadratic: tau must be >= 0");
    if (Ay.size() != p.y.size())
        throw std::invalid_argument("rbb_quadratic: Ay length mismatch");
    if (tau == 0.0)
        return bb1(p);
    const double den = p.ss() + tau * p.yy();
    if (!(den > 0.0))
        throw std::domain_error("rbb_quadratic: zero denominator");
    return (p.sy() + tau * dot(p.y, Ay)) / den;
}

/// Hessian-free variant where L is the scalar y'y / y's:
///     (s'y + tau (y'y)^2 / s'y) / (s's + tau y'y).
inline double rbb_extended(const DisplacementPair& p, double tau)
{
    if (!(tau >= 0.0))
        throw std::invalid_argument("rbb_extended: tau must be >= 0");
    if (tau == 0.0)
        return bb1(p);
    const double sy = p.sy();
    if (sy == 0.0)
        throw std::domain_error("rbb_extended: s'y is zero");
    const double yy = p.yy();
    const double den = p.ss() + tau * yy;
    if (!(den > 0.0))
        throw std::domain_error("rbb_extended: zero denominator");
    return (sy + tau * (yy * yy) / sy) / den;
}

/// Regularization parameter tau for which rbb_quadratic(p, Ay, tau) equals
/// dai_family(p, gamma). Requires y = A s with A SPD; under that condition the
/// result is nonnegative.
inline double gamma_to_tau(const DisplacementPair& p, std::span<const double> Ay, double gamma)
{
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gamma_to_tau: gamma must lie in [0, 1]");
    const double sy = p.sy();
    if (!(sy > 0.0))
        throw std::domain_error("gamma_to_tau: requires s'y > 0");
    if (gamma == 1.0)
        return 0.0;
    const double a1 = bb1(p);
    const double a2 = bb2(p);
    const double yy = p.yy();
    const double ratio_sq = yy / p.ss();
    const double rayleigh_y = dot(p.y, Ay) / yy;
    const double target = gamma * a1 + (1.0 - gamma) * a2;
    const double den = ratio_sq * (target - rayleigh_y);
    if (den == 0.0 || !std::isfinite(den))
        throw std::domain_error("gamma_to_tau: degenerate spectrum (zero denominator)");
    return (1.0 - gamma) * (a1 - a2) / den;
}

/// tau_k = alpha_{k-1} / alpha_{k-2}, clamped to [0, tau_max]. Returns 0 when
/// the ratio is undefined, negative or non-finite.
inline double two_step_tau(double alpha_prev, double alpha_prev2, double tau_max = default_tau_max)
{
    if (alpha_prev2 == 0.0 || !std::isfinite(alpha_prev2) || !std::isfinite(alpha_prev))
        return 0.0;
    const double ratio = alpha_prev / alpha_prev2;
    if (!std::isfinite(ratio) || ratio < 0.0)
        return 0.0;
    return std::min(ratio, tau_max);
}

/// Returns alpha when it is positive and finite, otherwise ||y|| / ||s||.
/// std::nullopt means y = 0 with no usable alpha: the gradient did not change,
/// which the solver treats as a stationary point.
inline std::optional<double> safeguard(double alpha, const DisplacementPair& p)
{
    if (alpha > 0.0 && std::isfinite(alpha))
        return alpha;
    const double ns = norm2(p.s);
    if (!(ns > 0.0))
        throw std::domain_error("safeguard: s has zero norm");
    const double ny = norm2(p.y);
    if (ny == 0.0)
        return std::nullopt;
    return ny / ns;
}

inline std::string to_string(const StepsizeRule& r)
{
    switch (r.kind) {
    case RuleKind::BB1: return "bb1";
    case RuleKind::BB2: return "bb2";
    case RuleKind::DaiFamily: {
        std::string g = std::to_string(r.gamma);
        g.erase(g.find_last_not_of('0') + 1);
        if (!g.empty() && g.back() == '.')
            g.pop_back();
        return "dai:" + g;
    }
    case RuleKind::RBBQuadratic: return "rbbq";
    case RuleKind::RBBExtended: return "rbb";
    }
    return "?";
}

} // namespace rbb
