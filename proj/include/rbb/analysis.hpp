#pragma once

// Diagnostics over finished traces: fluctuation metrics, error coefficients
// in the Hessian eigenbasis, and executable checks of the convergence
// inequalities for quadratic runs.
//
// Error coefficients: with e_k = x_* - x_k and orthonormal eigenvectors
// v_1..v_n (ascending eigenvalues), e_i^k = v_i' e_k. For a gradient step
// on a quadratic, e_i^{k+1} = (1 - lambda_i / alpha_k) e_i^k, which is the
// source of every per-index check below.
//
// Convergence tail: once ||e_k|| < 1e3 * machine eps * ||e_0|| the
// coefficients are rounding noise, so the inequality checks stop there.

#include "rbb/linalg.hpp"
#include "rbb/quadgen.hpp"
#include "rbb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbb {

class metric_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a check needs eigen data or stored iterates that are absent.
class capability_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Total upward variation sum_k max(0, f_{k+1} - f_k); zero iff f never increases.
inline double fluctuation(std::span<const double> f)
{
    if (f.empty())
        throw metric_error("fluctuation: empty history");
    long double up = 0.0L;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!std::isfinite(f[k]))
            throw metric_error("fluctuation: non-finite entry at k = " + std::to_string(k));
        if (k > 0 && f[k] > f[k - 1])
            up += static_cast<long double>(f[k]) - static_cast<long double>(f[k - 1]);
    }
    return static_cast<double>(up);
}

/// df_rbb / df_bb with 0/0 = 1 and x/0 = +inf.
inline double mu_ratio(double df_rbb, double df_bb)
{
    if (df_rbb < 0.0 || df_bb < 0.0 || std::isnan(df_rbb) || std::isnan(df_bb))
        throw metric_error("mu_ratio: fluctuation values must be >= 0");
    if (df_bb == 0.0)
        return df_rbb == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return df_rbb / df_bb;
}

struct RunReport {
    std::string method;
    std::string problem;
    std::size_t iterations = 0;
    double time_s = 0.0;
    double delta_f = 0.0;
    bool converged = false;
    std::string stop_reason;
};

inline RunReport make_report(const std::string& method, const std::string& problem, const IterationTrace& trace,
                             double time_s)
{
    return {method, problem, trace.iterations(), time_s, fluctuation(trace.f_history()), trace.converged(),
            to_string(trace.stop_reason) + (trace.stalled ? "(stalled)" : "")};
}

/// e[k][i] = v_i' (x_* - x_k). Stored column-per-iterate.
struct ErrorCoefficients {
    std::vector<Vector> columns;
    std::vector<double> error_norms; // ||x_* - x_k||, computed directly

    std::size_t n() const { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t iterates() const { return columns.size(); }
    double operator()(std::size_t i, std::size_t k) const { return columns[k][i]; }

    /// True while ||e_k|| is above the rounding floor.
    bool above_tail(std::size_t k) const
    {
        return error_norms[k] >= 1e3 * std::numeric_limits<double>::epsilon() * error_norms.front();
    }

    /// max_k | sum_i (e_i^k)^2 - ||e_k||^2 | / ||e_k||^2
    double parseval_residual() const
    {
        double worst = 0.0;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            const double nn = error_norms[k] * error_norms[k];
            if (nn == 0.0)
                continue;
            worst = std::max(worst, std::abs(dot(columns[k], columns[k]) - nn) / nn);
        }
        return worst;
    }
};

namespace detail {

inline const EigenData& require_eigen(const QuadraticProblem& prob)
{
    if (!prob.eigen())
        throw capability_error("eigen data unavailable for this problem");
    return *prob.eigen();
}

inline void require_iterates(const IterationTrace& trace)
{
    if (trace.iterates.empty() || trace.iterates.size() != trace.records.size())
        throw capability_error("trace has no stored iterates; rerun with record_iterates = true");
}

} // namespace detail

inline ErrorCoefficients error_coefficients(const IterationTrace& trace, const QuadraticProblem& prob)
{
    const EigenData& ed = detail::require_eigen(prob);
    detail::require_iterates(trace);
    ErrorCoefficients out;
    out.columns.reserve(trace.iterates.size());
    Vector e(prob.n());
    for (const auto& x : trace.iterates) {
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] = prob.x_star()[i] - x[i];
        out.error_norms.push_back(norm2(e));
        // Q' e gives coordinates in the unsorted eigenbasis.
        Vector c = e;
        prob.q().apply_transpose(c);
        Vector col(c.size());
        for (std::size_t j = 0; j < col.size(); ++j)
            col[j] = c[ed.order[j]];
        out.columns.push_back(std::move(col));
    }
    return out;
}

struct CheckResult {
    bool passed = true;
    double worst = 0.0;       // largest normalized residual or violation seen
    std::size_t checked = 0;  // number of (i, k) or k instances tested
    std::size_t violations = 0;
};

struct ShiftIdentityReport {
    double max_gradient_residual = 0.0; // A e_k = alpha_k s_k
    double max_update_residual = 0.0;   // e_{k+1} = (1/alpha_k)(alpha_k I - A) e_k
    std::size_t checked = 0;

    bool within(double tol) const { return max_gradient_residual <= tol && max_update_residual <= tol; }
};

/// Residuals are relative to the size of the operands the identity is formed
/// from: lambda_n (||x_*|| + ||e_k||) for the first, ||x_*|| + ||e_k|| for the
/// second, which is the scale of the rounding in x_k itself.
inline ShiftIdentityReport verify_shift_identities(const IterationTrace& trace, const QuadraticProblem& prob)
{
    detail::require_iterates(trace);
    const double lmax = prob.eigen() ? prob.eigen()->lambda_max()
                                     : *std::max_element(prob.diag().begin(), prob.diag().end());
    const double xs = norm2(prob.x_star());
    const double e0 = norm2(subtract(prob.x_star(), trace.iterates.front()));
    ShiftIdentityReport rep;
    const std::size_t n = prob.n();
    Vector ek(n), ae(n), pred(n);
    for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
        const auto& xk = trace.iterates[k];
        const auto& xk1 = trace.iterates[k + 1];
        for (std::size_t i = 0; i < n; ++i)
            ek[i] = prob.x_star()[i] - xk[i];
        const double enorm = norm2(ek);
        if (enorm < 1e3 * std::numeric_limits<double>::epsilon() * e0)
            break;
        const double alpha = trace.records[k].alpha;
        prob.apply(ek, ae);
        double r1 = 0.0, r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = xk1[i] - xk[i];
            r1 = std::max(r1, std::abs(ae[i] - alpha * s));
            const double e_next = prob.x_star()[i] - xk1[i];
            r2 = std::max(r2, std::abs(e_next - (ek[i] - ae[i] / alpha)));
        }
        const double scale = xs + enorm;
        rep.max_gradient_residual = std::max(rep.max_gradient_residual, r1 / (lmax * scale));
        rep.max_update_residual = std::max(rep.max_update_residual, r2 / scale);
        ++rep.checked;
    }
    return rep;
}

namespace detail {

/// Absolute slack for coefficient comparisons: the rounding level of x_k.
inline double coefficient_floor(const ErrorCoefficients& c, double x_star_norm)
{
    return 1e-12 * (x_star_norm + c.error_norms.front());
}

} // namespace detail

/// |e_1^{k+1}| <= (1 - lambda_1/lambda_n) |e_1^k| for every k >= 1.
inline CheckResult verify_q_linear_e1(const ErrorCoefficients& c, double lambda_1, double lambda_n,
                                      double x_star_norm = 0.0)
{
    CheckResult r;
    const double theta = 1.0 - lambda_1 / lambda_n;
    const double slack = std::max(1e-12, detail::coefficient_floor(c, x_star_norm));
    for (std::size_t k = 1; k + 1 < c.iterates(); ++k) {
        if (!c.above_tail(k))
            break;
        const double lhs = std::abs(c(0, k + 1));
        const double rhs = theta * std::abs(c(0, k));
        ++r.checked;
        if (lhs > rhs + slack) {
            ++r.violations;
            r.passed = false;
        }
        if (std::abs(c(0, k)) > slack)
            r.worst = std::max(r.worst, lhs / std::abs(c(0, k)));
    }
    return r;
}

/// |e_i^{k+1}| <= max(lambda_i/lambda_1 - 1, 1 - lambda_i/lambda_n) |e_i^k| for all i and k >= 1.
inline CheckResult verify_contraction_bound(const ErrorCoefficients& c, std::span<const double> lambda,
                                            double x_star_norm = 0.0)
{
    if (lambda.size() != c.n())
        throw std::invalid_argument("verify_contraction_bound: spectrum length mismatch");
    CheckResult r;
    const double l1 = lambda.front(), ln = lambda.back();
    const double floor = detail::coefficient_floor(c, x_star_norm);
    for (std::size_t k = 1; k + 1 < c.iterates(); ++k) {
        if (!c.above_tail(k))
            break;
        for (std::size_t i = 0; i < c.n(); ++i) {
            const double factor = std::max(lambda[i] / l1 - 1.0, 1.0 - lambda[i] / ln);
            const double prev = std::abs(c(i, k));
            const double lhs = std::abs(c(i, k + 1));
            ++r.checked;
            if (lhs > factor * prev + 1e-10 * prev + floor) {
                ++r.violations;
                r.passed = false;
            }
            if (prev > floor)
                r.worst = std::max(r.worst, (lhs - factor * prev) / prev);
        }
    }
    return r;
}

enum class Mode { Shrinking, Fluctuation };

inline std::string to_string(Mode m) { return m == Mode::Shrinking ? "shrinking" : "fluctuation"; }

/// Sign of sum_j (lambda_j - lambda_i) (e_j^{k-1})^2 lambda_j^2 (1 + tau lambda_j^2); i is 0-based.
inline Mode classify_mode(std::span<const double> e_prev, std::span<const double> lambda, double tau, std::size_t i)
{
    if (e_prev.size() != lambda.size() || i >= lambda.size())
        throw std::invalid_argument("classify_mode: bad dimensions");
    long double sum = 0.0L;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        const long double l = lambda[j];
        const long double e = e_prev[j];
        sum += (l - lambda[i]) * e * e * l * l * (1.0L + tau * l * l);
    }
    return sum >= 0.0L ? Mode::Shrinking : Mode::Fluctuation;
}

/// Rebuilds alpha_{k+1} = sum lambda^3 (1 + tau lambda^2) e^2 / sum lambda^2 (1 + tau lambda^2) e^2
/// from e^k, with tau taken from records[k+1], and returns the largest
/// relative error against the recorded alpha.
inline double verify_alpha_recurrence(const IterationTrace& trace, const ErrorCoefficients& c,
                                      std::span<const double> lambda)
{
    if (lambda.size() != c.n())
        throw std::invalid_argument("verify_alpha_recurrence: spectrum length mismatch");
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < c.iterates() && k + 1 < trace.records.size(); ++k) {
        if (!c.above_tail(k))
            break;
        const double tau = trace.records[k + 1].tau;
        long double num = 0.0L, den = 0.0L;
        for (std::size_t i = 0; i < c.n(); ++i) {
            const long double l = lambda[i];
            const long double e = c(i, k);
            const long double w = l * l * (1.0L + tau * l * l) * e * e;
            num += l * w;
            den += w;
        }
        if (den == 0.0L)
            continue;
        const double rebuilt = static_cast<double>(num / den);
        const double recorded = trace.records[k + 1].alpha;
        worst = std::max(worst, std::abs(rebuilt - recorded) / std::abs(recorded));
    }
    return worst;
}

/// Fraction of rule-produced alphas (k >= 1, steps actually taken) inside
/// [lambda_n/2, lambda_n]. Below kappa = 2 every alpha gives a monotone
/// step, so the fraction is reported as 1.
inline double stable_interval_check(const IterationTrace& trace, double lambda_n, double kappa)
{
    if (kappa < 2.0)
        return 1.0;
    std::size_t in = 0, total = 0;
    for (std::size_t k = 1; k < trace.iterations(); ++k) {
        const double a = trace.records[k].alpha;
        ++total;
        if (a >= 0.5 * lambda_n && a <= lambda_n)
            ++in;
    }
    return total ? static_cast<double>(in) / static_cast<double>(total) : 1.0;
}

} // namespace rbb
