#pragma once

// Spherical t-designs on S^2 via the Legendre-kernel form of the design
// functional
//
//     A_{N,t}(X) = (1/N^2) sum_i sum_j sum_{n=1}^t (2n+1) P_n(<x_i, x_j>),
//
// which is >= 0 and vanishes exactly on t-designs. Points are optimized on
// the product of spheres: the gradient is projected onto each tangent plane
// and every iterate is renormalized after the step.

#include "rbb/linalg.hpp"
#include "rbb/objective.hpp"
#include "rbb/random.hpp"
#include "rbb/solver.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rbb {

using Point3 = std::array<double, 3>;

/// N points on the unit sphere, stored flat as (x0, y0, z0, x1, ...).
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::vector<double> coords) : xyz_(std::move(coords))
    {
        if (xyz_.size() % 3 != 0)
            throw std::invalid_argument("PointSet: coordinate count must be a multiple of 3");
    }
    explicit PointSet(const std::vector<Point3>& pts)
    {
        for (const auto& p : pts)
            xyz_.insert(xyz_.end(), p.begin(), p.end());
    }

    std::size_t size() const { return xyz_.size() / 3; }
    Point3 operator[](std::size_t i) const { return {xyz_[3 * i], xyz_[3 * i + 1], xyz_[3 * i + 2]}; }
    const std::vector<double>& coords() const { return xyz_; }
    std::vector<double>& coords() { return xyz_; }

    double max_norm_defect() const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            worst = std::max(worst, std::abs(std::sqrt(dot(block(i), block(i))) - 1.0));
        return worst;
    }

private:
    std::span<const double> block(std::size_t i) const { return std::span<const double>(xyz_).subspan(3 * i, 3); }
    std::vector<double> xyz_;
};

struct DesignSpec {
    int t = 1;
    std::size_t N = 0; // 0 means (t + 1)^2

    std::size_t points() const { return N ? N : static_cast<std::size_t>((t + 1) * (t + 1)); }
};

/// P_0(u) .. P_t(u) by (n+1) P_{n+1} = (2n+1) u P_n - n P_{n-1}. u is clamped to [-1, 1].
inline Vector legendre_values(int t, double u)
{
    if (t < 0)
        throw std::invalid_argument("legendre_values: t must be >= 0");
    u = std::clamp(u, -1.0, 1.0);
    Vector p(static_cast<std::size_t>(t) + 1);
    p[0] = 1.0;
    if (t >= 1)
        p[1] = u;
    for (int n = 1; n < t; ++n)
        p[n + 1] = ((2.0 * n + 1.0) * u * p[n] - n * p[n - 1]) / (n + 1.0);
    return p;
}

/// P_0'(u) .. P_t'(u) via P_{n+1}' = P_{n-1}' + (2n+1) P_n. This agrees with
/// n (u P_n - P_{n-1}) / (u^2 - 1) in the interior and with
/// (+-1)^{n-1} n (n+1) / 2 at the endpoints, without the cancellation the
/// quotient form suffers near u = +-1.
inline Vector legendre_derivatives(int t, double u)
{
    const Vector p = legendre_values(t, u);
    Vector d(p.size(), 0.0);
    if (t >= 1)
        d[1] = 1.0;
    for (int n = 1; n < t; ++n)
        d[n + 1] = d[n - 1] + (2.0 * n + 1.0) * p[n];
    return d;
}

namespace detail {

/// sum_{n=1}^t (2n+1) P_n(u), and its derivative in u.
inline std::pair<double, double> design_kernel(int t, double u)
{
    u = std::clamp(u, -1.0, 1.0);
    double pm1 = 1.0, p = u;  // P_{n-1}, P_n
    double dm1 = 0.0, d = 1.0; // P'_{n-1}, P'_n
    double k = 0.0, dk = 0.0;
    for (int n = 1; n <= t; ++n) {
        k += (2.0 * n + 1.0) * p;
        dk += (2.0 * n + 1.0) * d;
        const double p_next = ((2.0 * n + 1.0) * u * p - n * pm1) / (n + 1.0);
        const double d_next = dm1 + (2.0 * n + 1.0) * p;
        pm1 = p;
        p = p_next;
        dm1 = d;
        d = d_next;
    }
    return {k, dk};
}

inline double inner3(std::span<const double> x, std::size_t i, std::size_t j)
{
    return x[3 * i] * x[3 * j] + x[3 * i + 1] * x[3 * j + 1] + x[3 * i + 2] * x[3 * j + 2];
}

inline void check_coords(std::span<const double> x)
{
    if (x.empty() || x.size() % 3 != 0)
        throw std::invalid_argument("design functional: need 3N coordinates with N >= 1");
}

} // namespace detail

/// A_{N,t} on flat coordinates; each unordered pair is visited once and the
/// diagonal (i = j) terms are included.
inline double a_nt(std::span<const double> xyz, int t)
{
    detail::check_coords(xyz);
    const std::size_t N = xyz.size() / 3;
    long double diag = 0.0L, off = 0.0L;
    for (std::size_t i = 0; i < N; ++i) {
        diag += detail::design_kernel(t, detail::inner3(xyz, i, i)).first;
        for (std::size_t j = i + 1; j < N; ++j)
            off += detail::design_kernel(t, detail::inner3(xyz, i, j)).first;
    }
    const long double total = diag + 2.0L * off;
    return static_cast<double>(total / (static_cast<long double>(N) * static_cast<long double>(N)));
}

inline double a_nt(const PointSet& X, int t) { return a_nt(X.coords(), t); }

/// Riemannian gradient of A_{N,t}: the Euclidean partial
///     dA/dx_j = (2/N^2) sum_i sum_n (2n+1) P_n'(<x_j, x_i>) x_i
/// projected by (I - x_j x_j').
inline void a_nt_gradient(std::span<const double> xyz, int t, std::span<double> grad)
{
    detail::check_coords(xyz);
    if (grad.size() != xyz.size())
        throw std::invalid_argument("a_nt_gradient: output length mismatch");
    const std::size_t N = xyz.size() / 3;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double dk_ii = detail::design_kernel(t, detail::inner3(xyz, i, i)).second;
        for (int c = 0; c < 3; ++c)
            grad[3 * i + c] += dk_ii * xyz[3 * i + c];
        for (std::size_t j = i + 1; j < N; ++j) {
            const double dk = detail::design_kernel(t, detail::inner3(xyz, i, j)).second;
            for (int c = 0; c < 3; ++c) {
                grad[3 * i + c] += dk * xyz[3 * j + c];
                grad[3 * j + c] += dk * xyz[3 * i + c];
            }
        }
    }
    const double scale = 2.0 / (static_cast<double>(N) * static_cast<double>(N));
    for (std::size_t j = 0; j < N; ++j) {
        double* gj = &grad[3 * j];
        const double* xj = &xyz[3 * j];
        for (int c = 0; c < 3; ++c)
            gj[c] *= scale;
        const double radial = gj[0] * xj[0] + gj[1] * xj[1] + gj[2] * xj[2];
        const double nn = xj[0] * xj[0] + xj[1] * xj[1] + xj[2] * xj[2];
        for (int c = 0; c < 3; ++c)
            gj[c] -= radial / nn * xj[c];
    }
}

inline Vector a_nt_gradient(const PointSet& X, int t)
{
    Vector g(X.coords().size());
    a_nt_gradient(X.coords(), t, g);
    return g;
}

/// Renormalizes every 3-block to unit length.
inline void retract_to_spheres(std::span<double> xyz)
{
    for (std::size_t i = 0; i + 2 < xyz.size(); i += 3) {
        const double r = std::sqrt(xyz[i] * xyz[i] + xyz[i + 1] * xyz[i + 1] + xyz[i + 2] * xyz[i + 2]);
        if (r > 0.0)
            for (int c = 0; c < 3; ++c)
                xyz[i + c] /= r;
    }
}

/// Generalized spiral layout on S^2 with a small seeded jitter; the jitter
/// breaks the symmetric configurations that are saddle points of A_{N,t}.
inline PointSet spiral_points(std::size_t N, std::uint64_t seed, double jitter = 0.05)
{
    if (N < 1)
        throw std::invalid_argument("spiral_points: N must be >= 1");
    Rng rng(derive_seed(seed, 0x5b1a));
    std::vector<double> xyz(3 * N);
    double phi = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const double h = N == 1 ? 1.0 : -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(N - 1);
        const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
        if (k > 0 && k + 1 < N)
            phi = std::fmod(phi + 3.6 / std::sqrt(static_cast<double>(N)) / r, 2.0 * std::numbers::pi);
        else
            phi = 0.0;
        xyz[3 * k] = r * std::cos(phi) + rng.uniform(-jitter, jitter);
        xyz[3 * k + 1] = r * std::sin(phi) + rng.uniform(-jitter, jitter);
        xyz[3 * k + 2] = h + rng.uniform(-jitter, jitter);
    }
    retract_to_spheres(xyz);
    return PointSet(std::move(xyz));
}

/// A_{N,t} as an Objective on R^{3N} with sphere retraction.
inline Objective design_objective(int t, std::size_t N)
{
    Objective o;
    o.name = "SphDesign(t=" + std::to_string(t) + ",N=" + std::to_string(N) + ")";
    o.dim = 3 * N;
    o.value = [t](std::span<const double> x) { return a_nt(x, t); };
    o.gradient = [t](std::span<const double> x, std::span<double> g) { a_nt_gradient(x, t, g); };
    o.retract = retract_to_spheres;
    o.standard_start = spiral_points(N, 0).coords();
    return o;
}

struct DesignResult {
    PointSet points;
    IterationTrace trace;
    double value = 0.0;
};

inline DesignResult run_design(const DesignSpec& spec, const SolverConfig& cfg, std::uint64_t seed)
{
    if (spec.t < 1)
        throw std::invalid_argument("run_design: t must be >= 1");
    const std::size_t N = spec.points();
    const Objective obj = design_objective(spec.t, N);
    const PointSet start = spiral_points(N, seed);
    IterationTrace trace = run_general(obj, cfg, start.coords());
    PointSet pts(trace.final_x);
    const double value = a_nt(pts, spec.t);
    return {std::move(pts), std::move(trace), value};
}

/// One "x y z" line per point, 17 significant digits.
inline void write_points(std::ostream& os, const PointSet& X)
{
    os << std::setprecision(17);
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto p = X[i];
        os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    }
}

inline PointSet read_points(std::istream& is)
{
    std::vector<double> xyz;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#')
            continue;
        std::istringstream ls(line);
        double a, b, c;
        if (!(ls >> a >> b >> c))
            throw std::runtime_error("read_points: malformed line '" + line + "'");
        xyz.insert(xyz.end(), {a, b, c});
    }
    return PointSet(std::move(xyz));
}

} // namespace rbb
