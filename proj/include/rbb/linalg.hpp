#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rbb {

using Vector = std::vector<double>;

// Dot products and norms accumulate in long double, summed in index order,
// so results do not depend on vectorization or thread layout.

inline double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
    return static_cast<double>(acc);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

inline Vector subtract(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("subtract: length mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += a * x[i];
}

inline bool all_finite(std::span<const double> a)
{
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

} // namespace rbb
