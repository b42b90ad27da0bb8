#pragma once

// Unconstrained test functions with analytic gradients, following the
// definitions and standard starting points of Andrei's "Unconstrained
// Optimization Test Functions" collection. Indices in the comments are
// 1-based as in that collection; the code is 0-based.

#include "rbb/linalg.hpp"
#include "rbb/objective.hpp"
#include "rbb/quadgen.hpp"
#include "rbb/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbb {

struct ObjectiveInfo {
    std::string name;
    std::string valid_dims; // human-readable constraint
    std::string start;      // standard start convention
    std::function<bool(std::size_t)> dim_ok;
};

namespace detail {

using Span = std::span<const double>;
using MutSpan = std::span<double>;

inline Vector alternating(std::size_t n, double odd, double even)
{
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = (i % 2 == 0) ? odd : even;
    return x;
}

inline Objective make(std::string name, std::size_t n, std::function<double(Span)> f,
                      std::function<void(Span, MutSpan)> g, Vector x0)
{
    Objective o;
    o.name = std::move(name);
    o.dim = n;
    o.value = std::move(f);
    o.gradient = std::move(g);
    o.standard_start = std::move(x0);
    return o;
}

// f = (x1 - 1)^2 + sum_{i>=2} 100 (x_i - x_{i-1}^3)^2,  x0 = (-1.2, 1, -1.2, 1, ...)
inline Objective cube(std::size_t n)
{
    auto f = [](Span x) {
        double s = (x[0] - 1.0) * (x[0] - 1.0);
        for (std::size_t i = 1; i < x.size(); ++i) {
            const double r = x[i] - x[i - 1] * x[i - 1] * x[i - 1];
            s += 100.0 * r * r;
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        d[0] = 2.0 * (x[0] - 1.0);
        for (std::size_t i = 1; i < x.size(); ++i) {
            const double r = x[i] - x[i - 1] * x[i - 1] * x[i - 1];
            d[i] += 200.0 * r;
            d[i - 1] -= 600.0 * r * x[i - 1] * x[i - 1];
        }
    };
    return make("CUBE", n, f, g, alternating(n, -1.2, 1.0));
}

// f = sum_{i=1}^{n/2} 100 (x_{2i} - x_{2i-1}^3)^2 + (1 - x_{2i-1})^2,  x0 = (-1.2, 1, ...)
inline Objective ext_white_holst(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
            const double r = x[i + 1] - x[i] * x[i] * x[i];
            s += 100.0 * r * r + (1.0 - x[i]) * (1.0 - x[i]);
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
            const double r = x[i + 1] - x[i] * x[i] * x[i];
            d[i] = -600.0 * r * x[i] * x[i] - 2.0 * (1.0 - x[i]);
            d[i + 1] = 200.0 * r;
        }
    };
    return make("ExtWhiteHolst", n, f, g, alternating(n, -1.2, 1.0));
}

// f = sum 4 (x_i^2 - x_1)^2 + sum (x_i - 1)^2,  x0 = (4, ..., 4)
inline Objective liarwhd(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (double xi : x) {
            const double r = xi * xi - x[0];
            s += 4.0 * r * r + (xi - 1.0) * (xi - 1.0);
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        double d0 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = x[i] * x[i] - x[0];
            d[i] = 16.0 * r * x[i] + 2.0 * (x[i] - 1.0);
            d0 -= 8.0 * r;
        }
        d[0] += d0;
    };
    return make("LIARWHD", n, f, g, Vector(n, 4.0));
}

// f = sum_{i=1}^{n-2} x_i^2 + 100 x_{i+1}^2 + 100 x_{i+2}^2,  x0 = (3, ..., 3)
inline Objective dqdrtic(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 2 < x.size(); ++i)
            s += x[i] * x[i] + 100.0 * x[i + 1] * x[i + 1] + 100.0 * x[i + 2] * x[i + 2];
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i + 2 < x.size(); ++i) {
            d[i] += 2.0 * x[i];
            d[i + 1] += 200.0 * x[i + 1];
            d[i + 2] += 200.0 * x[i + 2];
        }
    };
    return make("DQDRTIC", n, f, g, Vector(n, 3.0));
}

// f = (x1 - 1)^2 + sum_{i=2}^n i (2 x_i - x_{i-1})^2,  x0 = (1, ..., 1)
inline Objective tridia(std::size_t n)
{
    auto f = [](Span x) {
        double s = (x[0] - 1.0) * (x[0] - 1.0);
        for (std::size_t i = 1; i < x.size(); ++i) {
            const double r = 2.0 * x[i] - x[i - 1];
            s += static_cast<double>(i + 1) * r * r;
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        d[0] = 2.0 * (x[0] - 1.0);
        for (std::size_t i = 1; i < x.size(); ++i) {
            const double c = 2.0 * static_cast<double>(i + 1) * (2.0 * x[i] - x[i - 1]);
            d[i] += 2.0 * c;
            d[i - 1] -= c;
        }
    };
    return make("TRIDIA", n, f, g, Vector(n, 1.0));
}

// f = sum (i x_i)^2,  x0 = (1, ..., 1)
inline Objective power(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = static_cast<double>(i + 1) * x[i];
            s += r * r;
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double c = static_cast<double>(i + 1);
            d[i] = 2.0 * c * c * x[i];
        }
    };
    return make("POWER", n, f, g, Vector(n, 1.0));
}

// f = sum_{i=1}^{n-1} (x_i^2 + x_{i+1}^2)^2 + (3 - 4 x_i),  x0 = (2, ..., 2)
inline Objective engval1(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double q = x[i] * x[i] + x[i + 1] * x[i + 1];
            s += q * q + (3.0 - 4.0 * x[i]);
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double q = x[i] * x[i] + x[i + 1] * x[i + 1];
            d[i] += 4.0 * q * x[i] - 4.0;
            d[i + 1] += 4.0 * q * x[i + 1];
        }
    };
    return make("ENGVAL1", n, f, g, Vector(n, 2.0));
}

// Blocks of four:
//   100 (a^2 - b)^2 + (a - 1)^2 + 90 (c^2 - d)^2 + (1 - c)^2
//   + 10.1 ((b - 1)^2 + (d - 1)^2) + 19.8 (b - 1)(d - 1),
// x0 = (-3, -1, -3, -1, ...)
inline Objective ext_wood(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 3 < x.size(); i += 4) {
            const double a = x[i], b = x[i + 1], c = x[i + 2], d = x[i + 3];
            s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0) + 90.0 * (c * c - d) * (c * c - d) +
                 (1.0 - c) * (1.0 - c) + 10.1 * ((b - 1.0) * (b - 1.0) + (d - 1.0) * (d - 1.0)) +
                 19.8 * (b - 1.0) * (d - 1.0);
        }
        return s;
    };
    auto g = [](Span x, MutSpan out) {
        for (std::size_t i = 0; i + 3 < x.size(); i += 4) {
            const double a = x[i], b = x[i + 1], c = x[i + 2], d = x[i + 3];
            out[i] = 400.0 * (a * a - b) * a + 2.0 * (a - 1.0);
            out[i + 1] = -200.0 * (a * a - b) + 20.2 * (b - 1.0) + 19.8 * (d - 1.0);
            out[i + 2] = 360.0 * (c * c - d) * c - 2.0 * (1.0 - c);
            out[i + 3] = -180.0 * (c * c - d) + 20.2 * (d - 1.0) + 19.8 * (b - 1.0);
        }
    };
    return make("ExtWood", n, f, g, alternating(n, -3.0, -1.0));
}

// f = sum_{i=1}^{n/2} (x_{2i-1}^2 + x_{2i} - 11)^2 + (x_{2i-1} + x_{2i}^2 - 7)^2,  x0 = (1, ..., 1)
inline Objective ext_himmelblau(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
            const double p = x[i] * x[i] + x[i + 1] - 11.0;
            const double q = x[i] + x[i + 1] * x[i + 1] - 7.0;
            s += p * p + q * q;
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
            const double p = x[i] * x[i] + x[i + 1] - 11.0;
            const double q = x[i] + x[i + 1] * x[i + 1] - 7.0;
            d[i] = 4.0 * p * x[i] + 2.0 * q;
            d[i + 1] = 2.0 * p + 4.0 * q * x[i + 1];
        }
    };
    return make("ExtHimmelblau", n, f, g, Vector(n, 1.0));
}

// f = sum_{i=1}^{n-1} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2,  x0 = (-1.2, 1, ...)
inline Objective gen_rosenbrock(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double r = x[i + 1] - x[i] * x[i];
            s += 100.0 * r * r + (1.0 - x[i]) * (1.0 - x[i]);
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double r = x[i + 1] - x[i] * x[i];
            d[i] += -400.0 * r * x[i] - 2.0 * (1.0 - x[i]);
            d[i + 1] += 200.0 * r;
        }
    };
    return make("GenRosenbrock", n, f, g, alternating(n, -1.2, 1.0));
}

// Dixon3DQ: f = (x1 - 1)^2 + sum_{j=2}^{n-1} (x_j - x_{j+1})^2 + (x_n - 1)^2,  x0 = (-1, ..., -1)
inline Objective dixon(std::size_t n)
{
    auto f = [](Span x) {
        const std::size_t m = x.size();
        double s = (x[0] - 1.0) * (x[0] - 1.0) + (x[m - 1] - 1.0) * (x[m - 1] - 1.0);
        for (std::size_t j = 1; j + 1 < m; ++j)
            s += (x[j] - x[j + 1]) * (x[j] - x[j + 1]);
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        const std::size_t m = x.size();
        std::fill(d.begin(), d.end(), 0.0);
        d[0] += 2.0 * (x[0] - 1.0);
        d[m - 1] += 2.0 * (x[m - 1] - 1.0);
        for (std::size_t j = 1; j + 1 < m; ++j) {
            const double r = 2.0 * (x[j] - x[j + 1]);
            d[j] += r;
            d[j + 1] -= r;
        }
    };
    return make("Dixon", n, f, g, Vector(n, -1.0));
}

// DIXMAAN family, m = floor(n/3):
//   f = 1 + sum_{i=1}^{n}  alpha x_i^2 (i/n)^k1
//         + sum_{i=1}^{n-1} beta x_i^2 (x_{i+1} + x_{i+1}^2)^2 (i/n)^k2
//         + sum_{i=1}^{2m}  gamma x_i^2 x_{i+m}^4 (i/n)^k3
//         + sum_{i=1}^{m}   delta x_i x_{i+2m} (i/n)^k4,
// x0 = (2, ..., 2).
struct DixmaanParams {
    double alpha, beta, gamma, delta;
    int k1, k2, k3, k4;
};

inline Objective dixmaan(std::string name, std::size_t n, DixmaanParams p)
{
    const std::size_t m = n / 3;
    auto w = [n](std::size_t i, int k) { return std::pow(static_cast<double>(i + 1) / static_cast<double>(n), k); };
    auto f = [=](Span x) {
        double s = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            s += p.alpha * x[i] * x[i] * w(i, p.k1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double u = x[i + 1] + x[i + 1] * x[i + 1];
            s += p.beta * x[i] * x[i] * u * u * w(i, p.k2);
        }
        for (std::size_t i = 0; i < 2 * m; ++i) {
            const double z = x[i + m] * x[i + m];
            s += p.gamma * x[i] * x[i] * z * z * w(i, p.k3);
        }
        for (std::size_t i = 0; i < m; ++i)
            s += p.delta * x[i] * x[i + 2 * m] * w(i, p.k4);
        return s;
    };
    auto g = [=](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            d[i] += 2.0 * p.alpha * x[i] * w(i, p.k1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double u = x[i + 1] + x[i + 1] * x[i + 1];
            const double c = p.beta * w(i, p.k2);
            d[i] += 2.0 * c * x[i] * u * u;
            d[i + 1] += 2.0 * c * x[i] * x[i] * u * (1.0 + 2.0 * x[i + 1]);
        }
        for (std::size_t i = 0; i < 2 * m; ++i) {
            const double z = x[i + m];
            const double c = p.gamma * w(i, p.k3);
            d[i] += 2.0 * c * x[i] * z * z * z * z;
            d[i + m] += 4.0 * c * x[i] * x[i] * z * z * z;
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double c = p.delta * w(i, p.k4);
            d[i] += c * x[i + 2 * m];
            d[i + 2 * m] += c * x[i];
        }
    };
    return make(std::move(name), n, f, g, Vector(n, 2.0));
}

// f = 16 + sum_{i=1}^{n-1} (x_i - 2)^4 + (x_i x_{i+1} - 2 x_{i+1})^2 + (x_{i+1} + 1)^2,  x0 = (0, ..., 0)
inline Objective edensch(std::size_t n)
{
    auto f = [](Span x) {
        double s = 16.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double a = (x[i] - 2.0) * (x[i] - 2.0);
            const double b = x[i] * x[i + 1] - 2.0 * x[i + 1];
            s += a * a + b * b + (x[i + 1] + 1.0) * (x[i + 1] + 1.0);
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i] - 2.0;
            const double b = x[i] * x[i + 1] - 2.0 * x[i + 1];
            d[i] += 4.0 * a * a * a + 2.0 * b * x[i + 1];
            d[i + 1] += 2.0 * b * (x[i] - 2.0) + 2.0 * (x[i + 1] + 1.0);
        }
    };
    return make("EDENSCH", n, f, g, Vector(n, 0.0));
}

// f = sum_{i=1}^{n-2} (x_i + x_{i+1}) exp(-x_{i+2} (x_i + x_{i+1})),  x0 = (1, ..., 1)
inline Objective bdexp(std::size_t n)
{
    auto f = [](Span x) {
        double s = 0.0;
        for (std::size_t i = 0; i + 2 < x.size(); ++i) {
            const double u = x[i] + x[i + 1];
            s += u * std::exp(-x[i + 2] * u);
        }
        return s;
    };
    auto g = [](Span x, MutSpan d) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i + 2 < x.size(); ++i) {
            const double u = x[i] + x[i + 1];
            const double e = std::exp(-x[i + 2] * u);
            const double du = e * (1.0 - x[i + 2] * u);
            d[i] += du;
            d[i + 1] += du;
            d[i + 2] -= u * u * e;
        }
    };
    return make("BDEXP", n, f, g, Vector(n, 1.0));
}

} // namespace detail

/// Registry of supported families with their dimension rules.
inline const std::vector<ObjectiveInfo>& objective_registry()
{
    auto any = [](std::size_t lo) { return [lo](std::size_t n) { return n >= lo; }; };
    auto mult = [](std::size_t k) { return [k](std::size_t n) { return n >= k && n % k == 0; }; };
    static const std::vector<ObjectiveInfo> reg = {
        {"CUBE", "n >= 2", "(-1.2, 1, -1.2, 1, ...)", any(2)},
        {"ExtWhiteHolst", "even n >= 2", "(-1.2, 1, -1.2, 1, ...)", mult(2)},
        {"LIARWHD", "n >= 1", "(4, ..., 4)", any(1)},
        {"DQDRTIC", "n >= 3", "(3, ..., 3)", any(3)},
        {"TRIDIA", "n >= 2", "(1, ..., 1)", any(2)},
        {"POWER", "n >= 1", "(1, ..., 1)", any(1)},
        {"ENGVAL1", "n >= 2", "(2, ..., 2)", any(2)},
        {"ExtWood", "n multiple of 4", "(-3, -1, -3, -1, ...)", mult(4)},
        {"ExtHimmelblau", "even n >= 2", "(1, ..., 1)", mult(2)},
        {"GenRosenbrock", "n >= 2", "(-1.2, 1, -1.2, 1, ...)", any(2)},
        {"Dixon", "n >= 2", "(-1, ..., -1)", any(2)},
        {"DIXMAANB", "n >= 3 (m = floor(n/3))", "(2, ..., 2)", any(3)},
        {"DIXMAANE", "n >= 3 (m = floor(n/3))", "(2, ..., 2)", any(3)},
        {"EDENSCH", "n >= 2", "(0, ..., 0)", any(2)},
        {"BDEXP", "n >= 3", "(1, ..., 1)", any(3)},
    };
    return reg;
}

inline std::string supported_objective_names()
{
    std::string s;
    for (const auto& r : objective_registry())
        s += (s.empty() ? "" : ", ") + r.name;
    return s;
}

inline Objective make_objective(const std::string& name, std::size_t n)
{
    const auto& reg = objective_registry();
    auto it = std::find_if(reg.begin(), reg.end(), [&](const ObjectiveInfo& r) { return r.name == name; });
    if (it == reg.end())
        throw std::invalid_argument("unknown objective '" + name + "'; supported: " + supported_objective_names());
    if (!it->dim_ok(n))
        throw std::invalid_argument("objective " + name + " requires " + it->valid_dims + ", got n = " +
                                    std::to_string(n));
    using namespace detail;
    if (name == "CUBE") return cube(n);
    if (name == "ExtWhiteHolst") return ext_white_holst(n);
    if (name == "LIARWHD") return liarwhd(n);
    if (name == "DQDRTIC") return dqdrtic(n);
    if (name == "TRIDIA") return tridia(n);
    if (name == "POWER") return power(n);
    if (name == "ENGVAL1") return engval1(n);
    if (name == "ExtWood") return ext_wood(n);
    if (name == "ExtHimmelblau") return ext_himmelblau(n);
    if (name == "GenRosenbrock") return gen_rosenbrock(n);
    if (name == "Dixon") return dixon(n);
    if (name == "DIXMAANB") return dixmaan("DIXMAANB", n, {1.0, 0.0625, 0.0625, 0.0625, 0, 0, 0, 1});
    if (name == "DIXMAANE") return dixmaan("DIXMAANE", n, {1.0, 0.0, 0.125, 0.125, 1, 0, 0, 1});
    if (name == "EDENSCH") return edensch(n);
    return bdexp(n);
}

/// f(x) = 1/2 x'Ax - b'x as a general objective.
inline Objective quadratic_objective(const QuadraticProblem& prob)
{
    Objective o;
    o.name = "Quadratic(" + prob.info().family + ")";
    o.dim = prob.n();
    o.value = [&prob](std::span<const double> x) { return prob.value(x); };
    o.gradient = [&prob](std::span<const double> x, std::span<double> g) {
        prob.apply(x, g);
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] -= prob.b()[i];
    };
    o.standard_start = Vector(prob.n(), 1.0);
    return o;
}

/// Worst relative central-difference error over `trials` points drawn around
/// the standard start (uniform offsets in [-0.5, 0.5]). Step per coordinate is
/// h = 1e-6 (1 + |x_i|); error is ||fd - g||_inf / max(1, ||g||_inf).
inline double validate_gradient(const Objective& obj, int trials, std::uint64_t seed = 7)
{
    Rng rng(derive_seed(seed, 0x9fad));
    double worst = 0.0;
    Vector x(obj.dim), g(obj.dim), fd(obj.dim);
    for (int t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < obj.dim; ++i)
            x[i] = obj.standard_start[i] + rng.uniform(-0.5, 0.5);
        obj.gradient(x, g);
        for (std::size_t i = 0; i < obj.dim; ++i) {
            const double xi = x[i];
            const double h = 1e-6 * (1.0 + std::abs(xi));
            x[i] = xi + h;
            const double fp = obj.value(x);
            x[i] = xi - h;
            const double fm = obj.value(x);
            x[i] = xi;
            fd[i] = (fp - fm) / (2.0 * h);
        }
        double err = 0.0;
        for (std::size_t i = 0; i < obj.dim; ++i)
            err = std::max(err, std::abs(fd[i] - g[i]));
        worst = std::max(worst, err / std::max(1.0, norm_inf(g)));
    }
    return worst;
}

} // namespace rbb
