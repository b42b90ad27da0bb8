#pragma once

#include "rbb/linalg.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace rbb {

/// A smooth function with analytic gradient and a conventional start point.
/// Value and gradient callbacks must be pure so the object can be shared
/// between concurrent runs.
struct Objective {
    std::string name;
    std::size_t dim = 0;
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    Vector standard_start;
    /// Optional map back onto a constraint manifold, applied after every step.
    std::function<void(std::span<double>)> retract;

    Vector gradient_at(std::span<const double> x) const
    {
        Vector g(x.size());
        gradient(x, g);
        return g;
    }
};

} // namespace rbb
