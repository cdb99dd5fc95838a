#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace oscint {

// Points live in R^n x R^n with n <= 2; unused trailing coordinates are zero.
using Coord = std::array<double, 2>;
using MultiIndex = std::array<int, 2>;

struct Point {
    Coord x{0.0, 0.0};
    Coord theta{0.0, 0.0};
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }
    double midpoint() const { return 0.5 * (lo + hi); }
};

// Axis-aligned box for (x, theta); only the first n entries of each side are used.
struct Box {
    std::array<Interval, 2> x{};
    std::array<Interval, 2> theta{};

    bool contains(const Point& p, int n) const {
        for (int i = 0; i < n; ++i) {
            if (!x[i].contains(p.x[i]) || !theta[i].contains(p.theta[i])) return false;
        }
        return true;
    }
};

enum class Side { right, left };

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IterationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfiniteTypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace oscint
