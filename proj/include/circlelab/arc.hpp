#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace circlelab {

// An interval on the circle, stored as a lift interval [lo, hi] with
// 0 < hi - lo < 1. Circle length is normalized to 1 throughout.
struct Arc {
    double lo = 0.0;
    double hi = 0.0;

    Arc() = default;
    Arc(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(hi > lo) || !(hi - lo < 1.0))
            throw std::invalid_argument("Arc requires 0 < hi - lo < 1");
    }

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }

    bool contains(double x) const { return x >= lo && x <= hi; }

    // Containment on the circle: does x (mod 1) land in this arc?
    bool contains_mod1(double x) const {
        double d = x - lo - std::floor(x - lo);
        return d <= length();
    }

    // Uniform grid with both endpoints, n+1 nodes. Power-of-two n gives
    // nested grids under doubling.
    std::vector<double> grid(int n) const {
        std::vector<double> g(static_cast<std::size_t>(n) + 1);
        const double h = length() / n;
        for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = lo + h * i;
        g.back() = hi;
        return g;
    }
};

inline double circle_dist(double x, double y) {
    double d = std::fabs(x - y);
    d -= std::floor(d);
    return d <= 0.5 ? d : 1.0 - d;
}

inline double wrap01(double x) { return x - std::floor(x); }

} // namespace circlelab
