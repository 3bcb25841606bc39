#include "circlelab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace circlelab {

CmDistance cm_distance(const DevMap& map, const Arc& arc, int m, int grid_size) {
    if (m < 0 || m > 3) throw std::invalid_argument("cm_distance: m must lie in {0,1,2,3}");
    if (grid_size < 128) throw std::invalid_argument("cm_distance: grid_size >= 128 required");

    const std::vector<double> grid = arc.grid(grid_size);
    const double h = arc.length() / grid_size;

    std::vector<DevJet> jets(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) jets[i] = map.dev_jet(grid[i]);

    auto order_term = [&](const DevJet& j, int i) {
        switch (i) {
        case 0: return std::fabs(j.p0);
        case 1: return std::fabs(j.p1);
        case 2: return std::fabs(j.p2);
        default: return std::fabs(j.p3);
        }
    };

    CmDistance out;
    out.m = m;
    out.arc = arc;
    out.grid_size = grid_size;
    for (const DevJet& j : jets) {
        double s = 0.0;
        for (int i = 0; i <= m; ++i) s += order_term(j, i);
        out.value = std::max(out.value, s);
    }

    // Slack: Lipschitz bound on the summed deviation orders. For orders < 3
    // the next derivative is available from the jet; for the top order use
    // the grid difference quotient of p3 (or p-m when m == 3).
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < jets.size(); ++i) {
        double l = 0.0;
        for (int k = 0; k <= m; ++k) {
            if (k < 3) {
                l += std::fabs(order_term(jets[i], k + 1));
            } else {
                l += std::fabs(order_term(jets[i + 1], 3) - order_term(jets[i], 3)) / h;
            }
        }
        lip = std::max(lip, l);
    }
    out.slack = default_tolerances().slack_safety * lip * h / 2.0;
    return out;
}

CmDistance cm_distance(const GroupWord& word, const IndexedAlphabet& alphabet,
                       const Arc& arc, int m, int grid_size,
                       const std::optional<Arc>& domain, const Tolerances& tol) {
    if (domain) trace_through(word, alphabet, arc, domain, tol);
    WordMap map(word, alphabet, tol);
    return cm_distance(map, arc, m, grid_size);
}

DistortionValue distortion(const DevMap& map, const Arc& arc, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("distortion: grid too small");
    const std::vector<double> grid = arc.grid(grid_size);
    const double h = arc.length() / grid_size;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double max_ratio = 0.0;  // Lipschitz constant of log f' = |f''|/f'
    for (double x : grid) {
        const DevJet j = map.dev_jet(x);
        const double d1 = 1.0 + j.p1;
        if (!(d1 > 0.0)) throw std::runtime_error("distortion: nonpositive derivative");
        const double ld = std::log1p(j.p1);
        lo = std::min(lo, ld);
        hi = std::max(hi, ld);
        max_ratio = std::max(max_ratio, std::fabs(j.p2) / d1);
    }
    DistortionValue out;
    out.value = hi - lo;
    out.slack = default_tolerances().slack_safety * max_ratio * h;
    out.arc = arc;
    out.grid_size = grid_size;
    return out;
}

DistortionValue distortion(const GroupWord& word, const IndexedAlphabet& alphabet,
                           const Arc& arc, int grid_size,
                           const std::optional<Arc>& domain, const Tolerances& tol) {
    if (domain) trace_through(word, alphabet, arc, domain, tol);
    WordMap map(word, alphabet, tol);
    return distortion(map, arc, grid_size);
}

RotationNumber rotation_number(const GroupWord& word, const IndexedAlphabet& alphabet,
                               long iterations, double periodic_tol, double x0,
                               const Tolerances& tol) {
    if (iterations < 100) throw std::invalid_argument("rotation_number: iterations >= 100 required");
    RotationNumber out;
    double x = x0;
    for (long n = 1; n <= iterations; ++n) {
        x += word_dev_value(word, alphabet, x, tol);
        const double total = x - x0;
        const double nearest = std::round(total);
        if (std::fabs(total - nearest) < periodic_tol) {
            // orbit returned to x0 after n steps with integer displacement p
            out.value = wrap01(nearest / static_cast<double>(n));
            out.exact_rational = true;
            out.period = n;
            out.error_bound = 0.0;
            return out;
        }
    }
    out.value = wrap01((x - x0) / static_cast<double>(iterations));
    out.error_bound = 1.0 / static_cast<double>(iterations);
    return out;
}

ContractionCoefficient contraction_coefficient(const GroupWord& word,
                                               const IndexedAlphabet& alphabet,
                                               int grid_size, const Tolerances& tol) {
    if (grid_size < 256) throw std::invalid_argument("contraction_coefficient: grid_size >= 256 required");
    const int n = grid_size;
    std::vector<double> val(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double fx = x + word_dev_value(word, alphabet, x, tol);
        val[static_cast<std::size_t>(i)] = fx;
        val[static_cast<std::size_t>(i + n)] = fx + 1.0;  // lift equivariance
    }

    ContractionCoefficient out;
    out.value = 1.0;
    for (int j = 1; j < n; ++j) {  // arc length j/n
        const double len = static_cast<double>(j) / n;
        double best_img = 0.0;
        int best_i = 0;
        for (int i = 0; i < n; ++i) {
            const double img = val[static_cast<std::size_t>(i + j)] - val[static_cast<std::size_t>(i)];
            if (img > best_img) { best_img = img; best_i = i; }
        }
        const double c = std::max(len, 1.0 - best_img);
        if (c < out.value) {
            out.value = c;
            out.arc_length = len;
            out.arc_pos = static_cast<double>(best_i) / n;
        }
    }
    out.value = std::min(out.value, 0.5);  // the infimum never exceeds 1/2
    out.slack = 2.0 / n;
    return out;
}

} // namespace circlelab
