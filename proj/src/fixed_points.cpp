#include "circlelab/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace circlelab {

namespace {

FixedPointRecord classify(double x, double mult, const Tolerances& tol) {
    FixedPointRecord r;
    r.location = wrap01(x);
    r.multiplier = mult;
    if (std::fabs(mult - 1.0) <= tol.parabolic_margin)
        r.classification = FixedPointRecord::Type::Parabolic;
    else if (mult < 1.0)
        r.classification = FixedPointRecord::Type::AttractingHyperbolic;
    else
        r.classification = FixedPointRecord::Type::RepellingHyperbolic;
    return r;
}

} // namespace

std::vector<FixedPointRecord> find_fixed_points(const GroupWord& word,
                                                const IndexedAlphabet& alphabet,
                                                int grid_density,
                                                const Tolerances& tol) {
    if (grid_density < 64) throw std::invalid_argument("find_fixed_points: grid_density >= 64 required");
    if (word.is_identity()) throw std::invalid_argument("identically fixed");

    const int n = grid_density;
    const double h = 1.0 / n;
    std::vector<double> dev(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        dev[static_cast<std::size_t>(i)] = word_dev_value(word, alphabet, i * h, tol);

    // The word may be a nontrivial deck translation (rotation-like): then
    // dev never crosses an integer and there are no fixed points at all.
    std::vector<FixedPointRecord> out;
    auto refine = [&](double lo, double hi, double flo, double fhi) {
        // safeguarded Newton on dev, bracket [lo,hi] with sign change
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < tol.newton_max_iter; ++it) {
            const DevJet j = word_dev_jet(word, alphabet, x, tol);
            if (std::fabs(j.p0) <= tol.root_tol)
                return std::pair<double, double>{x, 1.0 + j.p1};
            if ((j.p0 > 0) == (fhi > 0)) hi = x; else lo = x;
            double next = x - j.p0 / (1.0 + j.p1);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            x = next;
        }
        const DevJet j = word_dev_jet(word, alphabet, x, tol);
        if (std::fabs(j.p0) <= 1e3 * tol.root_tol)
            return std::pair<double, double>{x, 1.0 + j.p1};
        throw std::runtime_error("find_fixed_points: refinement did not converge");
        (void)flo;
    };

    std::vector<bool> cell_has_root(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        const double a = dev[static_cast<std::size_t>(i)];
        const double b = dev[static_cast<std::size_t>(i) + 1];
        if (a == 0.0) {
            const DevJet j = word_dev_jet(word, alphabet, i * h, tol);
            out.push_back(classify(i * h, 1.0 + j.p1, tol));
            cell_has_root[static_cast<std::size_t>(i)] = true;
        } else if ((a < 0.0) != (b < 0.0)) {
            auto [x, mult] = refine(i * h, (i + 1) * h, a, b);
            out.push_back(classify(x, mult, tol));
            cell_has_root[static_cast<std::size_t>(i)] = true;
        }
    }

    // Tangential contacts: |dev| below tolerance with no sign change nearby.
    for (int i = 0; i < n; ++i) {
        if (cell_has_root[static_cast<std::size_t>(i)]) continue;
        if (std::fabs(dev[static_cast<std::size_t>(i)]) < tol.root_tol) {
            const bool neighbor = (i > 0 && cell_has_root[static_cast<std::size_t>(i) - 1]) ||
                                  (i + 1 < n && cell_has_root[static_cast<std::size_t>(i) + 1]);
            if (!neighbor) {
                const DevJet j = word_dev_jet(word, alphabet, i * h, tol);
                FixedPointRecord r = classify(i * h, 1.0 + j.p1, tol);
                r.classification = FixedPointRecord::Type::Parabolic;
                out.push_back(r);
            }
        }
    }

    std::sort(out.begin(), out.end(),
              [](const FixedPointRecord& a, const FixedPointRecord& b) {
                  return a.location < b.location;
              });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (circle_dist(out[i].location, out[i - 1].location) < h)
            throw std::runtime_error("grid too coarse: adjacent roots closer than grid step");
    }
    return out;
}

} // namespace circlelab
