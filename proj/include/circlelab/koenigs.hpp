// Koenigs linearizing coordinate at an attracting hyperbolic fixed point:
// h(x) = lim lambda^{-n} (F^n(x) - p), the chart in which F becomes exact
// multiplication by lambda.
#pragma once

#include <vector>

#include "circlelab/fixed_points.hpp"

namespace circlelab {

class KoenigsChart {
public:
    // Builds the chart on `domain` (which must contain p and lie in the
    // basin, checked by iterating the endpoints). `depth` caps the number
    // of iterations of the Koenigs limit.
    KoenigsChart(GroupWord F, const IndexedAlphabet& alphabet, const FixedPointRecord& p,
                 const Arc& domain, int depth, int grid_size = 256,
                 const Tolerances& tol = default_tolerances());

    double lambda() const { return lambda_; }
    double fixed_point() const { return p_; }
    const Arc& domain() const { return domain_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& samples() const { return samples_; }

    // sup over the grid of |h(F(x)) - lambda h(x)|, h(F(x)) computed by
    // re-running the limit at F(x).
    double conjugacy_defect() const { return defect_; }
    int depth_used() const { return depth_used_; }

    // False when the successive-difference stopping rule failed to fire
    // within the depth cap somewhere on the grid (premature truncation).
    bool converged() const { return converged_; }

    // Chart value/jet at a point of the domain via the limit (not via
    // interpolation); throws if the stopping rule is not met within depth.
    double value(double x) const;
    Jet3 jet(double x) const;

    // Inverse chart by monotone Newton on value().
    double inverse(double u) const;

private:
    GroupWord F_;
    const IndexedAlphabet* alphabet_;
    Arc domain_;
    double p_ = 0.0;
    double lambda_ = 0.0;
    int depth_ = 0;
    Tolerances tol_;
    std::vector<double> grid_;
    std::vector<double> samples_;
    double defect_ = 0.0;
    int depth_used_ = 0;
    bool converged_ = true;
};

// Chart-conjugated view of a word: u -> h(g(h^{-1}(u))). The C0 deviation is
// assembled from the Taylor form h(y + phi) - h(y) so near-identity words keep
// relative precision; second and third derivatives use the plain chain rule.
class ChartConjugatedMap final : public DevMap {
public:
    ChartConjugatedMap(GroupWord word, const IndexedAlphabet& alphabet,
                       const KoenigsChart& chart,
                       const Tolerances& tol = default_tolerances())
        : word_(std::move(word)), alphabet_(&alphabet), chart_(&chart), tol_(tol) {}

    DevJet dev_jet(double u) const override;
    double dev_value(double u) const override;

private:
    GroupWord word_;
    const IndexedAlphabet* alphabet_;
    const KoenigsChart* chart_;
    Tolerances tol_;
};

} // namespace circlelab
