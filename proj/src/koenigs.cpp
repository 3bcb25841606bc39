#include "circlelab/koenigs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace circlelab {

namespace {

struct LimitResult {
    double h = 0.0, h1 = 0.0, h2 = 0.0, h3 = 0.0;
    int depth = 0;
    bool converged = false;
};

// Runs the Koenigs limit lambda^{-n} (F^n(x) - p) with the
// successive-difference stopping rule applied to the value.
LimitResult koenigs_limit(const GroupWord& F, const IndexedAlphabet& alphabet, double x,
                          double p, double lambda, int depth_cap, double stop,
                          const Tolerances& tol) {
    DevJet cum = DevJet::identity();
    double scale = 1.0;  // lambda^{-n}
    LimitResult res;
    double prev = (x - p);
    for (int n = 1; n <= depth_cap; ++n) {
        const DevJet step = word_dev_jet(F, alphabet, x + cum.p0, tol);
        cum = compose_dev(step, cum);
        scale /= lambda;
        const double cur = scale * (x + cum.p0 - p);
        res.h = cur;
        res.h1 = scale * (1.0 + cum.p1);
        res.h2 = scale * cum.p2;
        res.h3 = scale * cum.p3;
        res.depth = n;
        if (std::fabs(cur - prev) < stop) {
            res.converged = true;
            break;
        }
        prev = cur;
    }
    return res;
}

} // namespace

KoenigsChart::KoenigsChart(GroupWord F, const IndexedAlphabet& alphabet,
                           const FixedPointRecord& p, const Arc& domain, int depth,
                           int grid_size, const Tolerances& tol)
    : F_(std::move(F)), alphabet_(&alphabet), domain_(domain), p_(p.location),
      lambda_(p.multiplier), depth_(depth), tol_(tol) {
    if (!(lambda_ > 0.0 && lambda_ < 1.0))
        throw std::invalid_argument("KoenigsChart: multiplier must lie in (0,1)");
    // The fixed point is stored mod 1; move it into the domain's lift window.
    while (p_ < domain_.lo) p_ += 1.0;
    while (p_ > domain_.hi) p_ -= 1.0;
    if (!domain_.contains(p_))
        throw std::invalid_argument("KoenigsChart: domain must contain the fixed point");

    // Basin check: endpoint orbits must approach p. Uses its own iteration
    // budget so that a shallow chart depth does not mask basin membership.
    const int basin_iters = std::max(depth_, 32);
    for (double e : {domain_.lo, domain_.hi}) {
        double y = e;
        const double d0 = std::fabs(y - p_);
        for (int n = 0; n < basin_iters; ++n) y += word_dev_value(F_, *alphabet_, y, tol_);
        if (std::fabs(y - p_) > 0.5 * d0 + tol_.root_tol)
            throw EvaluabilityError("KoenigsChart: domain escapes basin of the fixed point");
    }

    grid_ = domain_.grid(grid_size);
    samples_.resize(grid_.size());
    defect_ = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const LimitResult r = koenigs_limit(F_, *alphabet_, grid_[i], p_, lambda_, depth_,
                                            tol_.koenigs_stop, tol_);
        samples_[i] = r.h;
        depth_used_ = std::max(depth_used_, r.depth);
        converged_ = converged_ && r.converged;
        const double fx = grid_[i] + word_dev_value(F_, *alphabet_, grid_[i], tol_);
        const LimitResult rf = koenigs_limit(F_, *alphabet_, fx, p_, lambda_, depth_,
                                             tol_.koenigs_stop, tol_);
        defect_ = std::max(defect_, std::fabs(rf.h - lambda_ * r.h));
    }
}

double KoenigsChart::value(double x) const {
    return koenigs_limit(F_, *alphabet_, x, p_, lambda_, depth_, tol_.koenigs_stop, tol_).h;
}

Jet3 KoenigsChart::jet(double x) const {
    const LimitResult r =
        koenigs_limit(F_, *alphabet_, x, p_, lambda_, depth_, tol_.koenigs_stop, tol_);
    return Jet3{r.h, r.h1, r.h2, r.h3};
}

double KoenigsChart::inverse(double u) const {
    double lo = domain_.lo, hi = domain_.hi;
    double x = p_;
    for (int it = 0; it < tol_.newton_max_iter; ++it) {
        const Jet3 j = jet(x);
        const double r = j.value - u;
        if (std::fabs(r) <= tol_.newton_tol * std::fmax(1.0, std::fabs(u))) return x;
        if (r > 0.0) hi = x; else lo = x;
        double next = x - r / j.d1;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

namespace {
// h(y + phi) - h(y). Tiny phi takes the Taylor form (the direct difference
// would cancel catastrophically); larger phi takes the direct difference
// (the third-order Taylor remainder would dominate).
double chart_increment(const KoenigsChart& chart, double y, double u_exact, double phi) {
    if (std::fabs(phi) > 1e-4) return chart.value(y + phi) - u_exact;
    const Jet3 h = chart.jet(y);
    return h.d1 * phi + 0.5 * h.d2 * phi * phi + (1.0 / 6.0) * h.d3 * phi * phi * phi;
}
} // namespace

double ChartConjugatedMap::dev_value(double u) const {
    const double y = chart_->inverse(u);
    const DevJet g = word_dev_jet(word_, *alphabet_, y, tol_);
    return chart_increment(*chart_, y, u, g.p0);
}

DevJet ChartConjugatedMap::dev_jet(double u) const {
    const double y = chart_->inverse(u);
    const DevJet g = word_dev_jet(word_, *alphabet_, y, tol_);
    const Jet3 hy = chart_->jet(y);
    const Jet3 hg = chart_->jet(y + g.p0);
    const double phi = g.p0;

    DevJet r;
    r.p0 = chart_increment(*chart_, y, u, phi);

    // G'(u) = h'(g(y)) g'(y) / h'(y); deviation assembled without cancelling
    // the unit parts: numerator = [h'(g y) - h'(y)] + h'(g y) (g'-1).
    const double dh = hg.d1 - hy.d1;
    r.p1 = (dh + hg.d1 * g.p1) / hy.d1;

    // Plain chain rule for D2, D3 of h o g o h^{-1} (absolute precision is
    // enough at these orders).
    const double g1 = 1.0 + g.p1;
    // jets of w = h o g at y
    const double w1 = hg.d1 * g1;
    const double w2 = hg.d2 * g1 * g1 + hg.d1 * g.p2;
    const double w3 = hg.d3 * g1 * g1 * g1 + 3.0 * hg.d2 * g1 * g.p2 + hg.d1 * g.p3;
    // jets of h^{-1} at u: from h jets at y
    const double i1 = 1.0 / hy.d1;
    const double i2 = -hy.d2 * i1 * i1 * i1;
    const double i3 = (3.0 * hy.d2 * hy.d2 - hy.d3 * hy.d1) * i1 * i1 * i1 * i1 * i1;
    r.p2 = w2 * i1 * i1 + w1 * i2;
    r.p3 = w3 * i1 * i1 * i1 + 3.0 * w2 * i1 * i2 + w1 * i3;
    return r;
}

} // namespace circlelab
