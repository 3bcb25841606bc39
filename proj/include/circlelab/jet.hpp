// 3-jets of circle-map lifts and of their deviations from the identity.
//
// All differential bookkeeping is done on the deviation phi = f - id rather
// than on f itself: compositions of near-identity maps cancel catastrophically
// in lift coordinates, while the deviation recursion below keeps relative
// precision at arbitrarily small norms. Jet3 is the public face required by
// callers that want plain lift jets.
#pragma once

#include <cmath>

namespace circlelab {

// Jet of a lift f at a point: (f(x), f'(x), f''(x), f'''(x)). d1 > 0 for
// orientation-preserving maps.
struct Jet3 {
    double value = 0.0;
    double d1 = 1.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

// Jet of the deviation phi = f - id at a point: (phi, phi', phi'', phi''').
struct DevJet {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;

    static DevJet identity() { return {}; }
};

inline Jet3 to_jet(double x, const DevJet& d) {
    return Jet3{x + d.p0, 1.0 + d.p1, d.p2, d.p3};
}

// Deviation jet of f1 o f2 at x, given the deviation jet of f2 at x and the
// deviation jet of f1 at w = x + phi2(x). Order-3 chain rule written so that
// every term is a product of small factors; no identity parts are subtracted.
inline DevJet compose_dev(const DevJet& outer_at_w, const DevJet& inner_at_x) {
    const DevJet& a = outer_at_w;  // phi1 jets at w
    const DevJet& b = inner_at_x;  // phi2 jets at x
    const double g1 = 1.0 + b.p1;  // f2'
    DevJet r;
    r.p0 = b.p0 + a.p0;
    r.p1 = b.p1 + a.p1 * g1;
    r.p2 = b.p2 + a.p2 * g1 * g1 + a.p1 * b.p2;
    r.p3 = b.p3 + a.p3 * g1 * g1 * g1 + 3.0 * a.p2 * g1 * b.p2 + a.p1 * b.p3;
    return r;
}

// Deviation jet of f^{-1} at x given the deviation jet of f at y = f^{-1}(x).
// Uses D1 f^{-1} = 1/D1 f, D2 f^{-1} = -D2 f / (D1 f)^3 and the order-3
// analogue D3 f^{-1} = (3 (D2 f)^2 - D3 f D1 f) / (D1 f)^5, all evaluated at y.
inline DevJet invert_dev(const DevJet& at_preimage) {
    const DevJet& a = at_preimage;
    const double g1 = 1.0 + a.p1;
    const double inv = 1.0 / g1;
    DevJet r;
    r.p0 = -a.p0;
    r.p1 = -a.p1 * inv;  // 1/g1 - 1 = -p1/g1, exact
    r.p2 = -a.p2 * inv * inv * inv;
    r.p3 = (3.0 * a.p2 * a.p2 - a.p3 * g1) * inv * inv * inv * inv * inv;
    return r;
}

// Deviation jet of x -> s^{-1} f(s x) given the deviation jet of f at s*x.
inline DevJet rescale_dev(const DevJet& at_sx, double s) {
    DevJet r;
    r.p0 = at_sx.p0 / s;
    r.p1 = at_sx.p1;
    r.p2 = at_sx.p2 * s;
    r.p3 = at_sx.p3 * s * s;
    return r;
}

} // namespace circlelab
