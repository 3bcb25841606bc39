// Taylor deviation models: the deviation phi = f - id of a near-identity
// analytic map represented by its Taylor coefficients around 0, valid on
// [-a, a]. Commutators are assembled from difference series (never by
// subtracting compositions), so every coefficient keeps its own floating
// scale and renormalized cascade members can be followed to arbitrarily
// small norms. Point evaluation would lose them to roundoff around the
// fourth level.
#pragma once

#include <vector>

#include "circlelab/arc.hpp"
#include "circlelab/evaluate.hpp"
#include "circlelab/jet.hpp"
#include "circlelab/primitive.hpp"

namespace circlelab {

class DevPoly {
public:
    static constexpr int kDegree = 28;

    DevPoly() : c_(kDegree + 1, 0.0) {}
    explicit DevPoly(std::vector<double> coeffs);

    static DevPoly zero() { return DevPoly(); }
    // Exact Taylor deviation of a rotation or TrigPerturb primitive.
    // Moebius leaves are not supported by the polynomial engine.
    static DevPoly leaf(const PrimitiveMap& p);

    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int m) const { return c_[static_cast<std::size_t>(m)]; }

    double eval(double x) const;         // phi(x) by Horner
    DevJet jet(double x) const;          // (phi, phi', phi'', phi''')(x)
    DevPoly derivative() const;

    // x -> s^{-1} phi(s x): coeff_m *= s^{m-1}.
    DevPoly scale_conjugate(double s) const;

    DevPoly operator+(const DevPoly& o) const;
    DevPoly operator-(const DevPoly& o) const;
    DevPoly operator*(const DevPoly& o) const;  // truncated product
    DevPoly scaled_by(double f) const;

    double sup_on(double a, int grid = 64) const;  // sup |phi| on [-a, a]

private:
    std::vector<double> c_;
};

// phi o (id + u) - phi, i.e. the deviation-of-composition series
// sum_{j>=1} (phi^{(j)} o (id + u)) u^j / j! ... assembled as the Taylor
// series in the small inner perturbation u. Requires u small against the
// analyticity scale.
DevPoly taylor_shift(const DevPoly& phi, const DevPoly& u);

// Full composition deviation: deviation of (id+phi) o (id+u) = u + phi o (id+u).
DevPoly compose_dev_poly(const DevPoly& phi, const DevPoly& u);

// Inverse deviation: psi with psi = -phi o (id + psi) (series reversion by
// Picard iteration; converges fast since ||phi'|| < 1 on the domain).
DevPoly invert_dev_poly(const DevPoly& phi, int max_iter = 48);

// phi o (id + u + g) - phi o (id + u): the difference series in the gap g.
// This is the cancellation-free primitive the commutator is built from.
DevPoly diff_comp(const DevPoly& phi, const DevPoly& u, const DevPoly& g);

// Deviation of the commutator [P, Q] = P o Q o P^{-1} o Q^{-1} of two
// near-identity maps given by deviation polynomials, via the two-bracket
// identity  chi = [phiQ o Z - phiQ o Y] + [phiP o W - phiP o Z].
DevPoly commutator_dev_poly(const DevPoly& phiP, const DevPoly& phiQ);

// DevMap view of a Taylor model (valid on the arc it was built for).
class PolyDevMap final : public DevMap {
public:
    explicit PolyDevMap(const DevPoly& p) : poly_(&p) {}
    DevJet dev_jet(double x) const override { return poly_->jet(x); }
    double dev_value(double x) const override { return poly_->eval(x); }

private:
    const DevPoly* poly_;
};

} // namespace circlelab
