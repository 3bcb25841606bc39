// Primitive analytic circle diffeomorphisms: the generator alphabet.
//
// Every primitive exposes its lift deviation phi(x) = f(x) - x and the 3-jet
// of phi, both evaluated without subtracting large quantities, so words built
// from near-identity primitives keep relative precision at tiny norms.
#pragma once

#include <string>
#include <vector>

#include "circlelab/jet.hpp"
#include "circlelab/tolerances.hpp"

namespace circlelab {

struct PrimitiveMap {
    enum class Kind { Rotation, Moebius, TrigPerturb };

    Kind kind = Kind::Rotation;

    // Rotation: lift x -> x + angle.
    double angle = 0.0;

    // Moebius: unit-determinant matrix acting projectively on S^1 ~ RP^1
    // through directions (cos pi x, sin pi x). e__ = m__ - I is stored to
    // keep near-identity evaluations cancellation-free.
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
    double e00 = 0.0, e01 = 0.0, e10 = 0.0, e11 = 0.0;

    // TrigPerturb: lift x -> x + offset + (amplitude / 2 pi) sin(2 pi x).
    // Orientation preservation forces |amplitude| < 1.
    double offset = 0.0, amplitude = 0.0;

    static PrimitiveMap rotation(double theta);
    static PrimitiveMap moebius(double a, double b, double c, double d,
                                const Tolerances& tol = default_tolerances());
    // diag(s, 1/s): attracting fixed point at 0 with multiplier 1/s^2 (s>1),
    // repelling at 1/2 with multiplier s^2.
    static PrimitiveMap moebius_diag(double s,
                                     const Tolerances& tol = default_tolerances());
    static PrimitiveMap trig(double offset, double amplitude);

    // Deviation phi(x) = f(x) - x of the lift and its jets.
    double dev_value(double x) const;
    DevJet dev_jet(double x) const;

    // Deviation of the functional inverse: psi(x) = f^{-1}(x) - x, solved by
    // bracketed Newton seeded by the inverse of the linearization.
    double inv_dev_value(double x, const Tolerances& tol = default_tolerances()) const;
    DevJet inv_dev_jet(double x, const Tolerances& tol = default_tolerances()) const;

    std::string describe() const;
};

using Alphabet = std::vector<PrimitiveMap>;

} // namespace circlelab
