#include "circlelab/primitive.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace circlelab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

PrimitiveMap PrimitiveMap::rotation(double theta) {
    PrimitiveMap p;
    p.kind = Kind::Rotation;
    p.angle = theta;
    return p;
}

PrimitiveMap PrimitiveMap::moebius(double a, double b, double c, double d,
                                   const Tolerances& tol) {
    const double det = a * d - b * c;
    if (!(det > 0.0))
        throw std::invalid_argument("Moebius matrix must have positive determinant");
    if (std::fabs(det - 1.0) > tol.det_tol)
        throw std::invalid_argument("Moebius matrix determinant differs from 1 beyond tolerance");
    PrimitiveMap p;
    p.kind = Kind::Moebius;
    p.m00 = a; p.m01 = b; p.m10 = c; p.m11 = d;
    p.e00 = a - 1.0; p.e01 = b; p.e10 = c; p.e11 = d - 1.0;
    return p;
}

PrimitiveMap PrimitiveMap::moebius_diag(double s, const Tolerances& tol) {
    if (!(s > 0.0)) throw std::invalid_argument("moebius_diag requires s > 0");
    return moebius(s, 0.0, 0.0, 1.0 / s, tol);
}

PrimitiveMap PrimitiveMap::trig(double offset, double amplitude) {
    if (!(std::fabs(amplitude) < 1.0))
        throw std::invalid_argument("TrigPerturb requires |amplitude| < 1 for a diffeomorphism");
    PrimitiveMap p;
    p.kind = Kind::TrigPerturb;
    p.offset = offset;
    p.amplitude = amplitude;
    return p;
}

// Moebius deviation. Directions v(x) = (cos pi x, sin pi x); the image
// direction is M v and the deviation is the angle between them divided by pi,
// taken in (-1, 1). Everything is assembled from the entries of E = M - I so
// near-identity matrices lose no precision.
double PrimitiveMap::dev_value(double x) const {
    switch (kind) {
    case Kind::Rotation:
        return angle;
    case Kind::TrigPerturb:
        return offset + (amplitude / kTwoPi) * std::sin(kTwoPi * x);
    case Kind::Moebius: {
        const double t = kPi * x;
        const double ct = std::cos(t), st = std::sin(t);
        const double cross = e10 * ct * ct + (e11 - e00) * ct * st - e01 * st * st;
        const double dot = 1.0 + e00 * ct * ct + (e01 + e10) * ct * st + e11 * st * st;
        return std::atan2(cross, dot) / kPi;
    }
    }
    return 0.0;
}

DevJet PrimitiveMap::dev_jet(double x) const {
    DevJet j;
    switch (kind) {
    case Kind::Rotation:
        j.p0 = angle;
        return j;
    case Kind::TrigPerturb: {
        const double t = kTwoPi * x;
        const double st = std::sin(t), ct = std::cos(t);
        j.p0 = offset + (amplitude / kTwoPi) * st;
        j.p1 = amplitude * ct;
        j.p2 = -kTwoPi * amplitude * st;
        j.p3 = -kTwoPi * kTwoPi * amplitude * ct;
        return j;
    }
    case Kind::Moebius: {
        const double t = kPi * x;
        const double ct = std::cos(t), st = std::sin(t);
        // u, v: perturbation of the image direction; primed: d/dt.
        const double u = e00 * ct + e01 * st;
        const double v = e10 * ct + e11 * st;
        const double up = -e00 * st + e01 * ct;
        const double vp = -e10 * st + e11 * ct;
        const double cross = ct * v - st * u;
        const double dot = 1.0 + ct * u + st * v;
        j.p0 = std::atan2(cross, dot) / kPi;
        // q = |M v|^2; f'(x) = 1/q(pi x).
        const double qm1 = 2.0 * (ct * u + st * v) + u * u + v * v;
        const double q = 1.0 + qm1;
        const double qp = 2.0 * (ct * up - st * u + st * vp + ct * v + u * up + v * vp);
        // q''/2 = (r'^2 + s'^2) - q, assembled cancellation-free.
        const double half_qpp = 2.0 * (-st * up + ct * vp) + up * up + vp * vp - qm1;
        j.p1 = -qm1 / q;
        j.p2 = -kPi * qp / (q * q);
        j.p3 = kPi * kPi * (-2.0 * half_qpp / (q * q) + 2.0 * qp * qp / (q * q * q));
        return j;
    }
    }
    return j;
}

// Solve psi + phi(x + psi) = 0 for the inverse deviation by safeguarded
// Newton in psi. The residual is monotone increasing in psi (derivative f').
double PrimitiveMap::inv_dev_value(double x, const Tolerances& tol) const {
    if (kind == Kind::Rotation) return -angle;

    double psi;
    if (kind == Kind::Moebius) {
        // Seed with the canonical lift of the inverse matrix, then fix the
        // integer branch so that f(x + psi) = x for *this* lift.
        PrimitiveMap inv;
        inv.kind = Kind::Moebius;
        inv.m00 = m11; inv.m01 = -m01; inv.m10 = -m10; inv.m11 = m00;
        inv.e00 = inv.m00 - 1.0; inv.e01 = inv.m01;
        inv.e10 = inv.m10; inv.e11 = inv.m11 - 1.0;
        psi = inv.dev_value(x);
        psi -= std::round(psi + dev_value(x + psi));
    } else {
        psi = -dev_value(x); // first-order inverse of the linearization
    }

    // Expand a bracket around the seed.
    auto residual = [&](double p) { return p + dev_value(x + p); };
    double lo = psi, hi = psi;
    double rlo = residual(lo), rhi = rlo;
    double step = std::fmax(1e-3, std::fabs(psi));
    for (int i = 0; i < 64 && rlo > 0.0; ++i) { lo -= step; rlo = residual(lo); step *= 2.0; }
    step = std::fmax(1e-3, std::fabs(psi));
    for (int i = 0; i < 64 && rhi < 0.0; ++i) { hi += step; rhi = residual(hi); step *= 2.0; }
    if (rlo > 0.0 || rhi < 0.0)
        throw std::runtime_error("primitive inverse: failed to bracket root at " +
                                 std::to_string(x) + " for " + describe());

    double r = residual(psi);
    for (int it = 0; it < tol.newton_max_iter; ++it) {
        if (std::fabs(r) <= tol.newton_tol) {
            // Polish: two unguarded Newton steps push the residual from the
            // stopping tolerance to ulp level, which downstream deviation
            // arithmetic depends on.
            for (int p = 0; p < 2; ++p) {
                const double d1 = 1.0 + dev_jet(x + psi).p1;
                const double next = psi - r / d1;
                const double rn = residual(next);
                if (std::fabs(rn) >= std::fabs(r)) break;
                psi = next;
                r = rn;
            }
            return psi;
        }
        if (r > 0.0) hi = psi; else lo = psi;
        const double d1 = 1.0 + dev_jet(x + psi).p1;
        double next = psi - r / d1;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        psi = next;
        r = residual(psi);
    }
    if (std::fabs(r) <= 1e3 * tol.newton_tol) return psi; // accept near-converged
    throw std::runtime_error("primitive inverse: Newton did not converge at " +
                             std::to_string(x) + " for " + describe());
}

DevJet PrimitiveMap::inv_dev_jet(double x, const Tolerances& tol) const {
    if (kind == Kind::Rotation) {
        DevJet j;
        j.p0 = -angle;
        return j;
    }
    const double psi = inv_dev_value(x, tol);
    DevJet fwd = dev_jet(x + psi);
    fwd.p0 = -psi; // exact: phi(f^{-1}(x)) = -psi by the defining equation
    return invert_dev(fwd);
}

std::string PrimitiveMap::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Rotation: os << "Rotation(" << angle << ")"; break;
    case Kind::Moebius:
        os << "Moebius([" << m00 << "," << m01 << ";" << m10 << "," << m11 << "])";
        break;
    case Kind::TrigPerturb:
        os << "TrigPerturb(offset=" << offset << ",amplitude=" << amplitude << ")";
        break;
    }
    return os.str();
}

} // namespace circlelab
