#include "circlelab/polydev.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace circlelab {

namespace {
constexpr double kTwoPi = 6.28318530717958647692529;

double max_abs_coeff(const DevPoly& p) {
    double m = 0.0;
    for (double c : p.coeffs()) m = std::max(m, std::fabs(c));
    return m;
}
} // namespace

DevPoly::DevPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    c_.resize(kDegree + 1, 0.0);
}

DevPoly DevPoly::leaf(const PrimitiveMap& p) {
    DevPoly out;
    switch (p.kind) {
    case PrimitiveMap::Kind::Rotation:
        out.c_[0] = p.angle;
        return out;
    case PrimitiveMap::Kind::TrigPerturb: {
        // offset + (A/2pi) sin(2pi x)
        out.c_[0] = p.offset;
        double pw = p.amplitude;  // (A/2pi) * (2pi)^{2j+1} / (2j+1)! at j=0
        int sign = 1;
        for (int m = 1; m <= kDegree; m += 2) {
            out.c_[static_cast<std::size_t>(m)] = sign * pw;
            pw *= kTwoPi * kTwoPi / ((m + 1.0) * (m + 2.0));
            sign = -sign;
        }
        return out;
    }
    case PrimitiveMap::Kind::Moebius:
        throw std::invalid_argument(
            "DevPoly::leaf: Moebius primitives are not supported by the polynomial engine");
    }
    return out;
}

double DevPoly::eval(double x) const {
    double acc = 0.0;
    for (int m = kDegree; m >= 0; --m) acc = acc * x + c_[static_cast<std::size_t>(m)];
    return acc;
}

DevJet DevPoly::jet(double x) const {
    double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (int m = kDegree; m >= 0; --m) {
        p3 = p3 * x + 3.0 * p2;
        p2 = p2 * x + 2.0 * p1;
        p1 = p1 * x + p0;
        p0 = p0 * x + c_[static_cast<std::size_t>(m)];
    }
    DevJet j;
    j.p0 = p0;
    j.p1 = p1;
    j.p2 = 2.0 * p2;
    j.p3 = 6.0 * p3;
    return j;
}

DevPoly DevPoly::derivative() const {
    DevPoly out;
    for (int m = 1; m <= kDegree; ++m)
        out.c_[static_cast<std::size_t>(m - 1)] = m * c_[static_cast<std::size_t>(m)];
    return out;
}

DevPoly DevPoly::scale_conjugate(double s) const {
    DevPoly out;
    double pw = 1.0 / s;  // s^{m-1}
    for (int m = 0; m <= kDegree; ++m) {
        out.c_[static_cast<std::size_t>(m)] = c_[static_cast<std::size_t>(m)] * pw;
        pw *= s;
    }
    return out;
}

DevPoly DevPoly::operator+(const DevPoly& o) const {
    DevPoly out;
    for (int m = 0; m <= kDegree; ++m)
        out.c_[static_cast<std::size_t>(m)] =
            c_[static_cast<std::size_t>(m)] + o.c_[static_cast<std::size_t>(m)];
    return out;
}

DevPoly DevPoly::operator-(const DevPoly& o) const {
    DevPoly out;
    for (int m = 0; m <= kDegree; ++m)
        out.c_[static_cast<std::size_t>(m)] =
            c_[static_cast<std::size_t>(m)] - o.c_[static_cast<std::size_t>(m)];
    return out;
}

DevPoly DevPoly::operator*(const DevPoly& o) const {
    DevPoly out;
    for (int i = 0; i <= kDegree; ++i) {
        const double ci = c_[static_cast<std::size_t>(i)];
        if (ci == 0.0) continue;
        for (int j = 0; i + j <= kDegree; ++j)
            out.c_[static_cast<std::size_t>(i + j)] += ci * o.c_[static_cast<std::size_t>(j)];
    }
    return out;
}

DevPoly DevPoly::scaled_by(double f) const {
    DevPoly out;
    for (int m = 0; m <= kDegree; ++m)
        out.c_[static_cast<std::size_t>(m)] = c_[static_cast<std::size_t>(m)] * f;
    return out;
}

double DevPoly::sup_on(double a, int grid) const {
    double s = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double x = -a + 2.0 * a * i / grid;
        s = std::max(s, std::fabs(eval(x)));
    }
    return s;
}

DevPoly taylor_shift(const DevPoly& phi, const DevPoly& u) {
    // sum_{j>=1} phi^{(j)} u^j / j!, all polys in x.
    DevPoly acc;
    DevPoly deriv = phi;
    DevPoly upow = u;
    double fact = 1.0;
    const double ref = std::max(max_abs_coeff(phi), 1e-300);
    for (int j = 1; j <= 2 * DevPoly::kDegree; ++j) {
        deriv = deriv.derivative();
        fact *= j;
        const DevPoly scaled = (deriv * upow).scaled_by(1.0 / fact);
        acc = acc + scaled;
        if (max_abs_coeff(scaled) < 1e-40 * ref) break;
        upow = upow * u;
    }
    return acc;
}

DevPoly compose_dev_poly(const DevPoly& phi, const DevPoly& u) {
    return u + phi + taylor_shift(phi, u);
}

DevPoly invert_dev_poly(const DevPoly& phi, int max_iter) {
    DevPoly psi = DevPoly::zero() - phi;
    for (int it = 0; it < max_iter; ++it) {
        // psi_next = -(phi + taylor_shift(phi, psi))
        const DevPoly next = DevPoly::zero() - (phi + taylor_shift(phi, psi));
        const DevPoly delta = next - psi;
        psi = next;
        if (max_abs_coeff(delta) < 1e-30 * std::max(max_abs_coeff(psi), 1e-280)) break;
    }
    return psi;
}

DevPoly diff_comp(const DevPoly& phi, const DevPoly& u, const DevPoly& g) {
    // sum_{j>=1} (phi^{(j)} o (id+u)) g^j / j!
    DevPoly acc;
    DevPoly deriv = phi;
    DevPoly gpow = g;
    double fact = 1.0;
    double ref = 0.0;
    for (int j = 1; j <= DevPoly::kDegree; ++j) {
        deriv = deriv.derivative();
        fact *= j;
        const DevPoly shifted = deriv + taylor_shift(deriv, u);
        const DevPoly scaled = (shifted * gpow).scaled_by(1.0 / fact);
        acc = acc + scaled;
        const double mag = max_abs_coeff(scaled);
        ref = std::max(ref, mag);
        if (mag < 1e-40 * std::max(ref, 1e-300)) break;
        gpow = gpow * g;
    }
    return acc;
}

DevPoly commutator_dev_poly(const DevPoly& phiP, const DevPoly& phiQ) {
    // points: x -> Y = Q^{-1} x -> Z = P^{-1} Y -> W = Q Z -> P W
    const DevPoly psiQ = invert_dev_poly(phiQ);
    const DevPoly psiP = invert_dev_poly(phiP);

    // Y = id + psiQ; Z = Y + gap1 with gap1 = psiP o Y
    const DevPoly gap1 = psiP + taylor_shift(psiP, psiQ);
    const DevPoly bracket1 = diff_comp(phiQ, psiQ, gap1);  // phiQ o Z - phiQ o Y

    const DevPoly zdev = psiQ + gap1;
    // W = Z + gap2 with gap2 = phiQ o Z
    const DevPoly gap2 = phiQ + taylor_shift(phiQ, zdev);
    const DevPoly bracket2 = diff_comp(phiP, zdev, gap2);  // phiP o W - phiP o Z

    return bracket1 + bracket2;
}

} // namespace circlelab
