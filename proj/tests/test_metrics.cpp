#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "circlelab/cascade.hpp"
#include "circlelab/metrics.hpp"
#include "oracles.hpp"

using namespace circlelab;
using namespace circlelab::testing;

TEST_CASE("cm_distance of a small rotation is the angle with zero slack") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.01)});
    const CmDistance d = cm_distance(ab.word(0), ab, Arc(-0.2, 0.2), 2, 256);
    CHECK(d.value == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(d.slack == doctest::Approx(0.0));
}

TEST_CASE("cm_distance of the identity word vanishes for all m") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.3)});
    for (int m = 0; m <= 3; ++m) {
        const CmDistance d = cm_distance(ab.id_word(), ab, Arc(-0.2, 0.2), m, 128);
        CHECK(d.value == 0.0);
        CHECK(d.slack == 0.0);
    }
}

TEST_CASE("commutator of two trig maps in the eps-ball is quadratically small") {
    const double eps = 0.01;
    std::mt19937_64 rng(42);
    const Arc I(-0.2, 0.2);
    // C measured over a small calibration sample, per the commutator lemma
    const double C = calibrate_commutator_constant(0.2, 0.01, eps, 50, 7);
    for (int t = 0; t < 10; ++t) {
        IndexedAlphabet ab(Alphabet{random_trig_in_ball(eps, rng), random_trig_in_ball(eps, rng)});
        const GroupWord c = commutator(ab.word(0), ab.word(1));
        const CmDistance n1 = cm_distance(ab.word(0), ab, I, 2, 128);
        const CmDistance n2 = cm_distance(ab.word(1), ab, I, 2, 128);
        const CmDistance nc = cm_distance(c, ab, Arc(-0.15, 0.15), 1, 128);
        CHECK(nc.value <= C * n1.value * n2.value);
    }
}

TEST_CASE("distortion of any rotation word vanishes") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.37), PrimitiveMap::rotation(0.11)});
    const GroupWord w = ab.word(0) * ab.word(1, -3) * ab.word(0, 2);
    const DistortionValue d = distortion(w, ab, Arc(0.1, 0.4), 128);
    CHECK(d.value == doctest::Approx(0.0));
}

TEST_CASE("distortion of a hyperbolic Moebius obeys the Lipschitz estimate") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(2.0)});
    const Arc U(0.1, 0.18);
    const DistortionValue d = distortion(ab.word(0), ab, U, 256);
    // C_Lip = grid max of |d2|/d1 over the arc
    double clip = 0.0;
    for (double x : U.grid(256)) {
        const Jet3 j = eval_jet(ab.word(0), ab, x);
        clip = std::max(clip, std::fabs(j.d2) / j.d1);
    }
    CHECK(d.value <= clip * U.length() + d.slack);
    CHECK(d.value > 0.0);
}

TEST_CASE("distortion is subadditive under composition") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(1.4), PrimitiveMap::trig(0.2, 0.35)});
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const GroupWord f = random_reduced_word(ab, 1 + static_cast<int>(rng() % 3), rng);
        const GroupWord g = random_reduced_word(ab, 1 + static_cast<int>(rng() % 3), rng);
        const double lo = unif(rng);
        const Arc U(lo, lo + 0.05 + 0.2 * unif(rng));
        const Arc gU = arc_image(g, ab, U);
        const DistortionValue lhs = distortion(f * g, ab, U, 256);
        const DistortionValue r1 = distortion(f, ab, gU, 256);
        const DistortionValue r2 = distortion(g, ab, U, 256);
        CHECK(lhs.value <= r1.value + r2.value + r1.slack + r2.slack + 2.0 * lhs.slack + 1e-12);
    }
}

TEST_CASE("distortion is antisymmetric under inversion") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(1.5), PrimitiveMap::trig(0.1, 0.3)});
    std::mt19937_64 rng(77);
    for (int t = 0; t < 20; ++t) {
        const GroupWord w = random_reduced_word(ab, 3, rng);
        const Arc U(0.05 + 0.01 * t, 0.25 + 0.01 * t);
        const Arc wU = arc_image(w, ab, U);
        const DistortionValue a = distortion(w, ab, U, 512);
        const DistortionValue b = distortion(w.inverse(), ab, wU, 512);
        // log-derivative antisymmetry: same spread up to grid placement
        CHECK(std::fabs(a.value - b.value) <= a.slack + b.slack + 1e-10);
    }
}

TEST_CASE("slack is monotone under grid doubling (nested grids)") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(1.7), PrimitiveMap::trig(0.05, 0.4)});
    const GroupWord w = ab.word(0) * ab.word(1);
    const Arc U(-0.2, 0.3);
    for (int g = 128; g <= 1024; g *= 2) {
        const CmDistance coarse = cm_distance(w, ab, U, 2, g);
        const CmDistance fine = cm_distance(w, ab, U, 2, 2 * g);
        CHECK(fine.value + fine.slack <= coarse.value + 2.0 * coarse.slack + 1e-13);
        CHECK(fine.value >= coarse.value - 1e-13);  // nested grid only adds points
    }
}

TEST_CASE("rotation number of a rotation is its angle") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(std::sqrt(2.0) - 1.0)});
    const RotationNumber r = rotation_number(ab.word(0), ab, 10000);
    CHECK(std::fabs(r.value - (std::sqrt(2.0) - 1.0)) <= r.error_bound);
}

TEST_CASE("rotation number of a map with fixed points is exactly zero") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(2.0)});
    const RotationNumber r = rotation_number(ab.word(0), ab, 1000);
    CHECK(r.value == 0.0);
    CHECK(r.exact_rational);
    CHECK(r.period == 1);
}

TEST_CASE("rotation number detects rational periodicity exactly") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(1.0 / 3.0), PrimitiveMap::rotation(1.0 / 6.0)});
    const RotationNumber r = rotation_number(ab.word(0) * ab.word(1), ab, 1000);
    CHECK(r.exact_rational);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.period == 2);
}

TEST_CASE("rotation number is nearly additive along powers") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::trig(0.137, 0.2)});
    const long n = 5000;
    const RotationNumber base = rotation_number(ab.word(0), ab, n, 1e-14);
    for (int k = 2; k <= 5; ++k) {
        const RotationNumber rk = rotation_number(ab.word(0).power(k), ab, n, 1e-14);
        double diff = std::fabs(rk.value - wrap01(k * base.value));
        diff = std::min(diff, 1.0 - diff);
        CHECK(diff <= 2.0 * k / static_cast<double>(n));
    }
}

TEST_CASE("contraction coefficient of rotations and the identity is 1/2") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.29)});
    const ContractionCoefficient c = contraction_coefficient(ab.word(0), ab, 256);
    CHECK(std::fabs(c.value - 0.5) <= c.slack);
    const ContractionCoefficient id = contraction_coefficient(ab.id_word(), ab, 256);
    CHECK(std::fabs(id.value - 0.5) <= id.slack);
}

TEST_CASE("contraction coefficient of a strong hyperbolic is small") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(4.0)});
    const ContractionCoefficient fine = contraction_coefficient(ab.word(0), ab, 4096);
    const ContractionCoefficient c = contraction_coefficient(ab.word(0), ab, 256);
    CHECK(c.value < 0.2);
    CHECK(std::fabs(c.value - fine.value) <= c.slack + fine.slack);
}

TEST_CASE("contraction coefficient is invariant under rotation conjugation") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(3.0), PrimitiveMap::rotation(0.3183)});
    const GroupWord w = ab.word(0);
    const GroupWord conj = w.conjugate(ab.word(1));
    const ContractionCoefficient a = contraction_coefficient(w, ab, 512);
    const ContractionCoefficient b = contraction_coefficient(conj, ab, 512);
    CHECK(std::fabs(a.value - b.value) <= 2.0 * (a.slack + b.slack));
}

TEST_CASE("cm_distance distinguishes chart escape from numeric failure") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.4)});
    const Arc domain(-0.25, 0.25);
    CHECK_THROWS_AS(cm_distance(ab.word(0), ab, Arc(-0.1, 0.1), 2, 128, domain),
                    EvaluabilityError);
    // evaluable case: a small rotation stays inside
    IndexedAlphabet small(Alphabet{PrimitiveMap::rotation(0.01)});
    const CmDistance d = cm_distance(small.word(0), small, Arc(-0.1, 0.1), 2, 128, domain);
    CHECK(d.value == doctest::Approx(0.01));
}
