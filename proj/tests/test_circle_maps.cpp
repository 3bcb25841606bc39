#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "circlelab/evaluate.hpp"
#include "circlelab/fixed_points.hpp"
#include "circlelab/alphabet_io.hpp"
#include "circlelab/koenigs.hpp"
#include "oracles.hpp"

using namespace circlelab;
using namespace circlelab::testing;

namespace {

IndexedAlphabet mixed_alphabet() {
    // Mild enough that a 12-letter word keeps derivative growth within what
    // finite differences can certify.
    return IndexedAlphabet(Alphabet{
        PrimitiveMap::rotation(0.25),
        PrimitiveMap::moebius_diag(1.2),
        PrimitiveMap::trig(0.1, 0.2),
    });
}

} // namespace

TEST_CASE("rotation jet is an isometry") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.25)});
    const Jet3 j = eval_jet(ab.word(0), ab, 0.1);
    CHECK(j.value == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(j.d1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(j.d2 == 0.0);
    CHECK(j.d3 == 0.0);
}

TEST_CASE("empty word is the identity jet") {
    IndexedAlphabet ab = mixed_alphabet();
    const Jet3 j = eval_jet(ab.id_word(), ab, 0.4321);
    CHECK(j.value == 0.4321);
    CHECK(j.d1 == 1.0);
    CHECK(j.d2 == 0.0);
    CHECK(j.d3 == 0.0);
}

TEST_CASE("trig jet agrees with Richardson differences") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::trig(0.0, 0.3)});
    const GroupWord w = ab.word(0);
    auto f = [&](double x) { return x + word_dev_value(w, ab, x); };
    const Jet3 j = eval_jet(w, ab, 0.2);
    // 1e-5 step for d1/d2; d3 needs its balanced step (roundoff eps/h^3
    // makes 1e-5 hopeless for third differences in doubles).
    const FdJet fd = fd_jet(f, 0.2, 1e-5, 1e-5, 2.5e-3);
    CHECK(j.d1 == doctest::Approx(fd.d1).epsilon(1e-6));
    CHECK(j.d2 == doctest::Approx(fd.d2).epsilon(1e-6));
    CHECK(j.d3 == doctest::Approx(fd.d3).epsilon(1e-4));
}

TEST_CASE("chain rule matches finite differences on random words") {
    IndexedAlphabet ab = mixed_alphabet();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int len = 1 + static_cast<int>(rng() % 12);
        const GroupWord w = random_reduced_word(ab, len, rng);
        const double x = unif(rng);
        auto f = [&](double y) { return y + word_dev_value(w, ab, y); };
        const Jet3 j = eval_jet(w, ab, x);
        const FdJet fd = fd_jet(f, x);
        REQUIRE(j.d1 > 0.0);
        CHECK(std::fabs(j.d1 - fd.d1) / std::fabs(fd.d1) < 1e-6);
        CHECK(std::fabs(j.d2 - fd.d2) / std::max(1.0, std::fabs(fd.d2)) < 1e-6);
        CHECK(std::fabs(j.d3 - fd.d3) / std::max(1.0, std::fabs(fd.d3)) < 1e-4);
    }
}

TEST_CASE("group laws: w * w^{-1} is the identity pointwise") {
    IndexedAlphabet ab = mixed_alphabet();
    std::mt19937_64 rng(999);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const GroupWord w = random_reduced_word(ab, 6, rng);
        // un-reduced functional check: evaluate w then w^{-1} numerically
        const double x = unif(rng);
        const double mid = x + word_dev_value(w, ab, x);
        const double back = mid + word_dev_value(w.inverse(), ab, mid);
        CHECK(std::fabs(back - x) < 1e-10);
        // and symbolically the product reduces to the identity
        CHECK((w * w.inverse()).is_identity());
    }
}

TEST_CASE("jets of a product compose by the chain rule") {
    IndexedAlphabet ab = mixed_alphabet();
    std::mt19937_64 rng(321);
    for (int trial = 0; trial < 10; ++trial) {
        const GroupWord w1 = random_reduced_word(ab, 4, rng);
        const GroupWord w2 = random_reduced_word(ab, 4, rng);
        const GroupWord prod = w1 * w2;
        const double x = 0.05 + 0.9 * static_cast<double>(trial) / 10.0;
        const DevJet inner = word_dev_jet(w2, ab, x);
        const DevJet outer = word_dev_jet(w1, ab, x + inner.p0);
        const DevJet manual = compose_dev(outer, inner);
        const DevJet direct = word_dev_jet(prod, ab, x);
        CHECK(std::fabs(manual.p0 - direct.p0) < 1e-12);
        CHECK(std::fabs(manual.p1 - direct.p1) < 1e-10);
        CHECK(std::fabs(manual.p2 - direct.p2) < 1e-8);
    }
}

TEST_CASE("lift equivariance f(x+1) = f(x) + 1") {
    IndexedAlphabet ab = mixed_alphabet();
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const GroupWord w = random_reduced_word(ab, 5, rng);
        const double x = unif(rng);
        const double a = x + word_dev_value(w, ab, x);
        const double b = (x + 1.0) + word_dev_value(w, ab, x + 1.0);
        CHECK(std::fabs(b - a - 1.0) < 1e-12);
    }
}

TEST_CASE("orientation: d1 > 0 everywhere on random words") {
    IndexedAlphabet ab = mixed_alphabet();
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const GroupWord w = random_reduced_word(ab, 8, rng);
        for (int i = 0; i < 20; ++i) {
            const Jet3 j = eval_jet(w, ab, i / 20.0);
            CHECK(j.d1 > 0.0);
        }
    }
}

TEST_CASE("commutator of an element with itself is the identity") {
    IndexedAlphabet ab = mixed_alphabet();
    std::mt19937_64 rng(1);
    const GroupWord w = random_reduced_word(ab, 5, rng);
    CHECK(commutator(w, w).is_identity());
}

TEST_CASE("rotations commute: commutator evaluates to the identity") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.13), PrimitiveMap::rotation(0.456)});
    const GroupWord c = commutator(ab.word(0), ab.word(1));
    // not symbolically trivial (different letters), but functionally trivial
    CHECK_FALSE(c.is_identity());
    for (int i = 0; i < 20; ++i) {
        const Jet3 j = eval_jet(c, ab, i / 20.0);
        CHECK(std::fabs(j.value - i / 20.0) < 1e-12);
        CHECK(std::fabs(j.d1 - 1.0) < 1e-12);
        CHECK(std::fabs(j.d2) < 1e-12);
    }
}

TEST_CASE("commutator of Moebius and trig matches explicit composition") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(2.0), PrimitiveMap::trig(0.0, 0.4)});
    const GroupWord f = ab.word(0), g = ab.word(1);
    const GroupWord c = commutator(f, g);
    CHECK(c.length() == 4);
    const GroupWord explicit_word = f * g * f.inverse() * g.inverse();
    for (int i = 0; i < 10; ++i) {
        const double x = i / 10.0;
        const Jet3 a = eval_jet(c, ab, x);
        const Jet3 b = eval_jet(explicit_word, ab, x);
        CHECK(a.value == b.value);
        CHECK(a.d1 == b.d1);
        CHECK(a.d2 == b.d2);
    }
}

TEST_CASE("word reduction merges adjacent letters and drops zeros") {
    IndexedAlphabet ab = mixed_alphabet();
    GroupWord w = ab.word(0, 2) * ab.word(0, -2);
    CHECK(w.is_identity());
    GroupWord v = ab.word(1, 1) * ab.word(1, 2);
    CHECK(v.letters().size() == 1);
    CHECK(v.letters()[0].exp == 3);
    CHECK(v.length() == 3);
}

TEST_CASE("find_fixed_points: nontrivial rotation has none") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.3)});
    CHECK(find_fixed_points(ab.word(0), ab, 128).empty());
}

TEST_CASE("find_fixed_points: Moebius diag multipliers are 1/s^2 and s^2") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(2.0)});
    const auto fps = find_fixed_points(ab.word(0), ab, 256);
    REQUIRE(fps.size() == 2);
    CHECK(fps[0].location == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fps[0].multiplier == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(fps[0].classification == FixedPointRecord::Type::AttractingHyperbolic);
    CHECK(fps[1].location == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fps[1].multiplier == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(fps[1].classification == FixedPointRecord::Type::RepellingHyperbolic);
}

TEST_CASE("find_fixed_points: identity word is flagged") {
    IndexedAlphabet ab = mixed_alphabet();
    CHECK_THROWS_WITH_AS(find_fixed_points(ab.id_word(), ab, 128), "identically fixed",
                         std::invalid_argument);
}

TEST_CASE("Moebius inverse evaluates exactly") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius(1.2, 0.3, 0.4, (1.0 + 0.3 * 0.4) / 1.2)});
    const GroupWord w = ab.word(0);
    for (int i = 0; i < 16; ++i) {
        const double x = i / 16.0;
        const double y = x + word_dev_value(w.inverse(), ab, x);
        const double back = y + word_dev_value(w, ab, y);
        CHECK(std::fabs(back - x) < 1e-12);
    }
}

TEST_CASE("koenigs chart: Moebius diag linearizes with tiny defect") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(1.6)});
    const auto fps = find_fixed_points(ab.word(0), ab, 256);
    REQUIRE(!fps.empty());
    const FixedPointRecord attract = fps[0];
    REQUIRE(attract.classification == FixedPointRecord::Type::AttractingHyperbolic);
    KoenigsChart chart(ab.word(0), ab, attract, Arc(-0.1, 0.1), 200, 64);
    CHECK(chart.conjugacy_defect() < 1e-10);
    CHECK(chart.converged());
    // h(p) = 0 and h is monotone
    CHECK(std::fabs(chart.value(attract.location)) < 1e-12);
    CHECK(chart.value(0.05) > chart.value(-0.05));
}

TEST_CASE("koenigs chart: trig-built contraction has small defect on a short arc") {
    // g = R_{-t} o A o R_t-like word with a fixed point engineered at 0 via
    // a trig map with zero offset: f(0) = 0, f'(0) = 1 + amplitude.
    IndexedAlphabet ab(Alphabet{PrimitiveMap::trig(0.0, -0.3)});
    const auto fps = find_fixed_points(ab.word(0), ab, 256);
    REQUIRE(!fps.empty());
    const FixedPointRecord attract = fps[0];
    REQUIRE(attract.classification == FixedPointRecord::Type::AttractingHyperbolic);
    CHECK(attract.multiplier == doctest::Approx(0.7).epsilon(1e-9));
    KoenigsChart chart(ab.word(0), ab, attract, Arc(-0.05, 0.05), 400, 64);
    CHECK(chart.conjugacy_defect() < 1e-8);
}

TEST_CASE("koenigs chart: premature truncation is flagged") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::trig(0.0, -0.3)});
    const auto fps = find_fixed_points(ab.word(0), ab, 256);
    KoenigsChart chart(ab.word(0), ab, fps[0], Arc(-0.05, 0.05), 1, 32);
    CHECK_FALSE(chart.converged());
    CHECK(chart.conjugacy_defect() > 1e-10);
}

TEST_CASE("evaluability: trace through detects chart escape") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.4)});
    const Arc domain(-0.25, 0.25);
    CHECK_THROWS_AS(trace_through(ab.word(0), ab, Arc(-0.1, 0.1), domain), EvaluabilityError);
    const EndpointTrace t = trace_through(ab.word(0, -1), ab, Arc(0.2, 0.24), domain);
    CHECK(t.lo == doctest::Approx(-0.2));
}

TEST_CASE("moebius matrix determinant is validated") {
    CHECK_THROWS_AS(PrimitiveMap::moebius(2.0, 0.0, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(PrimitiveMap::trig(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("collapsed Moebius runs agree with plain evaluation to 1e-12") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(1.4),
                                PrimitiveMap::moebius(1.25, 0.75, 0.75, 1.25),
                                PrimitiveMap::trig(0.05, 0.2)});
    std::mt19937_64 rng(2718);
    for (int t = 0; t < 10; ++t) {
        const GroupWord w = random_reduced_word(ab, 8, rng);
        WordMap plain(w, ab);
        CollapsedWordMap fast(w, ab);
        CHECK(fast.step_count() <= w.letters().size());
        for (int i = 0; i <= 16; ++i) {
            const double x = i / 16.0;
            const DevJet a = plain.dev_jet(x);
            const DevJet b = fast.dev_jet(x);
            CHECK(std::fabs(a.p0 - b.p0) < 1e-12);
            CHECK(std::fabs(a.p1 - b.p1) < 1e-12);
            CHECK(std::fabs(a.p2 - b.p2) < 1e-10);
        }
    }
    // a Moebius-only word collapses to a single step
    const GroupWord m = ab.word(0, 3) * ab.word(1, -2) * ab.word(0);
    CollapsedWordMap collapsed(m, ab);
    CHECK(collapsed.step_count() == 1);
}

TEST_CASE("alphabet config round-trip and schema rejection") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::rotation(0.25),
                                PrimitiveMap::moebius_diag(2.0),
                                PrimitiveMap::trig(0.1, 0.3)});
    const IndexedAlphabet back = load_alphabet(save_alphabet(ab));
    REQUIRE(back.size() == 3);
    CHECK(back.at(0).kind == PrimitiveMap::Kind::Rotation);
    CHECK(back.at(0).angle == 0.25);
    CHECK(back.at(1).kind == PrimitiveMap::Kind::Moebius);
    CHECK(back.at(1).m00 == 2.0);
    CHECK(back.at(2).amplitude == 0.3);

    CHECK_THROWS_AS(load_alphabet(R"({"generators": [{"kind": "rotation", "angle": 0.1,
                                       "extra": 1}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_alphabet(R"({"generators": [], "unknown": 2})"), std::invalid_argument);
    CHECK_THROWS_AS(load_alphabet(R"({"generators": [{"kind": "spiral"}]})"),
                    std::invalid_argument);
}

TEST_CASE("chart conjugation of F itself is exactly linear") {
    IndexedAlphabet ab(Alphabet{PrimitiveMap::moebius_diag(1.6)});
    const GroupWord F = ab.word(0);
    const auto fps = find_fixed_points(F, ab, 256);
    REQUIRE(fps[0].classification == FixedPointRecord::Type::AttractingHyperbolic);
    const double lambda = fps[0].multiplier;
    KoenigsChart chart(F, ab, fps[0], Arc(-0.2, 0.2), 200, 64);
    ChartConjugatedMap G(F, ab, chart);
    for (int i = 0; i <= 16; ++i) {
        const double u = -0.05 + 0.1 * i / 16.0;
        const DevJet j = G.dev_jet(u);
        CHECK(std::fabs(j.p0 - (lambda - 1.0) * u) < 1e-9);
        CHECK(std::fabs(j.p1 - (lambda - 1.0)) < 1e-8);
        CHECK(std::fabs(j.p2) < 1e-5);
    }
}
