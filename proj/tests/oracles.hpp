// Test-only oracles: Richardson-extrapolated central differences for jet
// checks, plus random word/point generators. Independent of the jet
// composition path in the library (they consume values only).
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "circlelab/evaluate.hpp"

namespace circlelab::testing {

struct FdJet {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

// Central differences with one Richardson step (h and h/2). Higher orders
// get larger steps: roundoff scales like eps/h^k, so the 1e-5 step that
// suits d1 would drown d2 and d3 in noise.
template <typename F>
FdJet fd_jet(F&& f, double x, double h1 = 1e-5, double h2 = 1e-4, double h3 = 2.5e-3) {
    auto d1 = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    auto d2 = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
    auto d3 = [&](double hh) {
        return (f(x + 2.0 * hh) - 2.0 * f(x + hh) + 2.0 * f(x - hh) - f(x - 2.0 * hh)) /
               (2.0 * hh * hh * hh);
    };
    FdJet j;
    j.d1 = (4.0 * d1(h1 / 2.0) - d1(h1)) / 3.0;
    j.d2 = (4.0 * d2(h2 / 2.0) - d2(h2)) / 3.0;
    j.d3 = (4.0 * d3(h3 / 2.0) - d3(h3)) / 3.0;
    return j;
}

inline GroupWord random_reduced_word(const IndexedAlphabet& ab, int length,
                                     std::mt19937_64& rng) {
    std::uniform_int_distribution<int> gen(0, ab.size() - 1);
    std::uniform_int_distribution<int> sign(0, 1);
    std::vector<Letter> letters;
    int last_gen = -1, last_sign = 0;
    while (static_cast<int>(letters.size()) < length) {
        const int g = gen(rng);
        const int s = sign(rng) ? 1 : -1;
        if (g == last_gen && s == -last_sign) continue;
        letters.push_back(Letter{g, s});
        last_gen = g;
        last_sign = s;
    }
    return GroupWord(ab.id, letters);
}

} // namespace circlelab::testing
