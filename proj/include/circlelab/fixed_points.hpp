#pragma once

#include <vector>

#include "circlelab/evaluate.hpp"

namespace circlelab {

struct FixedPointRecord {
    enum class Type { AttractingHyperbolic, RepellingHyperbolic, Parabolic };

    double location = 0.0;    // mod 1
    double multiplier = 1.0;  // f'(location) > 0
    Type classification = Type::Parabolic;
};

// Brackets all sign changes of f(x) - x over one period and refines them by
// bisection+Newton to root_tol. Grid cells where |f(x)-x| < root_tol without a
// sign change are reported as parabolic candidates. Throws:
//  - invalid_argument("identically fixed") for the identity word,
//  - runtime_error("grid too coarse...") when refined roots collide within a
//    grid step (caller must increase density).
std::vector<FixedPointRecord> find_fixed_points(const GroupWord& word,
                                                const IndexedAlphabet& alphabet,
                                                int grid_density,
                                                const Tolerances& tol = default_tolerances());

} // namespace circlelab
