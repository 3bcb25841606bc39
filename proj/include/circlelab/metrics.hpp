// C^m distances to the identity on arcs, distortion, rotation numbers and
// contraction coefficients. Sup-norms are grid maxima carrying a certified
// slack term (heuristic Lipschitz bound, not directed rounding).
#pragma once

#include <optional>

#include "circlelab/evaluate.hpp"

namespace circlelab {

struct CmDistance {
    int m = 0;
    double value = 0.0;   // grid max of sum_{i<=m} |D^i (f - id)|
    double slack = 0.0;   // true sup in [value, value + slack]
    Arc arc{0.0, 0.5};
    int grid_size = 0;

    double upper() const { return value + slack; }
};

struct DistortionValue {
    double value = 0.0;   // grid approximation of sup log f'(x)/f'(y)
    double slack = 0.0;
    Arc arc{0.0, 0.5};
    int grid_size = 0;
};

// Grid sup of sum_{i<=m} |D^i(f-id)| with slack from a grid bound on the
// (m+1)-th difference quotient. `domain`, when given, is the pseudogroup
// chart: evaluability of word maps is the caller's concern (use
// trace_through); DevMap evaluation itself is global.
CmDistance cm_distance(const DevMap& map, const Arc& arc, int m, int grid_size);

CmDistance cm_distance(const GroupWord& word, const IndexedAlphabet& alphabet,
                       const Arc& arc, int m, int grid_size,
                       const std::optional<Arc>& domain = std::nullopt,
                       const Tolerances& tol = default_tolerances());

DistortionValue distortion(const DevMap& map, const Arc& arc, int grid_size);

DistortionValue distortion(const GroupWord& word, const IndexedAlphabet& alphabet,
                           const Arc& arc, int grid_size,
                           const std::optional<Arc>& domain = std::nullopt,
                           const Tolerances& tol = default_tolerances());

struct RotationNumber {
    double value = 0.0;        // mod 1
    double error_bound = 0.0;  // 1/iterations, or 0 when exact
    bool exact_rational = false;
    long period = 0;           // q when value = p/q was detected
};

// (F^n(x0) - x0)/n on the lift; short-circuits to p/q when the orbit closes
// up to `periodic_tol` within the iteration budget.
RotationNumber rotation_number(const GroupWord& word, const IndexedAlphabet& alphabet,
                               long iterations, double periodic_tol = 1e-12,
                               double x0 = 0.0,
                               const Tolerances& tol = default_tolerances());

struct ContractionCoefficient {
    double value = 0.5;
    double slack = 0.0;       // grid resolution bound: 2/grid_size
    double arc_length = 0.5;  // minimizing length
    double arc_pos = 0.0;     // left endpoint of the minimizing arc
};

// min over arc lengths l of max(l, 1 - max over positions of |g(U_l)|),
// which realizes the infimum definition up to grid resolution.
ContractionCoefficient contraction_coefficient(const GroupWord& word,
                                               const IndexedAlphabet& alphabet,
                                               int grid_size,
                                               const Tolerances& tol = default_tolerances());

} // namespace circlelab
