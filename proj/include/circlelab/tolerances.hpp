// Central numeric policy: every tolerance and grid default used by the
// library lives here so runs can be reproduced from a single struct.
#pragma once

#include <cstdint>

namespace circlelab {

struct Tolerances {
    // Root finding / inversion
    double newton_tol = 1e-13;
    int newton_max_iter = 60;
    double root_tol = 1e-12;

    // Fixed point classification
    double parabolic_margin = 1e-6;

    // Identity detection: below this C0 distance on the test arc a word is
    // treated as (numerically) the identity.
    double nonidentity_threshold = 1e-9;

    // Koenigs limit stopping rule (successive-difference)
    double koenigs_stop = 1e-10;
    int koenigs_max_depth = 256;

    // Matrix sanity
    double det_tol = 1e-12;

    // Slack safety multiplier for grid sup-norm Lipschitz estimates
    double slack_safety = 1.5;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace circlelab
