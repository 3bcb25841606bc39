// Normalized vector fields extracted from near-identity sequences, Euler
// flows, and the translation-limit renormalization at a hyperbolic fixed
// point.
#pragma once

#include <functional>
#include <vector>

#include "circlelab/cascade.hpp"

namespace circlelab {

struct SampledField {
    Arc arc{0.0, 0.5};
    std::vector<double> values;  // uniform samples of X on the arc
    int m = 2;                   // smoothness order of the source norm
    double norm_lower_bound = 0.0;  // measured C^{m-1} norm (>= 1/C expected)
    double cauchy_defect = 0.0;  // max grid |X_i - X_{i+1}| over the tail

    double eval(double x) const;  // linear interpolation between grid nodes
};

// Limit of X_i = (g_i - id)/||g_i - id||_m estimated by averaging the last
// three normalized iterates. Preconditions: C^m distances decreasing and
// below 0.1; the uniform bound ||g_i-id||_m <= C ||g_i-id||_{m-1} holds.
SampledField extract_field(const std::vector<const DevMap*>& maps, const Arc& arc, int m,
                           double C, double cauchy_tol = 0.5, int grid_size = 1024);

struct EulerResult {
    double value = 0.0;
    double error_bound = 0.0;  // Lipschitz * t^2 / steps
};

// Explicit Euler with linear interpolation of the field between grid nodes;
// throws if the trajectory exits the arc.
EulerResult euler_flow(const SampledField& field, double x0, double t, int steps);

struct TranslationRow {
    int j = 0;
    double c0_dist = 0.0;  // C0 distance to the translation in the chart
    double c1_dist = 0.0;  // C0 + C1 deviation
    double translation = 0.0;  // lambda^{-j} * chart displacement of g at p
    bool kappa_rule_fired = false;  // sup|D2| <= sup(|g-id| + |g'-1|)
};

struct TranslationReport {
    std::vector<TranslationRow> rows;
    int kappa = -1;  // first j where the selection rule fired, -1 if never
};

// Tabulates the C1 distance of F^{-j} g F^{j} (in the Koenigs chart of F) to
// the translation by lambda^{-j} h(g(p)), for j = 0..j_max. Requires
// g(p) != p.
TranslationReport translation_limit(const GroupWord& g, const IndexedAlphabet& alphabet,
                                    const KoenigsChart& chart, const Arc& chart_arc,
                                    int j_max, int grid_size = 256,
                                    const Tolerances& tol = default_tolerances());

// Exact-chart variant: F is the linear model x -> lambda x, so the chart is
// the identity and the conjugates are lambda^{-j} g(lambda^j x).
TranslationReport translation_limit_linear(const GroupWord& g, const IndexedAlphabet& alphabet,
                                           double lambda, const Arc& arc, int j_max,
                                           int grid_size = 256,
                                           const Tolerances& tol = default_tolerances());

} // namespace circlelab
