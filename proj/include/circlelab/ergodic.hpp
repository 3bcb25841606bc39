// Random walks on the group, stationary-measure residuals, contraction
// statistics, spikes and the greedy unity decomposition.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "circlelab/metrics.hpp"

namespace circlelab {

struct StepMeasure {
    std::vector<std::pair<GroupWord, double>> atoms;

    void validate(double tol = 1e-12) const;  // positive masses summing to 1
    bool is_symmetric(double tol = 1e-12) const;  // w and w^{-1} carry equal mass
};

double entropy(const StepMeasure& mu);

// Step measures in the structured config format (atoms as letter lists with
// masses).
std::string save_step_measure(const StepMeasure& mu);
StepMeasure load_step_measure(const std::string& json_text, const IndexedAlphabet& alphabet);

// Left random walk orbit x_l = f_l(x_{l-1}) with f_i i.i.d. from mu.
// Deterministic given the seed. Returns circle points in [0,1).
std::vector<double> random_orbit(const StepMeasure& mu, const IndexedAlphabet& alphabet,
                                 double x0, long length, std::uint64_t seed,
                                 const Tolerances& tol = default_tolerances());

struct EmpiricalMeasure {
    std::vector<double> points;  // sorted, in [0,1)
    bool exact = false;          // equispaced quadrature of an exact measure
    double half_width = 0.0;     // MC or discretization half-width per cell

    static EmpiricalMeasure from_samples(std::vector<double> samples);
    static EmpiricalMeasure uniform_exact(int nodes);

    // mass of the circle arc [lo, hi) taken mod 1
    double mass(double lo, double hi) const;
    double ks_to_uniform() const;
};

struct StationarityResult {
    double max_residual = 0.0;
    double half_width = 0.0;
    int cells = 0;
};

// max over a partition of the circle into `cells` arcs of
// |nu(B) - sum_g mu(g) nu(g^{-1} B)|.
StationarityResult stationarity_residual(const StepMeasure& mu, const IndexedAlphabet& alphabet,
                                         const EmpiricalMeasure& nu, int cells,
                                         const Tolerances& tol = default_tolerances());

struct MartingaleReport {
    std::vector<std::vector<double>> xi;  // per path, xi_l for l = 1..horizon
    double settled_fraction = 0.0;        // paths with settled tails
    double cross_path_spread = 0.0;       // spread of xi_horizon across paths
    bool horizon_too_short = false;
};

// xi_l = integral of psi against (f_1 ... f_l) nu, estimated by pushing a
// fixed quadrature of nu. psi is a bounded continuous function.
MartingaleReport martingale_probe(const StepMeasure& mu, const IndexedAlphabet& alphabet,
                                  const EmpiricalMeasure& nu,
                                  const std::function<double(double)>& psi, int num_paths,
                                  int horizon, std::uint64_t seed, double settle_tol = 1e-3,
                                  const Tolerances& tol = default_tolerances());

struct ContractionWalkReport {
    std::vector<double> median_c;  // per l = 1..horizon
    std::vector<double> p95_c;
};

ContractionWalkReport contraction_along_walk(const StepMeasure& mu,
                                             const IndexedAlphabet& alphabet, int num_paths,
                                             int horizon, std::uint64_t seed,
                                             int grid_size = 256,
                                             const Tolerances& tol = default_tolerances());

// A continuous spike: positive sampled function zeta on the circle together
// with (r, a, Q, theta, C). The three defining conditions are checked on the
// sample grid by spike_validate.
struct Spike {
    std::vector<double> zeta;  // samples at i/N, N = zeta.size()
    double r = 0.0;
    double a = 0.0;
    double Q = 0.0;
    double theta = 1.0;
    double C = 2.0;
    GroupWord source;  // optional: the group element whose inverse derivative is zeta
    bool has_source = false;

    double zeta_at(double x) const;  // linear interpolation, periodic
    double sup_norm() const;

    // zeta = derivative of g^{-1} sampled on `nodes` points.
    static Spike from_word(const GroupWord& g, const IndexedAlphabet& alphabet, int nodes,
                           double r, double a, double Q, double theta, double C,
                           const Tolerances& tol = default_tolerances());
};

struct SpikeValidation {
    bool pass = false;
    bool cond1 = false, cond2 = false, cond3 = false;
    double margin1 = 0.0, margin2 = 0.0, margin3 = 0.0;  // worst slack per condition
};

// Checks the plateau, tail and local-ratio conditions at every grid point.
// For Q = 0 the factor r^Q in the tail bound is replaced by the log
// correction 1/(1 + |ln r|).
SpikeValidation spike_validate(const Spike& s, int grid_size,
                               const Tolerances& tol = default_tolerances());

struct GreedyUnityResult {
    std::vector<double> coefficients;  // c_alpha >= 0 per spike
    double residual = 0.0;             // final sup residual
    int rounds = 0;
    bool stalled = false;
    double stall_gap_lo = 0.0, stall_gap_hi = 0.0;  // uncovered region when stalled
    std::vector<double> residual_history;  // sup residual after each round
    double min_intermediate = 0.0;     // most negative grid value seen (>= 0 expected)

    // Induced step measure mu(g_alpha) = c_alpha / ||zeta_alpha||_inf,
    // normalized; only spikes with word sources contribute.
    StepMeasure induced_measure(const std::vector<Spike>& spikes) const;
};

// Iterative greedy rounds: each round must reduce the sup residual by a
// factor >= 1/2 while keeping it nonnegative on the grid; halts when the
// residual drops below `tol_residual`.
GreedyUnityResult greedy_unity(const std::vector<Spike>& spikes, double tol_residual,
                               int grid_size = 2048, int max_rounds = 64);

} // namespace circlelab
