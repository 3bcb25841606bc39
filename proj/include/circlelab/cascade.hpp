// Commutator level sets S(k), their renormalizations
// S~(k) = F^{-kn} o S(k) o F^{kn}, parameter selection, and the C^2/C^3
// decay verification.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "circlelab/koenigs.hpp"
#include "circlelab/metrics.hpp"
#include "circlelab/polydev.hpp"

namespace circlelab {

struct CascadeConfig {
    double a = 0.2;       // I = [-a, a]
    double eps0 = 0.01;   // shrink unit, default a/20
    double eps = 0.0;     // initial C2 closeness of S0
    double lambda = 0.0;  // multiplier of F at 0
    int n = 0;            // renormalization power
    double C = 1.0;       // calibrated commutator constant
    int k_max = 8;
    int prune_cap = 16;
    double margin = 0.1;  // right-hand side of the smallness condition on eps

    // Engineering knobs (not part of the construction itself).
    int candidate_cap = 512;  // candidate commutators examined per level
    int prune_points = 9;     // sample points for the flat (non-poly) C0 estimate

    Arc interval() const { return Arc(-a, a); }
    Arc shrunk_interval() const { return Arc(-a + 5.0 * eps0, a - 5.0 * eps0); }

    // Conditions: (A) n minimal with lambda^n a < a - 5 eps0 and
    // lambda^n < 1/20; (C) eps * max{(lambda^-n + 1) C, lambda^-n + 1} <
    // margin; appendix lambda^{2n} < 1/10 for C3 runs.
    void validate() const;           // throws on any violation
    bool condition_C_holds() const;  // the smallness condition alone
    void validate_geometry() const;  // everything except condition (C)
};

// Minimal n per (A), supremal eps per (C) shrunk by 0.9.
CascadeConfig select_params(double lambda, double a, double eps0, double C,
                            double margin = 0.1);

struct Provenance {
    int parent1 = -1;    // rank in level k-1
    int parent2 = -1;    // rank in the level `second_from`
    int second_from = 0; // k-1 or k-2 (0 stands for S0 when k == 1)
    int sign1 = 1;
    int sign2 = 1;
};

struct LevelMember {
    GroupWord word;  // raw S(k) word over the S0 alphabet
    Provenance prov;
    double c0 = 0.0; // renormalized C0 distance on I (polynomial-exact when has_poly)

    // Taylor model of the renormalized deviation on I. Built level-by-level
    // for rotation/trig alphabets; point evaluation of the flat word loses
    // the member sizes to roundoff beyond level ~4, the polynomial does not.
    DevPoly poly;
    bool has_poly = false;
};

struct LevelSet {
    int k = 0;
    std::vector<LevelMember> members;  // sorted by c0, descending
    long candidates_before_prune = 0;  // nonidentity commutators enumerated
    bool degenerate = false;       // no member cleared the nonidentity threshold
    bool hard_degenerate = false;  // no candidate words at all (identity reductions)
};

// S(0) is the provided word list. Levels are built by the commutator
// recursion with renormalized-C0 pruning in the exact-chart model
// (F = x -> lambda x). Members failing the nonidentity threshold are
// discarded while the level has certified members; if none clears it the
// strongest candidates are kept and the level is flagged degenerate.
std::vector<LevelSet> build_levels(const std::vector<GroupWord>& S0,
                                   const IndexedAlphabet& alphabet,
                                   const CascadeConfig& cfg,
                                   const Tolerances& tol = default_tolerances());

// Word-level conjugation S~(k) = F^{-kn} S(k) F^{kn}. Verifies that F has an
// attracting hyperbolic fixed point (via find_fixed_points) before
// conjugating. Identical, as reduced words, to the inline recursion of the
// renormalized construction.
std::vector<LevelSet> renormalize_levels(const std::vector<LevelSet>& levels,
                                         const GroupWord& F, int n,
                                         const IndexedAlphabet& alphabet,
                                         int fixed_point_grid = 512,
                                         const Tolerances& tol = default_tolerances());

struct CascadeRow {
    int k = 0;
    long word_len = 0;       // spelled letters of the renormalized member
    long letter_bound = 0;   // 4^k + 2nk
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // cumulative C^m distances on I
    double c2_slack = 0.0;
    double d3 = 0.0;         // sup |D^3 (g - id)| when order 3 requested
    double bound = 0.0;      // eps / 2^{floor(k/2)}
    double ratio = 0.0;      // c2 / bound
    std::string status;      // "ok" | "sub" | "FAILED"
};

struct CascadeReport {
    std::vector<CascadeRow> rows;
    bool failed = false;          // some row violated the bound beyond slack
    bool any_degenerate = false;  // some level was below the certification threshold
    bool hard_degenerate = false;
};

enum class CascadeMode { ExactChart, Ambient };

// Tabulates, per level, the member with maximal C0 distance. In exact-chart
// mode members are evaluated as lambda^{-kn} w(lambda^{kn} x); in ambient
// mode the words are conjugated by the supplied F and measured through its
// Koenigs chart, whose conjugacy defect is added to the slack column.
CascadeReport verify_decay(const std::vector<LevelSet>& levels,
                           const CascadeConfig& cfg,
                           const IndexedAlphabet& alphabet,
                           bool order3, int grid_size = 512,
                           CascadeMode mode = CascadeMode::ExactChart,
                           const GroupWord* F_ambient = nullptr,
                           const KoenigsChart* chart = nullptr,
                           const Tolerances& tol = default_tolerances());

struct CommutatorLemmaReport {
    bool evaluable = false;        // [f1,f2] defined on the shrunk arc
    double c1_commutator = 0.0;    // ||[f1,f2]-id||_1 on the shrunk arc
    double c1_bound = 0.0;         // C * ||f1-id||_2 * ||f2-id||_2
    double d2_commutator = 0.0;    // sup |D2 [f1,f2]| on the shrunk arc
    double d2_bound = 0.0;         // 5 * max(sup|D2 f1|, sup|D2 f2|)
    bool c1_pass = false;
    bool d2_pass = false;
};

// Verifies the first-derivative loss bound and the second-derivative bound
// for a pair inside the eps-ball around the identity on [-a, a].
CommutatorLemmaReport check_commutator_lemmas(const GroupWord& f1, const GroupWord& f2,
                                              const IndexedAlphabet& alphabet,
                                              double a, double eps0, double eps,
                                              double C, int grid_size = 256,
                                              const Tolerances& tol = default_tolerances());

// Empirical estimate of the commutator constant: max over `pairs` random
// TrigPerturb pairs in the eps-ball of
// ||[f1,f2]-id||_1 / (||f1-id||_2 ||f2-id||_2), times safety factor 2.
double calibrate_commutator_constant(double a, double eps0, double eps, int pairs,
                                     std::uint64_t seed, int grid_size = 256,
                                     const Tolerances& tol = default_tolerances());

// Random TrigPerturb inside the eps-ball on [-a, a] (used by calibration and
// by tests).
PrimitiveMap random_trig_in_ball(double eps, std::mt19937_64& rng);

// Deterministic generator set inside the eps-ball: `count` TrigPerturbs,
// random when at_edge is false, pinned to the ball boundary otherwise.
Alphabet make_trig_generators(double eps, int count, std::uint64_t seed,
                              bool at_edge = false);

} // namespace circlelab
