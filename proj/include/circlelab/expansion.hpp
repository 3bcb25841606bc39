// Expandability scans, expansion coverings, interval magnification,
// minimum-distortion partitions and Hoelder-exponent estimation.
#pragma once

#include <vector>

#include "circlelab/metrics.hpp"

namespace circlelab {

struct ScanResult {
    int grid_size = 0;
    int word_length_cap = 0;
    double margin = 0.0;
    std::vector<double> max_d1;        // per grid point, max over words up to cap
    std::vector<GroupWord> best_word;  // argmax word per grid point
    std::vector<int> non_expandable;   // grid indices with max_d1 <= 1 + margin
    bool cap_exhausted() const { return !non_expandable.empty(); }
};

// Maximum derivative over all freely reduced words up to `word_length_cap`
// letters, per point of a uniform circle grid. Cap <= 8.
ScanResult expandability_scan(const IndexedAlphabet& alphabet, int word_length_cap,
                              int grid_size, double margin = 1e-3,
                              const Tolerances& tol = default_tolerances());

struct CoverInterval {
    Arc arc{0.0, 0.5};
    GroupWord expander;
    double min_d1 = 0.0;  // grid min of expander derivative on the arc
    double max_d1 = 0.0;
    double max_d2 = 0.0;
};

struct ExpansionCover {
    std::vector<CoverInterval> intervals;  // cyclically ordered
    double m1 = 0.0;  // global min of expander derivatives (> 1)
    double M1 = 0.0;  // global max
    double L = 0.0;   // min overlap length of cyclic neighbors
    double M2bar = 0.0;  // max of |D2 expander| over the cover (Mbar of the growth check)
    int size() const { return static_cast<int>(intervals.size()); }
};

// Greedy construction from a scan with every cell expandable: maximal runs of
// cells sharing a best expander become intervals, enlarged to overlap only
// their cyclic neighbors; s >= 3 enforced.
ExpansionCover build_cover(const ScanResult& scan, const IndexedAlphabet& alphabet,
                           const Tolerances& tol = default_tolerances());

struct Magnification {
    Arc source{0.0, 0.25};
    GroupWord word;            // f_{i_r} o ... o f_{i_1}
    int steps = 0;             // r
    Arc image{0.0, 0.25};
    std::vector<int> interval_indices;  // chosen cover interval per step
    long step_bound = 0;       // floor of (ln(L M1) - ln L(source)) / ln m1
};

// Applies expanders of covering intervals until the image length first
// reaches L. All magnification invariants are checked before returning.
Magnification magnify(const ExpansionCover& cover, const IndexedAlphabet& alphabet,
                      const Arc& source, const Tolerances& tol = default_tolerances());

struct D2GrowthRow {
    double source_len = 0.0;
    int steps = 0;
    double sup_d2 = 0.0;
    double bound_m1 = 0.0;     // Mbar * M1^{2r}
    double bound_power = 0.0;  // Cbar * len^{ln beta}
    bool pass = false;
};

// sup |D2 F_{[a,b]}| on the source against Mbar M1^{2r} and against
// Cbar * length^{ln beta} with Cbar = Mbar M1^{2 ln(L M1)/ln m1} and
// ln beta = -2 ln M1 / ln m1.
D2GrowthRow d2_growth_check(const Magnification& mag, const ExpansionCover& cover,
                            const IndexedAlphabet& alphabet, int grid_size = 64,
                            const Tolerances& tol = default_tolerances());

struct PartitionResult {
    int k = 0;
    int j_min = 0;             // minimizing cell index
    DistortionValue min_distortion;
    double bound = 0.0;        // c1 C L(J) (4^k + 2nk) / 5^k
    double distortion_sum = 0.0;  // over all cells (for the sum rule)
    bool pass = false;
};

// Partitions J into 5^k equal arcs and locates the cell of minimal
// distortion of g. `letter_count` is the spelling bound of g (4^k + 2nk for
// cascade members); `log_deriv_lipschitz` is the Lipschitz constant C of
// log-derivative over the alphabet letters (see alphabet_log_lipschitz).
PartitionResult min_distortion_partition(const GroupWord& g, const IndexedAlphabet& alphabet,
                                         const Arc& J, int k, long letter_count,
                                         double log_deriv_lipschitz,
                                         double c1_factor = 1.05, int cell_grid = 3,
                                         const Tolerances& tol = default_tolerances());

// Max over alphabet letters (and inverses) of sup |D2 f| / D1 f on the circle.
double alphabet_log_lipschitz(const IndexedAlphabet& alphabet, int grid_size = 1024,
                              const Tolerances& tol = default_tolerances());

struct HolderEstimate {
    double alpha = 0.0;       // least-squares slope on log-log pairs
    double stderr_alpha = 0.0;
    double conf_low = 0.0;    // ~95% band
    double conf_high = 0.0;
    double theory_lower_bound = 0.0;  // 1/(1+cbar) when cover constants given
    bool has_theory_bound = false;
};

struct CoverConstants {
    double m1 = 0.0, M1 = 0.0, M2 = 0.0, delta = 0.0, L = 0.0;
};

// Log-log regression of image length against source length. Requires >= 20
// pairs spanning >= 3 decades of source length.
HolderEstimate holder_exponent(const std::vector<std::pair<double, double>>& pairs,
                               const CoverConstants* constants = nullptr);

// Cover (de)serialization in the structured config format, for reuse across
// runs; expander words are stored as [generator, exponent] letter lists.
std::string save_cover(const ExpansionCover& cover);
ExpansionCover load_cover(const std::string& json_text, const IndexedAlphabet& alphabet);

} // namespace circlelab
