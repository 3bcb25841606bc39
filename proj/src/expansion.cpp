#include "circlelab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "circlelab/parallel.hpp"

namespace circlelab {

namespace {

// Depth-first enumeration of freely reduced words, carrying forward the
// orbit and derivative of every grid point so each node costs O(grid).
struct ScanState {
    const IndexedAlphabet* alphabet;
    const Tolerances* tol;
    int cap;
    std::vector<double> xs;  // current images
    std::vector<double> d1;  // current derivatives
    ScanResult* out;
    std::vector<Letter> stack;

    void visit() {
        // stack holds letters in application order (innermost first); word
        // letters are stored outermost-first.
        std::vector<Letter> comp(stack.rbegin(), stack.rend());
        const GroupWord w(alphabet->id, comp);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (d1[i] > out->max_d1[i]) {
                out->max_d1[i] = d1[i];
                out->best_word[i] = w;
            }
        }
    }

    void recurse(int depth, int last_gen, int last_sign) {
        if (depth == cap) return;
        const int n_gens = alphabet->size();
        for (int g = 0; g < n_gens; ++g) {
            for (int s : {+1, -1}) {
                if (g == last_gen && s == -last_sign) continue;  // would cancel
                std::vector<double> sx = xs, sd = d1;
                const PrimitiveMap& p = alphabet->at(g);
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    if (s > 0) {
                        const DevJet j = p.dev_jet(xs[i]);
                        d1[i] *= (1.0 + j.p1);
                        xs[i] += j.p0;
                    } else {
                        const DevJet j = p.inv_dev_jet(xs[i], *tol);
                        d1[i] *= (1.0 + j.p1);
                        xs[i] += j.p0;
                    }
                }
                stack.push_back(Letter{g, s});
                visit();
                recurse(depth + 1, g, s);
                stack.pop_back();
                xs = std::move(sx);
                d1 = std::move(sd);
            }
        }
    }
};

} // namespace

ScanResult expandability_scan(const IndexedAlphabet& alphabet, int word_length_cap,
                              int grid_size, double margin, const Tolerances& tol) {
    if (word_length_cap > 8)
        throw std::invalid_argument("expandability_scan: word_length_cap <= 8 required");
    if (word_length_cap < 1 || grid_size < 16)
        throw std::invalid_argument("expandability_scan: bad parameters");

    ScanResult out;
    out.grid_size = grid_size;
    out.word_length_cap = word_length_cap;
    out.margin = margin;
    out.max_d1.assign(static_cast<std::size_t>(grid_size), 1.0);  // identity word
    out.best_word.assign(static_cast<std::size_t>(grid_size), GroupWord(alphabet.id));

    ScanState st;
    st.alphabet = &alphabet;
    st.tol = &tol;
    st.cap = word_length_cap;
    st.xs.resize(static_cast<std::size_t>(grid_size));
    st.d1.assign(static_cast<std::size_t>(grid_size), 1.0);
    for (int i = 0; i < grid_size; ++i)
        st.xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / grid_size;
    st.out = &out;
    st.recurse(0, -1, 0);

    for (int i = 0; i < grid_size; ++i)
        if (out.max_d1[static_cast<std::size_t>(i)] <= 1.0 + margin)
            out.non_expandable.push_back(i);
    return out;
}

namespace {

struct Run {
    int begin = 0;  // first cell
    int count = 0;
    GroupWord word;
};

} // namespace

ExpansionCover build_cover(const ScanResult& scan, const IndexedAlphabet& alphabet,
                           const Tolerances& tol) {
    if (!scan.non_expandable.empty())
        throw std::runtime_error("build_cover: non-expandable cells present");
    const int n = scan.grid_size;
    const double h = 1.0 / n;

    // Maximal cyclic runs of cells sharing a best expander word, started at a
    // run boundary (cell whose predecessor uses a different word).
    std::vector<Run> runs;
    int start = 0;
    for (int i = 0; i < n; ++i) {
        const GroupWord& prevw = scan.best_word[static_cast<std::size_t>((i + n - 1) % n)];
        const GroupWord& curw = scan.best_word[static_cast<std::size_t>(i)];
        if (!(prevw.letters() == curw.letters())) { start = i; break; }
    }
    int i = start, seen = 0;
    while (seen < n) {
        Run r;
        r.begin = i;
        r.word = scan.best_word[static_cast<std::size_t>(i)];
        while (seen < n) {
            const GroupWord& w = scan.best_word[static_cast<std::size_t>(i)];
            if (!(w.letters() == r.word.letters())) break;
            ++r.count;
            ++seen;
            i = (i + 1) % n;
        }
        runs.push_back(std::move(r));
    }

    // Enforce s >= 3 by splitting the longest runs.
    while (static_cast<int>(runs.size()) < 3) {
        auto longest = std::max_element(runs.begin(), runs.end(),
                                        [](const Run& a, const Run& b) { return a.count < b.count; });
        if (longest->count < 2)
            throw std::runtime_error("build_cover: cannot form a 3-interval cover");
        Run tail = *longest;
        const int half = longest->count / 2;
        longest->count = half;
        tail.begin = (longest->begin + half) % n;
        tail.count -= half;
        runs.insert(std::next(longest), tail);
    }

    // Enlarge runs into overlapping intervals: extend while the expander
    // still has derivative > 1 + margin and the extension stays below half
    // of the neighbor run.
    const int s = static_cast<int>(runs.size());
    std::vector<CoverInterval> intervals(static_cast<std::size_t>(s));
    for (int r = 0; r < s; ++r) {
        const Run& run = runs[static_cast<std::size_t>(r)];
        const Run& left = runs[static_cast<std::size_t>((r + s - 1) % s)];
        const Run& right = runs[static_cast<std::size_t>((r + 1) % s)];
        int ext_l = 0, ext_r = 0;
        const int max_l = std::max(1, left.count / 2);
        const int max_r = std::max(1, right.count / 2);
        auto d1_at = [&](double cell_pos) {
            const double x = cell_pos / static_cast<double>(n);
            return 1.0 + word_dev_jet(run.word, alphabet, x, tol).p1;
        };
        auto cell_expands = [&](int cell) {
            // the whole cell [cell, cell+1] h must keep the expander above 1
            return d1_at(cell) > 1.0 + scan.margin && d1_at(cell + 0.5) > 1.0 + scan.margin &&
                   d1_at(cell + 1.0) > 1.0 + scan.margin;
        };
        while (ext_l < max_l && cell_expands(run.begin - ext_l - 1)) ++ext_l;
        while (ext_r < max_r && cell_expands(run.begin + run.count + ext_r)) ++ext_r;
        if (ext_l == 0 && ext_r == 0)
            throw std::runtime_error("build_cover: overlap construction fails (cover has a gap)");
        const double lo = (run.begin - ext_l) * h;
        const double hi = (run.begin + run.count + ext_r) * h;
        CoverInterval ci;
        ci.arc = Arc(lo, std::min(hi, lo + 1.0 - 1e-12));
        ci.expander = run.word;
        intervals[static_cast<std::size_t>(r)] = std::move(ci);
    }

    // Merge intervals that intersect beyond their cyclic neighbors.
    auto overlaps = [&](const CoverInterval& a, const CoverInterval& b) {
        const double alo = wrap01(a.arc.lo), blo = wrap01(b.arc.lo);
        const double d = wrap01(blo - alo);
        return d < a.arc.length() || wrap01(alo - blo) < b.arc.length();
    };
    bool merged = true;
    while (merged && static_cast<int>(intervals.size()) > 3) {
        merged = false;
        const int m = static_cast<int>(intervals.size());
        for (int a = 0; a < m && !merged; ++a) {
            for (int step = 2; step < m - 1; ++step) {
                const int b = (a + step) % m;
                if (overlaps(intervals[static_cast<std::size_t>(a)],
                             intervals[static_cast<std::size_t>(b)])) {
                    // merge the chain a..b into one interval keeping a's word
                    const double lo = intervals[static_cast<std::size_t>(a)].arc.lo;
                    double hi = intervals[static_cast<std::size_t>(b)].arc.hi;
                    while (hi < lo) hi += 1.0;
                    CoverInterval ci;
                    ci.arc = Arc(lo, std::min(hi, lo + 1.0 - 1e-12));
                    ci.expander = intervals[static_cast<std::size_t>(a)].expander;
                    std::vector<CoverInterval> next;
                    for (int q = (b + 1) % m; q != a; q = (q + 1) % m)
                        next.push_back(intervals[static_cast<std::size_t>(q)]);
                    next.push_back(std::move(ci));
                    intervals = std::move(next);
                    merged = true;
                    break;
                }
            }
        }
    }

    ExpansionCover cover;
    cover.m1 = std::numeric_limits<double>::infinity();
    cover.M1 = 0.0;
    cover.M2bar = 0.0;
    for (CoverInterval& ci : intervals) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, d2 = 0.0;
        for (double x : ci.arc.grid(128)) {
            const DevJet j = word_dev_jet(ci.expander, alphabet, x, tol);
            lo = std::min(lo, 1.0 + j.p1);
            hi = std::max(hi, 1.0 + j.p1);
            d2 = std::max(d2, std::fabs(j.p2));
        }
        ci.min_d1 = lo;
        ci.max_d1 = hi;
        ci.max_d2 = d2;
        if (!(lo > 1.0))
            throw std::runtime_error("build_cover: expander " + ci.expander.spell() +
                                     " loses expansion on enlarged arc [" +
                                     std::to_string(ci.arc.lo) + "," + std::to_string(ci.arc.hi) +
                                     "] (min d1 " + std::to_string(lo) + ")");
        cover.m1 = std::min(cover.m1, lo);
        cover.M1 = std::max(cover.M1, hi);
        cover.M2bar = std::max(cover.M2bar, d2);
        cover.intervals.push_back(std::move(ci));
    }

    // Union must cover the circle and L is the min cyclic-neighbor overlap.
    const int m = cover.size();
    cover.L = std::numeric_limits<double>::infinity();
    for (int a2 = 0; a2 < m; ++a2) {
        const Arc& A = cover.intervals[static_cast<std::size_t>(a2)].arc;
        const Arc& B = cover.intervals[static_cast<std::size_t>((a2 + 1) % m)].arc;
        double blo = B.lo;
        while (blo > A.hi) blo -= 1.0;
        while (blo + 1.0 <= A.hi) blo += 1.0;
        const double ov = A.hi - std::max(A.lo, blo);
        if (ov <= 0.0) throw std::runtime_error("build_cover: cover has a gap");
        cover.L = std::min(cover.L, ov);
    }
    return cover;
}

Magnification magnify(const ExpansionCover& cover, const IndexedAlphabet& alphabet,
                      const Arc& source, const Tolerances& tol) {
    if (!(source.length() < cover.L))
        throw std::invalid_argument("magnify: source length must be < L");

    Magnification mag;
    mag.source = source;
    mag.word = GroupWord(alphabet.id);
    mag.step_bound = static_cast<long>(std::floor(
        (std::log(cover.L * cover.M1) - std::log(source.length())) / std::log(cover.m1)));

    double lo = source.lo, hi = source.hi;
    const long hard_cap = mag.step_bound + 8;
    while (hi - lo < cover.L) {
        int chosen = -1;
        for (int i = 0; i < cover.size(); ++i) {
            const Arc& U = cover.intervals[static_cast<std::size_t>(i)].arc;
            // containment on the circle
            double slo = lo;
            while (slo < U.lo) slo += 1.0;
            while (slo - 1.0 >= U.lo) slo -= 1.0;
            const double shi = slo + (hi - lo);
            if (slo >= U.lo && shi <= U.hi) { chosen = i; lo = slo; hi = shi; break; }
        }
        if (chosen < 0)
            throw std::runtime_error("magnify: no covering interval contains the image (invariant violation)");
        const GroupWord& f = cover.intervals[static_cast<std::size_t>(chosen)].expander;
        lo += word_dev_value(f, alphabet, lo, tol);
        hi += word_dev_value(f, alphabet, hi, tol);
        mag.word = f * mag.word;
        mag.interval_indices.push_back(chosen);
        mag.steps += 1;
        if (mag.steps > hard_cap)
            throw std::runtime_error("magnify: step cap exceeded (cover invariant violation)");
    }
    mag.image = Arc(lo, hi);

    if (!(mag.image.length() >= cover.L && mag.image.length() <= cover.L * cover.M1))
        throw std::runtime_error("magnify: image length escapes [L, L*M1]");
    if (mag.steps > mag.step_bound)
        throw std::runtime_error("magnify: step count exceeds the log bound");
    return mag;
}

D2GrowthRow d2_growth_check(const Magnification& mag, const ExpansionCover& cover,
                            const IndexedAlphabet& alphabet, int grid_size,
                            const Tolerances& tol) {
    D2GrowthRow row;
    row.source_len = mag.source.length();
    row.steps = mag.steps;
    for (double x : mag.source.grid(grid_size))
        row.sup_d2 = std::max(row.sup_d2, std::fabs(word_dev_jet(mag.word, alphabet, x, tol).p2));

    const double Mbar = cover.M2bar;
    row.bound_m1 = Mbar * std::pow(cover.M1, 2.0 * mag.steps);
    const double ln_beta = -2.0 * std::log(cover.M1) / std::log(cover.m1);
    const double Cbar =
        Mbar * std::pow(cover.M1, 2.0 * std::log(cover.L * cover.M1) / std::log(cover.m1));
    row.bound_power = Cbar * std::pow(row.source_len, ln_beta);
    row.pass = row.sup_d2 <= row.bound_m1 * (1.0 + 1e-9) &&
               row.sup_d2 <= row.bound_power * (1.0 + 1e-9);
    return row;
}

double alphabet_log_lipschitz(const IndexedAlphabet& alphabet, int grid_size,
                              const Tolerances& tol) {
    double worst = 0.0;
    for (int g = 0; g < alphabet.size(); ++g) {
        for (int s : {+1, -1}) {
            for (int i = 0; i < grid_size; ++i) {
                const double x = static_cast<double>(i) / grid_size;
                const DevJet j = s > 0 ? alphabet.at(g).dev_jet(x)
                                       : alphabet.at(g).inv_dev_jet(x, tol);
                worst = std::max(worst, std::fabs(j.p2) / (1.0 + j.p1));
            }
        }
    }
    return worst;
}

PartitionResult min_distortion_partition(const GroupWord& g, const IndexedAlphabet& alphabet,
                                         const Arc& J, int k, long letter_count,
                                         double log_deriv_lipschitz, double c1_factor,
                                         int cell_grid, const Tolerances& tol) {
    if (k > 8) throw std::invalid_argument("min_distortion_partition: k <= 8 required");
    const long cells = static_cast<long>(std::llround(std::pow(5.0, k)));
    const double cell_len = J.length() / static_cast<double>(cells);

    PartitionResult out;
    out.k = k;

    // One sweep over a shared fine grid: cell boundaries plus interior nodes.
    const long nodes_per_cell = cell_grid;
    const long total = cells * nodes_per_cell + 1;
    double best = std::numeric_limits<double>::infinity();
    long best_j = 0;
    double sum = 0.0;

    std::vector<double> logd(static_cast<std::size_t>(total));
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
        const double x =
            J.lo + J.length() * static_cast<double>(i) / static_cast<double>(total - 1);
        logd[i] = word_log_d1(g, alphabet, x, tol);
    });
    for (long j = 0; j < cells; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (long q = 0; q <= nodes_per_cell; ++q) {
            const double v = logd[static_cast<std::size_t>(j * nodes_per_cell + q)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double d = hi - lo;
        sum += d;
        if (d < best) { best = d; best_j = j; }
    }

    out.j_min = static_cast<int>(best_j);
    out.min_distortion.value = best;
    out.min_distortion.arc = Arc(J.lo + best_j * cell_len, J.lo + (best_j + 1) * cell_len);
    out.min_distortion.grid_size = static_cast<int>(nodes_per_cell);
    out.distortion_sum = sum;

    const double c1 = c1_factor / J.length();  // c1 * L(J) = c1_factor > 1
    out.bound = c1 * log_deriv_lipschitz * J.length() * static_cast<double>(letter_count) /
                static_cast<double>(cells);
    out.pass = best <= out.bound;
    return out;
}

HolderEstimate holder_exponent(const std::vector<std::pair<double, double>>& pairs,
                               const CoverConstants* constants) {
    if (pairs.size() < 20)
        throw std::invalid_argument("holder_exponent: >= 20 pairs required");
    double min_src = std::numeric_limits<double>::infinity(), max_src = 0.0;
    for (const auto& [s, im] : pairs) {
        if (!(s > 0.0 && im > 0.0))
            throw std::invalid_argument("holder_exponent: lengths must be positive");
        min_src = std::min(min_src, s);
        max_src = std::max(max_src, s);
    }
    if (max_src / min_src < 1e3)
        throw std::invalid_argument("holder_exponent: insufficient dynamic range (need >= 3 decades)");

    const std::size_t n = pairs.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(pairs[i].first);
        ys[i] = std::log(pairs[i].second);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    HolderEstimate est;
    est.alpha = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = my + est.alpha * (xs[i] - mx);
        ss_res += (ys[i] - fit) * (ys[i] - fit);
    }
    est.stderr_alpha = std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
    est.conf_low = est.alpha - 2.0 * est.stderr_alpha;
    est.conf_high = est.alpha + 2.0 * est.stderr_alpha;
    if (constants) {
        const double cbar = std::log(constants->M2 / constants->m1) / std::log(constants->m1);
        est.theory_lower_bound = 1.0 / (1.0 + std::max(0.0, cbar));
        est.has_theory_bound = true;
    }
    return est;
}


std::string save_cover(const ExpansionCover& cover) {
    nlohmann::json root;
    root["m1"] = cover.m1;
    root["M1"] = cover.M1;
    root["L"] = cover.L;
    root["M2bar"] = cover.M2bar;
    root["intervals"] = nlohmann::json::array();
    for (const CoverInterval& ci : cover.intervals) {
        nlohmann::json j;
        j["lo"] = ci.arc.lo;
        j["hi"] = ci.arc.hi;
        j["min_d1"] = ci.min_d1;
        j["max_d1"] = ci.max_d1;
        j["max_d2"] = ci.max_d2;
        j["expander"] = nlohmann::json::array();
        for (const Letter& l : ci.expander.letters()) j["expander"].push_back({l.gen, l.exp});
        root["intervals"].push_back(j);
    }
    return root.dump(2);
}

ExpansionCover load_cover(const std::string& json_text, const IndexedAlphabet& alphabet) {
    const nlohmann::json root = nlohmann::json::parse(json_text);
    ExpansionCover cover;
    cover.m1 = root.at("m1").get<double>();
    cover.M1 = root.at("M1").get<double>();
    cover.L = root.at("L").get<double>();
    cover.M2bar = root.at("M2bar").get<double>();
    for (const auto& j : root.at("intervals")) {
        CoverInterval ci;
        ci.arc = Arc(j.at("lo").get<double>(), j.at("hi").get<double>());
        ci.min_d1 = j.at("min_d1").get<double>();
        ci.max_d1 = j.at("max_d1").get<double>();
        ci.max_d2 = j.at("max_d2").get<double>();
        std::vector<Letter> letters;
        for (const auto& l : j.at("expander"))
            letters.push_back(Letter{l.at(0).get<int>(), l.at(1).get<int>()});
        ci.expander = GroupWord(alphabet.id, letters);
        cover.intervals.push_back(std::move(ci));
    }
    return cover;
}

} // namespace circlelab
