#include "circlelab/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "circlelab/parallel.hpp"
#include "circlelab/rng.hpp"

namespace circlelab {

int& thread_cap() {
    static int cap = 0;
    return cap;
}

void CascadeConfig::validate_geometry() const {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("cascade: lambda must lie in (0,1)");
    if (!(a > 10.0 * eps0 && eps0 > 0.0))
        throw std::invalid_argument("cascade: infeasible geometry (need a > 10 eps0 > 0)");
    if (n < 1) throw std::invalid_argument("cascade: n >= 1 required");
    const double ln = std::pow(lambda, n);
    if (!(ln * a < a - 5.0 * eps0 && ln < 1.0 / 20.0))
        throw std::invalid_argument("cascade: condition (A) violated");
    if (n > 1) {
        const double lp = std::pow(lambda, n - 1);
        if (lp * a < a - 5.0 * eps0 && lp < 1.0 / 20.0)
            throw std::invalid_argument("cascade: n is not minimal under condition (A)");
    }
    if (!(std::pow(lambda, 2 * n) < 0.1))
        throw std::invalid_argument("cascade: appendix condition lambda^{2n} < 1/10 violated");
}

bool CascadeConfig::condition_C_holds() const {
    const double amp = std::pow(lambda, -n) + 1.0;
    return eps * std::max(amp * C, amp) < margin;
}

void CascadeConfig::validate() const {
    validate_geometry();
    if (!condition_C_holds())
        throw std::invalid_argument("cascade: condition (C) violated");
}

CascadeConfig select_params(double lambda, double a, double eps0, double C, double margin) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("select_params: lambda must lie in (0,1)");
    if (!(a > 10.0 * eps0 && eps0 > 0.0))
        throw std::invalid_argument("select_params: infeasible geometry (need a > 10 eps0 > 0)");
    if (!(C > 0.0)) throw std::invalid_argument("select_params: C > 0 required");

    CascadeConfig cfg;
    cfg.a = a;
    cfg.eps0 = eps0;
    cfg.lambda = lambda;
    cfg.C = C;
    cfg.margin = margin;
    int n = 1;
    for (;; ++n) {
        const double ln = std::pow(lambda, n);
        if (ln * a < a - 5.0 * eps0 && ln < 1.0 / 20.0) break;
        if (n > 64) throw std::runtime_error("select_params: condition (A) unreachable");
    }
    cfg.n = n;
    const double amp = std::pow(lambda, -n) + 1.0;
    cfg.eps = 0.9 * margin / std::max(amp * C, amp);
    cfg.validate();
    return cfg;
}

namespace {

double renormalized_c0_estimate(const GroupWord& w, const IndexedAlphabet& alphabet,
                                double scale, double a, int points, const Tolerances& tol) {
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = -a + 2.0 * a * i / (points - 1);
        best = std::max(best, std::fabs(word_dev_value(w, alphabet, scale * x, tol)) / scale);
    }
    return best;
}

bool poly_compatible(const IndexedAlphabet& alphabet) {
    for (const PrimitiveMap& p : alphabet.gens)
        if (p.kind == PrimitiveMap::Kind::Moebius) return false;
    return true;
}

struct Candidate {
    GroupWord word;
    Provenance prov;
    double c0 = 0.0;
    DevPoly poly;
    bool has_poly = false;
};

} // namespace

std::vector<LevelSet> build_levels(const std::vector<GroupWord>& S0,
                                   const IndexedAlphabet& alphabet,
                                   const CascadeConfig& cfg, const Tolerances& tol) {
    cfg.validate_geometry();
    if (S0.empty()) throw std::invalid_argument("build_levels: empty S0");
    for (const GroupWord& w : S0) {
        const double c0 = renormalized_c0_estimate(w, alphabet, 1.0, cfg.a, cfg.prune_points, tol);
        if (c0 < tol.nonidentity_threshold)
            throw std::invalid_argument("build_levels: S0 member below nonidentity threshold: " +
                                        w.spell());
    }

    const bool use_poly = poly_compatible(alphabet);

    std::vector<LevelSet> levels;
    // Level 0 pseudo-set holding S0 (not returned).
    std::vector<LevelMember> prev2;  // S(k-2) members
    std::vector<LevelMember> prev;   // S(k-1) members
    for (const GroupWord& w : S0) {
        LevelMember m;
        m.word = w;
        if (use_poly) {
            // deviation model of the (unrenormalized) S0 word
            DevPoly p = DevPoly::zero();
            const auto& letters = w.letters();
            for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
                DevPoly lf = DevPoly::leaf(alphabet.at(it->gen));
                if (it->exp < 0) lf = invert_dev_poly(lf);
                const int reps = std::abs(it->exp);
                for (int r = 0; r < reps; ++r) p = compose_dev_poly(lf, p);
            }
            m.poly = p;
            m.has_poly = true;
            m.c0 = p.sup_on(cfg.a);
        } else {
            m.c0 = renormalized_c0_estimate(w, alphabet, 1.0, cfg.a, cfg.prune_points, tol);
        }
        prev.push_back(std::move(m));
    }
    // S0 keeps the caller's order: provenance indices at level 1 refer to it.

    for (int k = 1; k <= cfg.k_max; ++k) {
        // Partner pool: S(k-1) then S(k-2) (S(0) if k == 1 is `prev` itself).
        std::vector<std::pair<const LevelMember*, int>> pool;  // (member, origin k-1/k-2)
        for (const LevelMember& m : prev) pool.push_back({&m, k - 1});
        if (k >= 2) {
            for (const LevelMember& m : prev2) pool.push_back({&m, k - 2});
        }

        // Deterministic enumeration: pairs ordered by combined rank so the
        // largest parents are tried first, then capped.
        struct PairRef { int i, j, s1, s2; };
        std::vector<PairRef> order;
        const int signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
        for (int i = 0; i < static_cast<int>(prev.size()); ++i)
            for (int j = 0; j < static_cast<int>(pool.size()); ++j)
                for (const auto& s : signs) order.push_back({i, j, s[0], s[1]});
        std::stable_sort(order.begin(), order.end(),
                         [](const PairRef& a, const PairRef& b) { return a.i + a.j < b.i + b.j; });

        std::vector<Candidate> cands;
        std::vector<const LevelMember*> cand_parent1, cand_parent2;
        std::vector<int> cand_dist2;  // conjugation distance of the partner (k - origin)
        for (const PairRef& pr : order) {
            if (static_cast<int>(cands.size()) >= cfg.candidate_cap) break;
            const LevelMember& ma = prev[static_cast<std::size_t>(pr.i)];
            const auto& [pm, origin] = pool[static_cast<std::size_t>(pr.j)];
            const GroupWord w1 = pr.s1 > 0 ? ma.word : ma.word.inverse();
            const GroupWord w2 = pr.s2 > 0 ? pm->word : pm->word.inverse();
            GroupWord c = commutator(w1, w2);
            if (c.is_identity()) continue;
            Candidate cd;
            cd.word = std::move(c);
            cd.prov = Provenance{pr.i, pr.j < static_cast<int>(prev.size())
                                           ? pr.j
                                           : pr.j - static_cast<int>(prev.size()),
                                 origin, pr.s1, pr.s2};
            cands.push_back(std::move(cd));
            cand_parent1.push_back(&ma);
            cand_parent2.push_back(pm);
            cand_dist2.push_back(k - origin);
        }

        LevelSet level;
        level.k = k;
        level.candidates_before_prune = static_cast<long>(cands.size());
        if (cands.empty()) {
            level.hard_degenerate = true;
            level.degenerate = true;
            levels.push_back(std::move(level));
            break;  // nothing to build deeper levels from
        }

        const double scale = std::pow(cfg.lambda, static_cast<double>(k) * cfg.n);
        const double lam_n = std::pow(cfg.lambda, cfg.n);
        parallel_for(cands.size(), [&](std::size_t idx) {
            Candidate& cd = cands[idx];
            if (use_poly) {
                // S~(k) member = [ conj(A~, lambda^n), conj(B~, lambda^{dn}) ]
                DevPoly P = cand_parent1[idx]->poly.scale_conjugate(lam_n);
                DevPoly Q = cand_parent2[idx]->poly.scale_conjugate(
                    std::pow(lam_n, cand_dist2[idx]));
                if (cd.prov.sign1 < 0) P = invert_dev_poly(P);
                if (cd.prov.sign2 < 0) Q = invert_dev_poly(Q);
                cd.poly = commutator_dev_poly(P, Q);
                cd.has_poly = true;
                cd.c0 = cd.poly.sup_on(cfg.a);
            } else {
                cd.c0 = renormalized_c0_estimate(cd.word, alphabet, scale, cfg.a,
                                                 cfg.prune_points, tol);
            }
        });

        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
            if (x.c0 != y.c0) return x.c0 > y.c0;
            return x.word.lex_less(y.word);
        });

        std::vector<Candidate> kept;
        for (const Candidate& c : cands)
            if (c.c0 >= tol.nonidentity_threshold) kept.push_back(c);
        if (kept.empty()) {
            level.degenerate = true;  // keep the strongest members, uncertified
            kept.assign(cands.begin(),
                        cands.begin() +
                            std::min<std::size_t>(cands.size(),
                                                  static_cast<std::size_t>(cfg.prune_cap)));
        }
        if (static_cast<int>(kept.size()) > cfg.prune_cap)
            kept.resize(static_cast<std::size_t>(cfg.prune_cap));

        for (Candidate& c : kept) {
            LevelMember m;
            m.word = std::move(c.word);
            m.prov = c.prov;
            m.c0 = c.c0;
            m.poly = std::move(c.poly);
            m.has_poly = c.has_poly;
            level.members.push_back(std::move(m));
        }
        prev2 = std::move(prev);
        prev.assign(level.members.begin(), level.members.end());
        levels.push_back(std::move(level));
    }
    return levels;
}

std::vector<LevelSet> renormalize_levels(const std::vector<LevelSet>& levels,
                                         const GroupWord& F, int n,
                                         const IndexedAlphabet& alphabet,
                                         int fixed_point_grid, const Tolerances& tol) {
    const auto fps = find_fixed_points(F, alphabet, fixed_point_grid, tol);
    const bool has_attracting =
        std::any_of(fps.begin(), fps.end(), [](const FixedPointRecord& r) {
            return r.classification == FixedPointRecord::Type::AttractingHyperbolic;
        });
    if (!has_attracting)
        throw std::invalid_argument("renormalize_levels: F has no attracting hyperbolic fixed point");

    std::vector<LevelSet> out;
    out.reserve(levels.size());
    for (const LevelSet& lv : levels) {
        LevelSet conj = lv;
        const GroupWord Fkn = F.power(lv.k * n);
        for (LevelMember& m : conj.members) m.word = Fkn.inverse() * m.word * Fkn;
        out.push_back(std::move(conj));
    }
    return out;
}

CascadeReport verify_decay(const std::vector<LevelSet>& levels, const CascadeConfig& cfg,
                           const IndexedAlphabet& alphabet, bool order3, int grid_size,
                           CascadeMode mode, const GroupWord* F_ambient,
                           const KoenigsChart* chart, const Tolerances& tol) {
    cfg.validate_geometry();
    if (mode == CascadeMode::Ambient && (F_ambient == nullptr || chart == nullptr))
        throw std::invalid_argument("verify_decay: ambient mode needs F and its Koenigs chart");

    CascadeReport rep;
    if (!cfg.condition_C_holds()) {
        // The decay guarantee presumes the smallness condition; a violating
        // configuration cannot certify and the run is marked FAILED up front.
        CascadeRow row;
        row.k = 0;
        row.status = "FAILED";
        rep.rows.push_back(row);
        rep.failed = true;
    }
    const Arc I = cfg.interval();
    for (const LevelSet& lv : levels) {
        if (lv.hard_degenerate || lv.members.empty()) {
            rep.hard_degenerate = true;
            rep.any_degenerate = true;
            CascadeRow row;
            row.k = lv.k;
            row.status = "degenerate";
            rep.rows.push_back(row);
            break;
        }
        const LevelMember& m = lv.members.front();
        CascadeRow row;
        row.k = lv.k;
        row.letter_bound = (1L << (2 * lv.k)) + 2L * cfg.n * lv.k;

        std::unique_ptr<DevMap> map;
        if (mode == CascadeMode::ExactChart) {
            row.word_len = m.word.length() + 2L * cfg.n * lv.k;
            if (!m.has_poly) {
                const double scale = std::pow(cfg.lambda, static_cast<double>(lv.k) * cfg.n);
                map = std::make_unique<ScaledWordMap>(m.word, alphabet, scale, tol);
            }
        } else {
            const GroupWord Fkn = F_ambient->power(lv.k * cfg.n);
            const GroupWord conj = Fkn.inverse() * m.word * Fkn;
            row.word_len = conj.length();
            map = std::make_unique<ChartConjugatedMap>(conj, alphabet, *chart, tol);
        }

        const std::vector<double> grid = I.grid(grid_size);
        const double h = I.length() / grid_size;
        std::vector<DevJet> jets(grid.size());
        if (mode == CascadeMode::ExactChart && m.has_poly) {
            for (std::size_t i = 0; i < grid.size(); ++i) jets[i] = m.poly.jet(grid[i]);
        } else {
            parallel_for(grid.size(), [&](std::size_t i) { jets[i] = map->dev_jet(grid[i]); });
        }

        double lip3 = 0.0;
        for (std::size_t i = 0; i < jets.size(); ++i) {
            const DevJet& j = jets[i];
            row.c0 = std::max(row.c0, std::fabs(j.p0));
            row.c1 = std::max(row.c1, std::fabs(j.p0) + std::fabs(j.p1));
            row.c2 = std::max(row.c2, std::fabs(j.p0) + std::fabs(j.p1) + std::fabs(j.p2));
            if (order3) row.d3 = std::max(row.d3, std::fabs(j.p3));
            if (i + 1 < jets.size())
                lip3 = std::max(lip3, std::fabs(jets[i + 1].p3));
            lip3 = std::max(lip3, std::fabs(j.p3));
        }
        row.c2_slack = tol.slack_safety * lip3 * h / 2.0;
        if (mode == CascadeMode::Ambient) row.c2_slack += chart->conjugacy_defect();

        row.bound = cfg.eps / std::pow(2.0, std::floor(lv.k / 2.0));
        row.ratio = row.c2 / row.bound;
        if (row.c2 > row.bound + row.c2_slack + 1e-12) {
            row.status = "FAILED";
            rep.failed = true;
        } else if (lv.degenerate) {
            row.status = "sub";
        } else {
            row.status = "ok";
        }
        rep.any_degenerate = rep.any_degenerate || lv.degenerate;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

CommutatorLemmaReport check_commutator_lemmas(const GroupWord& f1, const GroupWord& f2,
                                              const IndexedAlphabet& alphabet, double a,
                                              double eps0, double eps, double C,
                                              int grid_size, const Tolerances& tol) {
    const Arc I(-a, a);
    const Arc shrunk(-a + 5.0 * eps0, a - 5.0 * eps0);

    const CmDistance n1 = cm_distance(f1, alphabet, I, 2, grid_size, std::nullopt, tol);
    const CmDistance n2 = cm_distance(f2, alphabet, I, 2, grid_size, std::nullopt, tol);
    if (n1.value >= eps || n2.value >= eps)
        throw std::invalid_argument("check_commutator_lemmas: pair is not inside the eps-ball");

    CommutatorLemmaReport rep;
    const GroupWord comm = commutator(f1, f2);

    try {
        trace_through(comm, alphabet, shrunk, I, tol);
        rep.evaluable = true;
    } catch (const EvaluabilityError&) {
        rep.evaluable = false;
        return rep;
    }

    const std::vector<double> grid = shrunk.grid(grid_size);
    double sup_d2_comm = 0.0, c1 = 0.0;
    for (double x : grid) {
        const DevJet j = word_dev_jet(comm, alphabet, x, tol);
        c1 = std::max(c1, std::fabs(j.p0) + std::fabs(j.p1));
        sup_d2_comm = std::max(sup_d2_comm, std::fabs(j.p2));
    }

    double d2_1 = 0.0, d2_2 = 0.0;
    for (double x : I.grid(grid_size)) {
        d2_1 = std::max(d2_1, std::fabs(word_dev_jet(f1, alphabet, x, tol).p2));
        d2_2 = std::max(d2_2, std::fabs(word_dev_jet(f2, alphabet, x, tol).p2));
    }

    rep.c1_commutator = c1;
    rep.c1_bound = C * n1.value * n2.value;
    rep.d2_commutator = sup_d2_comm;
    rep.d2_bound = 5.0 * std::max(d2_1, d2_2);
    rep.c1_pass = rep.c1_commutator <= rep.c1_bound;
    rep.d2_pass = rep.d2_commutator <= rep.d2_bound;
    return rep;
}

PrimitiveMap random_trig_in_ball(double eps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    constexpr double kTwoPi = 6.283185307179586476925287;
    const double amp_scale = 0.999 * eps / (2.0 * (1.0 / kTwoPi + 1.0 + kTwoPi));
    const double off_scale = 0.999 * eps / 2.0;
    return PrimitiveMap::trig(off_scale * u(rng), amp_scale * u(rng));
}

Alphabet make_trig_generators(double eps, int count, std::uint64_t seed, bool at_edge) {
    Alphabet gens;
    if (at_edge) {
        constexpr double kTwoPi = 6.283185307179586476925287;
        const double amp = 0.999 * eps / (2.0 * (1.0 / kTwoPi + 1.0 + kTwoPi));
        const double off = 0.999 * eps / 2.0;
        for (int i = 0; i < count; ++i) {
            const double s_off = (i % 2 == 0) ? 1.0 : -1.0;
            const double s_amp = (i % 4 < 2) ? 1.0 : -1.0;
            // stagger magnitudes a little so the set is not symmetric
            const double shrink = 1.0 - 0.05 * i;
            gens.push_back(PrimitiveMap::trig(s_off * off * shrink, s_amp * amp * shrink));
        }
    } else {
        std::mt19937_64 rng = make_rng(seed);
        for (int i = 0; i < count; ++i) gens.push_back(random_trig_in_ball(eps, rng));
    }
    return gens;
}

double calibrate_commutator_constant(double a, double eps0, double eps, int pairs,
                                     std::uint64_t seed, int grid_size,
                                     const Tolerances& tol) {
    const Arc I(-a, a);
    const Arc shrunk(-a + 5.0 * eps0, a - 5.0 * eps0);
    std::mt19937_64 rng = make_rng(seed);

    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        IndexedAlphabet ab(Alphabet{random_trig_in_ball(eps, rng), random_trig_in_ball(eps, rng)});
        const GroupWord f1 = ab.word(0), f2 = ab.word(1);
        const CmDistance n1 = cm_distance(f1, ab, I, 2, grid_size, std::nullopt, tol);
        const CmDistance n2 = cm_distance(f2, ab, I, 2, grid_size, std::nullopt, tol);
        if (n1.value <= 0.0 || n2.value <= 0.0) continue;
        const GroupWord comm = commutator(f1, f2);
        const CmDistance cn = cm_distance(comm, ab, shrunk, 1, grid_size, std::nullopt, tol);
        worst = std::max(worst, cn.value / (n1.value * n2.value));
    }
    if (worst <= 0.0) throw std::runtime_error("calibrate_commutator_constant: degenerate sample");
    return 2.0 * worst;
}

} // namespace circlelab
