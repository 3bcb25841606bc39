#include "scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "circlelab/alphabet_io.hpp"
#include "circlelab/cascade.hpp"
#include "circlelab/csv.hpp"
#include "circlelab/ergodic.hpp"
#include "circlelab/expansion.hpp"
#include "circlelab/flows.hpp"
#include "circlelab/parallel.hpp"
#include "circlelab/rng.hpp"

namespace circlelab::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "circlelab 0.1.0";

struct Context {
    json config;          // resolved config (written to the manifest)
    std::string out_dir;
    std::uint64_t seed = 1;
    int grid = 0;
    std::uint64_t manifest_hash = 0;
    bool any_failed = false;
    std::vector<std::string> summary;

    int grid_or(int dflt) const { return grid > 0 ? grid : dflt; }

    void note(const std::string& check, bool pass, const std::string& detail) {
        summary.push_back(std::string(pass ? "[PASS] " : "[FAIL] ") + check +
                          (detail.empty() ? "" : " (" + detail + ")"));
        if (!pass) any_failed = true;
        std::cout << summary.back() << "\n";
    }

    CsvTable table(const std::string& name, std::vector<std::string> columns) const {
        CsvTable t;
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(manifest_hash));
        t.comments.push_back(std::string("manifest ") + hash);
        t.comments.push_back(std::string(kVersion) + " table=" + name);
        t.comments.push_back(
            "defaults: newton_tol=1e-13 root_tol=1e-12 parabolic_margin=1e-6 "
            "nonidentity_threshold=1e-9 koenigs_stop=1e-10");
        t.columns = std::move(columns);
        return t;
    }

    void emit(const CsvTable& t, const std::string& file, bool json_mirror) const {
        t.write(out_dir + "/" + file);
        if (json_mirror) {
            json j;
            j["columns"] = t.columns;
            j["rows"] = t.rows;
            std::ofstream(out_dir + "/" + file + ".json") << j.dump(2);
        }
    }
};

json get_params(const json& cfg) {
    return cfg.contains("params") ? cfg.at("params") : json::object();
}

double jget(const json& p, const char* key, double dflt) {
    return p.contains(key) ? p.at(key).get<double>() : dflt;
}
long jgetl(const json& p, const char* key, long dflt) {
    return p.contains(key) ? p.at(key).get<long>() : dflt;
}

IndexedAlphabet alphabet_or(const json& cfg, Alphabet dflt) {
    if (cfg.contains("alphabet")) return load_alphabet(cfg.at("alphabet").dump());
    return IndexedAlphabet(std::move(dflt));
}

Alphabet two_hyperbolic() {
    return Alphabet{PrimitiveMap::moebius_diag(2.0),
                    PrimitiveMap::moebius(1.25, 0.75, 0.75, 1.25)};
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- cascade --
void run_cascade(Context& ctx, bool json_mirror) {
    const json p = get_params(ctx.config);
    const double a = jget(p, "a", 0.2);
    const double eps0 = jget(p, "eps0", a / 20.0);
    const double lambda = jget(p, "lambda", 0.04);
    const double margin = jget(p, "margin", 0.1);
    const double eps_factor = jget(p, "eps_factor", 1.0);
    const int k_max = static_cast<int>(jgetl(p, "k_max", 8));
    const int gen_count = static_cast<int>(jgetl(p, "gen_count", 3));
    const int calib_pairs = static_cast<int>(jgetl(p, "calibration_pairs", 200));
    const bool order3 = p.contains("order3") ? p.at("order3").get<bool>() : true;

    const double C = calibrate_commutator_constant(a, eps0, 0.01, calib_pairs, ctx.seed + 1);
    CascadeConfig cfg = select_params(lambda, a, eps0, C, margin);
    cfg.k_max = k_max;
    cfg.prune_cap = static_cast<int>(jgetl(p, "prune_cap", 16));
    cfg.eps *= eps_factor;  // negative controls push eps past condition (C)

    IndexedAlphabet ab =
        alphabet_or(ctx.config, make_trig_generators(cfg.eps, gen_count, ctx.seed));
    std::vector<GroupWord> S0;
    for (int i = 0; i < ab.size(); ++i) S0.push_back(ab.word(i));

    std::vector<LevelSet> levels;
    try {
        levels = build_levels(S0, ab, cfg);
    } catch (const std::invalid_argument& e) {
        ctx.note("cascade: S0 accepted", false, e.what());
        return;
    }

    const CascadeReport rep = verify_decay(levels, cfg, ab, order3, ctx.grid_or(512));

    CsvTable t = ctx.table(
        "cascade", {"k", "word_len", "c0", "c1", "c2", "c3", "bound", "ratio", "status"});
    t.comments.push_back("params: lambda=" + fmt(lambda) + " n=" + std::to_string(cfg.n) +
                         " eps=" + fmt(cfg.eps) + " C=" + fmt(C) + " a=" + fmt(a) +
                         " eps0=" + fmt(eps0) + " margin=" + fmt(margin));
    t.comments.push_back("c0..c2 are cumulative C^m distances; c3 is sup |D3 (g - id)|");
    for (const auto& r : rep.rows) {
        t.rows.push_back({std::to_string(r.k), std::to_string(r.word_len), fmt(r.c0), fmt(r.c1),
                          fmt(r.c2), fmt(r.d3), fmt(r.bound), fmt(r.ratio), r.status});
    }
    ctx.emit(t, "cascade.csv", json_mirror);

    ctx.note("cascade: condition (C)", cfg.condition_C_holds(), "");
    ctx.note("cascade: no hard-degenerate level", !rep.hard_degenerate, "");
    // degeneration at level 1 contradicts the declared non-solvability of S0
    // (an abelian alphabet shows up exactly this way)
    ctx.note("cascade: level 1 certified nonidentity",
             !levels.empty() && !levels[0].degenerate, "");
    ctx.note("cascade: decay bound rows", !rep.failed, "");
}

// -------------------------------------------------------------- distortion --
void run_distortion(Context& ctx, bool json_mirror) {
    const json p = get_params(ctx.config);
    IndexedAlphabet ab = alphabet_or(ctx.config, two_hyperbolic());
    const double lambda = jget(p, "lambda", 0.25);
    const double jlo = jget(p, "J_lo", 0.1), jhi = jget(p, "J_hi", 0.35);
    const int k_lo = static_cast<int>(jgetl(p, "k_min", 2));
    const int k_hi = static_cast<int>(jgetl(p, "k_max", 6));

    CascadeConfig cfg =
        select_params(lambda, jget(p, "a", 0.2), jget(p, "eps0", 0.01), jget(p, "C", 2.0));
    cfg.k_max = k_hi;
    std::vector<GroupWord> S0;
    for (int i = 0; i < ab.size(); ++i) S0.push_back(ab.word(i));
    const auto levels = build_levels(S0, ab, cfg);
    const double C = alphabet_log_lipschitz(ab);
    const GroupWord F = ab.word(0);
    const Arc J(jlo, jhi);

    CsvTable t = ctx.table("distortion", {"k", "j_min", "distortion", "bound", "pass"});
    bool all_pass = true;
    double prev_bound = 1e300;
    bool bound_decreasing = true;
    for (int k = k_lo; k <= k_hi && k <= static_cast<int>(levels.size()); ++k) {
        const auto& lv = levels[static_cast<std::size_t>(k - 1)];
        if (lv.members.empty()) break;
        const GroupWord g = lv.members[0].word.conjugate(F.power(k * cfg.n));
        const long l = (1L << (2 * k)) + 2L * cfg.n * k;
        const PartitionResult r = min_distortion_partition(g, ab, J, k, l, C);
        t.rows.push_back({std::to_string(k), std::to_string(r.j_min),
                          fmt(r.min_distortion.value), fmt(r.bound), r.pass ? "1" : "0"});
        all_pass = all_pass && r.pass;
        if (k > k_lo) bound_decreasing = bound_decreasing && r.bound < prev_bound;
        prev_bound = r.bound;
    }
    ctx.emit(t, "distortion.csv", json_mirror);
    ctx.note("distortion: min-cell bound", all_pass, "");
    ctx.note("distortion: bound column decreasing", bound_decreasing, "");
}

// --------------------------------------------------------------- expansion --
void run_expansion(Context& ctx, bool json_mirror) {
    const json p = get_params(ctx.config);
    IndexedAlphabet ab = alphabet_or(ctx.config, two_hyperbolic());
    const int cap = static_cast<int>(jgetl(p, "word_length_cap", 2));
    const double margin = jget(p, "scan_margin", 0.05);
    const int sources = static_cast<int>(jgetl(p, "sources", 100));

    const ScanResult scan = expandability_scan(ab, cap, ctx.grid_or(256), margin);
    if (!scan.non_expandable.empty()) {
        ctx.note("expansion: all cells expandable", false,
                 std::to_string(scan.non_expandable.size()) + " cells fail at cap " +
                     std::to_string(cap));
        return;
    }
    const ExpansionCover cover = build_cover(scan, ab);
    ctx.note("expansion: cover built", cover.size() >= 3,
             "s=" + std::to_string(cover.size()) + " m1=" + fmt(cover.m1) +
                 " L=" + fmt(cover.L));

    CsvTable t =
        ctx.table("expansion", {"source_lo", "source_len", "steps", "step_bound", "image_len",
                                "sup_d2", "bound_m1", "bound_power", "pass"});
    std::mt19937_64 rng = make_rng(ctx.seed, 2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool all_pass = true;
    for (int i = 0; i < sources; ++i) {
        const double lo = unif(rng);
        const double len = cover.L * std::pow(10.0, -3.0 * unif(rng));
        const Magnification mag = magnify(cover, ab, Arc(lo, lo + len));
        const D2GrowthRow row = d2_growth_check(mag, cover, ab);
        const bool ok = row.pass && mag.image.length() >= cover.L &&
                        mag.image.length() <= cover.L * cover.M1 && mag.steps <= mag.step_bound;
        all_pass = all_pass && ok;
        t.rows.push_back({fmt(lo), fmt(len), std::to_string(mag.steps),
                          std::to_string(mag.step_bound), fmt(mag.image.length()),
                          fmt(row.sup_d2), fmt(row.bound_m1), fmt(row.bound_power),
                          ok ? "1" : "0"});
    }
    ctx.emit(t, "expansion.csv", json_mirror);
    ctx.note("expansion: magnification + growth rows", all_pass, "");
}

// -------------------------------------------------------------------- flow --
void run_flow(Context& ctx, bool json_mirror) {
    const json p = get_params(ctx.config);
    const double a = jget(p, "a", 0.2);
    const double eps0 = jget(p, "eps0", a / 20.0);
    const double lambda = jget(p, "lambda", 0.04);
    const int k_max = static_cast<int>(jgetl(p, "k_max", 6));
    const int j_max = static_cast<int>(jgetl(p, "j_max", 8));

    const double C = calibrate_commutator_constant(a, eps0, 0.01, 100, ctx.seed + 1);
    CascadeConfig cfg = select_params(lambda, a, eps0, C);
    cfg.k_max = k_max;
    IndexedAlphabet ab = alphabet_or(ctx.config, make_trig_generators(cfg.eps, 3, ctx.seed));
    std::vector<GroupWord> S0;
    for (int i = 0; i < ab.size(); ++i) S0.push_back(ab.word(i));
    const auto levels = build_levels(S0, ab, cfg);

    std::vector<DevPoly> polys;
    for (const auto& lv : levels) {
        if (lv.members.empty() || !lv.members[0].has_poly) break;
        DevPoly q = lv.members[0].poly;
        if (q.eval(0.0) < 0.0) q = invert_dev_poly(q);
        polys.push_back(std::move(q));
    }
    if (polys.size() >= 3) {
        std::vector<PolyDevMap> maps;
        for (const auto& q : polys) maps.emplace_back(q);
        std::vector<const DevMap*> ptrs;
        for (auto& m : maps) ptrs.push_back(&m);
        try {
            const SampledField f = extract_field(ptrs, Arc(-a, a), 2, 2.0 * std::max(C, 1.0));
            ctx.note("flow: cascade-tail field extracted", true,
                     "defect=" + fmt(f.cauchy_defect));
            const EulerResult e = euler_flow(f, 0.0, 0.05, 200);
            ctx.note("flow: euler step inside arc", std::fabs(e.value) <= a, "");
        } catch (const std::exception& ex) {
            ctx.note("flow: field extraction", false, ex.what());
        }
    }

    // translation limit of a small rotation in the exact linear model
    IndexedAlphabet rot(Alphabet{PrimitiveMap::rotation(jget(p, "g_angle", 0.001))});
    const TranslationReport rep =
        translation_limit_linear(rot.word(0), rot, lambda, Arc(-a / 2, a / 2), j_max);
    CsvTable t = ctx.table("flow", {"j", "c0_dist", "c1_dist", "kappa_rule_fired"});
    bool decays = true;
    for (const auto& r : rep.rows) {
        t.rows.push_back({std::to_string(r.j), fmt(r.c0_dist), fmt(r.c1_dist),
                          r.kappa_rule_fired ? "1" : "0"});
        decays = decays && r.c1_dist <= 1e-9;
    }
    ctx.emit(t, "flow.csv", json_mirror);
    ctx.note("flow: rotation conjugates are translations", decays, "");
}

// -------------------------------------------------------------------- walk --
void run_walk(Context& ctx, bool json_mirror) {
    const json p = get_params(ctx.config);
    IndexedAlphabet ab = alphabet_or(ctx.config, two_hyperbolic());
    const long length = jgetl(p, "length", 1000000);
    const int horizon = static_cast<int>(jgetl(p, "horizon", 50));
    const int paths = static_cast<int>(jgetl(p, "paths", 20));

    StepMeasure mu;
    const double mass = 1.0 / (2.0 * ab.size());
    for (int i = 0; i < ab.size(); ++i) {
        mu.atoms.push_back({ab.word(i), mass});
        mu.atoms.push_back({ab.word(i, -1), mass});
    }

    const auto orbit = random_orbit(mu, ab, 0.1, length, ctx.seed);
    const auto nu = EmpiricalMeasure::from_samples(orbit);
    const auto st = stationarity_residual(mu, ab, nu, 32);
    ctx.note("walk: stationarity residual < 3 half-widths",
             st.max_residual < 3.0 * st.half_width,
             "residual=" + fmt(st.max_residual) + " hw=" + fmt(st.half_width));

    const auto cw =
        contraction_along_walk(mu, ab, paths, horizon, ctx.seed + 3, ctx.grid_or(256));
    CsvTable t = ctx.table("walk", {"l", "median_c", "p95_c"});
    for (int l = 0; l < horizon; ++l)
        t.rows.push_back({std::to_string(l + 1), fmt(cw.median_c[static_cast<std::size_t>(l)]),
                          fmt(cw.p95_c[static_cast<std::size_t>(l)])});
    ctx.emit(t, "walk.csv", json_mirror);
    ctx.note("walk: median contraction < 0.1 at horizon", cw.median_c.back() < 0.1,
             "c=" + fmt(cw.median_c.back()));
}

// ------------------------------------------------------------------ spikes --
void run_spikes(Context& ctx, bool json_mirror) {
    const json p = get_params(ctx.config);
    const int copies = static_cast<int>(jgetl(p, "copies", 16));
    const double s = jget(p, "strength", 1.5);
    const double r = jget(p, "radius", 0.22);
    const double cap_c = jget(p, "C", 4.0);
    const double tol = jget(p, "tol", 1e-3);

    IndexedAlphabet ab(
        Alphabet{PrimitiveMap::moebius_diag(s), PrimitiveMap::rotation(1.0 / copies)});
    std::vector<Spike> spikes;
    const bool non_covering =
        p.contains("non_covering") && p.at("non_covering").get<bool>();
    if (non_covering) {
        // negative control: one compactly supported bump
        Spike sp;
        sp.zeta.assign(2048, 0.0);
        for (int i = 0; i < 2048; ++i) {
            const double x = i / 2048.0;
            const double d = circle_dist(x, 0.2);
            sp.zeta[static_cast<std::size_t>(i)] =
                d < 0.05 ? std::cos(d / 0.05 * 1.5707963267948966) : 0.0;
        }
        sp.a = 0.2;
        sp.r = 0.04;
        sp.C = 2.0;
        spikes.push_back(std::move(sp));
    } else {
        for (int j = 0; j < copies; ++j)
            spikes.push_back(Spike::from_word(ab.word(0).conjugate(ab.word(1, -j)), ab, 4096, r,
                                              static_cast<double>(j) / copies, 1.0, 1.0, cap_c));
    }

    CsvTable t = ctx.table(
        "spikes", {"index", "a", "r", "C", "pass", "margin1", "margin2", "margin3"});
    bool all_valid = true;
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        const auto v = spike_validate(spikes[i], 1024);
        all_valid = all_valid && v.pass;
        t.rows.push_back({std::to_string(i), fmt(spikes[i].a), fmt(spikes[i].r),
                          fmt(spikes[i].C), v.pass ? "1" : "0", fmt(v.margin1), fmt(v.margin2),
                          fmt(v.margin3)});
    }
    ctx.emit(t, "spikes.csv", json_mirror);
    if (!non_covering) ctx.note("spikes: family validates", all_valid, "");

    const auto g = greedy_unity(spikes, tol);
    ctx.note("spikes: greedy unity converged", !g.stalled,
             g.stalled ? "gap [" + fmt(g.stall_gap_lo) + "," + fmt(g.stall_gap_hi) + "]"
                       : "residual=" + fmt(g.residual) + " rounds=" + std::to_string(g.rounds));
    ctx.note("spikes: intermediate residuals nonnegative", g.min_intermediate >= 0.0, "");
    if (!g.stalled && !non_covering) {
        const StepMeasure mu = g.induced_measure(spikes);
        const auto st = stationarity_residual(mu, ab, EmpiricalMeasure::uniform_exact(4096), 32);
        ctx.note("spikes: induced measure stationary vs uniform",
                 st.max_residual < 3.0 * st.half_width,
                 "residual=" + fmt(st.max_residual) + " hw=" + fmt(st.half_width));
    }
}

} // namespace

int run_scenarios(const RunOptions& opts) {
    Context ctx;
    ctx.out_dir = opts.out_dir;
    ctx.grid = opts.grid;
    thread_cap() = opts.threads;

    json cfg = json::object();
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) {
            std::cerr << "config error: cannot open " << opts.config_path << "\n";
            return 2;
        }
        try {
            in >> cfg;
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string k = it.key();
        if (k != "scenario" && k != "alphabet" && k != "seed" && k != "grid" && k != "params") {
            std::cerr << "config error: unknown key '" << k << "'\n";
            return 2;
        }
    }
    std::string scenario = opts.scenario;
    if (scenario == "all" && cfg.contains("scenario") && cfg.at("scenario").is_string())
        scenario = cfg.at("scenario").get<std::string>();
    ctx.seed = opts.seed_overridden
                   ? opts.seed
                   : (cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : opts.seed);
    if (ctx.grid == 0 && cfg.contains("grid")) ctx.grid = cfg.at("grid").get<int>();
    ctx.config = cfg;
    ctx.config["scenario"] = scenario;
    ctx.config["seed"] = ctx.seed;

    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) {
        std::cerr << "config error: cannot create out dir " << ctx.out_dir << "\n";
        return 2;
    }
    ctx.manifest_hash = fnv1a(ctx.config.dump());

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (scenario == "cascade" || scenario == "all") run_cascade(ctx, opts.json_mirror);
        if (scenario == "distortion" || scenario == "all") run_distortion(ctx, opts.json_mirror);
        if (scenario == "expansion" || scenario == "all") run_expansion(ctx, opts.json_mirror);
        if (scenario == "flow" || scenario == "all") run_flow(ctx, opts.json_mirror);
        if (scenario == "walk" || scenario == "all") run_walk(ctx, opts.json_mirror);
        if (scenario == "spikes" || scenario == "all") run_spikes(ctx, opts.json_mirror);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        ctx.note(scenario + ": completed", false, e.what());
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["config"] = ctx.config;
    manifest["seed"] = ctx.seed;
    manifest["version"] = kVersion;
    manifest["wall_time_s"] = wall;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(ctx.manifest_hash));
    manifest["hash"] = hash;
    manifest["summary"] = ctx.summary;
    std::ofstream(ctx.out_dir + "/manifest.json") << manifest.dump(2) << "\n";

    return ctx.any_failed ? 1 : 0;
}

} // namespace circlelab::cli
