#include "circlelab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "circlelab/rng.hpp"

namespace circlelab {

void StepMeasure::validate(double tol) const {
    if (atoms.empty()) throw std::invalid_argument("StepMeasure: no atoms");
    double sum = 0.0;
    for (const auto& [w, p] : atoms) {
        if (!(p > 0.0)) throw std::invalid_argument("StepMeasure: nonpositive mass");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > tol)
        throw std::invalid_argument("StepMeasure: masses do not sum to 1");
}

bool StepMeasure::is_symmetric(double tol) const {
    for (const auto& [w, p] : atoms) {
        const GroupWord inv = w.inverse();
        double q = 0.0;
        for (const auto& [w2, p2] : atoms)
            if (w2.letters() == inv.letters()) q += p2;
        if (std::fabs(q - p) > tol) return false;
    }
    return true;
}

double entropy(const StepMeasure& mu) {
    mu.validate();
    double h = 0.0;
    for (const auto& [w, p] : mu.atoms) h -= p * std::log(p);
    return h;
}

namespace {

std::size_t sample_atom(const StepMeasure& mu, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        acc += mu.atoms[i].second;
        if (u < acc) return i;
    }
    return mu.atoms.size() - 1;
}

} // namespace

std::vector<double> random_orbit(const StepMeasure& mu, const IndexedAlphabet& alphabet,
                                 double x0, long length, std::uint64_t seed,
                                 const Tolerances& tol) {
    mu.validate();
    if (length > 10'000'000L) throw std::invalid_argument("random_orbit: length cap is 1e7");
    std::mt19937_64 rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> orbit;
    orbit.reserve(static_cast<std::size_t>(length));
    double x = wrap01(x0);
    for (long l = 0; l < length; ++l) {
        const GroupWord& f = mu.atoms[sample_atom(mu, unif(rng))].first;
        x = wrap01(x + word_dev_value(f, alphabet, x, tol));
        orbit.push_back(x);
    }
    return orbit;
}

EmpiricalMeasure EmpiricalMeasure::from_samples(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("EmpiricalMeasure: empty sample");
    EmpiricalMeasure m;
    m.points = std::move(samples);
    for (double& x : m.points) x = wrap01(x);
    std::sort(m.points.begin(), m.points.end());
    // Dvoretzky-Kiefer-Wolfowitz at 95%: sup-CDF half width.
    m.half_width = std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(m.points.size())));
    return m;
}

EmpiricalMeasure EmpiricalMeasure::uniform_exact(int nodes) {
    EmpiricalMeasure m;
    m.points.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i)
        m.points[static_cast<std::size_t>(i)] = (i + 0.5) / nodes;
    m.exact = true;
    m.half_width = 1.0 / nodes;  // discretization error per cell
    return m;
}

double EmpiricalMeasure::mass(double lo, double hi) const {
    lo = wrap01(lo);
    hi = wrap01(hi);
    const auto count_below = [&](double x) {
        return static_cast<double>(std::lower_bound(points.begin(), points.end(), x) -
                                   points.begin());
    };
    const double n = static_cast<double>(points.size());
    if (lo <= hi) return (count_below(hi) - count_below(lo)) / n;
    return (n - count_below(lo) + count_below(hi)) / n;  // wraps around 0
}

double EmpiricalMeasure::ks_to_uniform() const {
    const double n = static_cast<double>(points.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i];
        ks = std::max(ks, std::fabs(x - static_cast<double>(i) / n));
        ks = std::max(ks, std::fabs(x - static_cast<double>(i + 1) / n));
    }
    return ks;
}

StationarityResult stationarity_residual(const StepMeasure& mu, const IndexedAlphabet& alphabet,
                                         const EmpiricalMeasure& nu, int cells,
                                         const Tolerances& tol) {
    mu.validate();
    if (cells < 32) throw std::invalid_argument("stationarity_residual: >= 32 cells required");

    // Precompute inverse images of all cell boundaries under each atom.
    std::vector<GroupWord> inverses;
    inverses.reserve(mu.atoms.size());
    for (const auto& [w, p] : mu.atoms) inverses.push_back(w.inverse());

    StationarityResult out;
    out.cells = cells;
    out.half_width = nu.half_width;
    for (int c = 0; c < cells; ++c) {
        const double lo = static_cast<double>(c) / cells;
        const double hi = static_cast<double>(c + 1) / cells;
        const double direct = nu.mass(lo, hi);
        double mixed = 0.0;
        for (std::size_t g = 0; g < mu.atoms.size(); ++g) {
            const double glo = lo + word_dev_value(inverses[g], alphabet, lo, tol);
            const double ghi = hi + word_dev_value(inverses[g], alphabet, hi, tol);
            mixed += mu.atoms[g].second * nu.mass(glo, ghi);
        }
        out.max_residual = std::max(out.max_residual, std::fabs(direct - mixed));
    }
    return out;
}

MartingaleReport martingale_probe(const StepMeasure& mu, const IndexedAlphabet& alphabet,
                                  const EmpiricalMeasure& nu,
                                  const std::function<double(double)>& psi, int num_paths,
                                  int horizon, std::uint64_t seed, double settle_tol,
                                  const Tolerances& tol) {
    mu.validate();
    MartingaleReport rep;
    rep.xi.resize(static_cast<std::size_t>(num_paths));

    // fixed quadrature of nu (subsample when the support is large)
    std::vector<double> nodes;
    const std::size_t max_nodes = 512;
    if (nu.points.size() <= max_nodes) {
        nodes = nu.points;
    } else {
        const std::size_t stride = nu.points.size() / max_nodes;
        for (std::size_t i = 0; i < nu.points.size(); i += stride) nodes.push_back(nu.points[i]);
    }

    int settled = 0;
    std::vector<double> finals;
    for (int path = 0; path < num_paths; ++path) {
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(path));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<std::size_t> choice(static_cast<std::size_t>(horizon));
        for (int l = 0; l < horizon; ++l)
            choice[static_cast<std::size_t>(l)] = sample_atom(mu, unif(rng));

        auto& xi = rep.xi[static_cast<std::size_t>(path)];
        xi.resize(static_cast<std::size_t>(horizon));
        for (int l = 1; l <= horizon; ++l) {
            // word f_1 o ... o f_l applied to each node
            double acc = 0.0;
            for (double q : nodes) {
                double x = q;
                for (int i = l - 1; i >= 0; --i) {
                    const GroupWord& f = mu.atoms[choice[static_cast<std::size_t>(i)]].first;
                    x = wrap01(x + word_dev_value(f, alphabet, x, tol));
                }
                acc += psi(x);
            }
            xi[static_cast<std::size_t>(l - 1)] = acc / static_cast<double>(nodes.size());
        }
        const double fin = xi.back();
        finals.push_back(fin);
        double worst = 0.0;
        for (int l = horizon / 2; l < horizon; ++l)
            worst = std::max(worst, std::fabs(xi[static_cast<std::size_t>(l)] - fin));
        if (worst < settle_tol) ++settled;
    }
    rep.settled_fraction = static_cast<double>(settled) / std::max(1, num_paths);
    const auto [mn, mx] = std::minmax_element(finals.begin(), finals.end());
    rep.cross_path_spread = *mx - *mn;
    rep.horizon_too_short = rep.settled_fraction < 0.95;
    return rep;
}

ContractionWalkReport contraction_along_walk(const StepMeasure& mu,
                                             const IndexedAlphabet& alphabet, int num_paths,
                                             int horizon, std::uint64_t seed, int grid_size,
                                             const Tolerances& tol) {
    mu.validate();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(horizon));
    for (auto& v : c) v.resize(static_cast<std::size_t>(num_paths));

    for (int path = 0; path < num_paths; ++path) {
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(path));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        GroupWord w(alphabet.id);
        for (int l = 0; l < horizon; ++l) {
            const GroupWord& f = mu.atoms[sample_atom(mu, unif(rng))].first;
            w = f * w;  // left walk: f_l o ... o f_1
            c[static_cast<std::size_t>(l)][static_cast<std::size_t>(path)] =
                w.is_identity() ? 0.5
                                : contraction_coefficient(w, alphabet, grid_size, tol).value;
        }
    }

    ContractionWalkReport rep;
    rep.median_c.resize(static_cast<std::size_t>(horizon));
    rep.p95_c.resize(static_cast<std::size_t>(horizon));
    for (int l = 0; l < horizon; ++l) {
        std::vector<double> v = c[static_cast<std::size_t>(l)];
        std::sort(v.begin(), v.end());
        rep.median_c[static_cast<std::size_t>(l)] = v[v.size() / 2];
        rep.p95_c[static_cast<std::size_t>(l)] =
            v[std::min(v.size() - 1, static_cast<std::size_t>(0.95 * v.size()))];
    }
    return rep;
}

double Spike::zeta_at(double x) const {
    const double n = static_cast<double>(zeta.size());
    double t = wrap01(x) * n;
    const std::size_t i = std::min(static_cast<std::size_t>(t), zeta.size() - 1);
    const double frac = t - static_cast<double>(i);
    const std::size_t j = (i + 1) % zeta.size();
    return zeta[i] * (1.0 - frac) + zeta[j] * frac;
}

double Spike::sup_norm() const {
    double s = 0.0;
    for (double v : zeta) s = std::max(s, v);
    return s;
}

Spike Spike::from_word(const GroupWord& g, const IndexedAlphabet& alphabet, int nodes,
                       double r, double a, double Q, double theta, double C,
                       const Tolerances& tol) {
    Spike s;
    s.zeta.resize(static_cast<std::size_t>(nodes));
    const GroupWord ginv = g.inverse();
    for (int i = 0; i < nodes; ++i) {
        const double x = static_cast<double>(i) / nodes;
        s.zeta[static_cast<std::size_t>(i)] = 1.0 + word_dev_jet(ginv, alphabet, x, tol).p1;
    }
    s.r = r;
    s.a = a;
    s.Q = Q;
    s.theta = theta;
    s.C = C;
    s.source = g;
    s.has_source = true;
    return s;
}

SpikeValidation spike_validate(const Spike& s, int grid_size, const Tolerances&) {
    if (grid_size < 1024) throw std::invalid_argument("spike_validate: grid_size >= 1024");
    SpikeValidation v;
    const double sup = s.sup_norm();
    const double plateau = sup / s.C;

    // Condition 1: zeta >= ||zeta||/C on B(a, r).
    double m1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid_size; ++i) {
        const double x = s.a - s.r + 2.0 * s.r * i / grid_size;
        m1 = std::min(m1, s.zeta_at(x) - plateau);
    }
    v.cond1 = m1 >= 0.0;
    v.margin1 = m1;

    // Condition 2: tail bound with the kernel integral over B(a, r).
    // For Q = 0 the factor r^Q is replaced by 1/(1 + |ln r|).
    const double rq = (s.Q == 0.0) ? 1.0 / (1.0 + std::fabs(std::log(s.r)))
                                   : std::pow(s.r, s.Q);
    const double za = s.zeta_at(s.a);
    const int quad = 512;
    double m2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_size; ++i) {
        const double y = static_cast<double>(i) / grid_size;
        if (circle_dist(y, s.a) <= s.r) continue;
        double kernel = 0.0;
        const double h = 2.0 * s.r / quad;
        for (int q = 0; q < quad; ++q) {
            const double x = s.a - s.r + (q + 0.5) * h;
            kernel += h * s.C / std::pow(circle_dist(y, x), s.Q + s.theta);
        }
        const double rhs = za * rq * kernel;
        m2 = std::min(m2, rhs - s.zeta_at(y));
    }
    v.cond2 = m2 >= 0.0;
    v.margin2 = m2;

    // Condition 3: d(y, y') <= r implies zeta(y') < C zeta(y).
    double m3 = std::numeric_limits<double>::infinity();
    const int step_cap = std::max(1, static_cast<int>(std::floor(s.r * grid_size)));
    for (int i = 0; i < grid_size; ++i) {
        const double zi = s.zeta_at(static_cast<double>(i) / grid_size);
        for (int d = -step_cap; d <= step_cap; ++d) {
            const double zj = s.zeta_at(static_cast<double>(i + d) / grid_size);
            m3 = std::min(m3, s.C * zi - zj);
        }
    }
    v.cond3 = m3 > 0.0;
    v.margin3 = m3;

    v.pass = v.cond1 && v.cond2 && v.cond3;
    return v;
}

GreedyUnityResult greedy_unity(const std::vector<Spike>& spikes, double tol_residual,
                               int grid_size, int max_rounds) {
    if (spikes.empty()) throw std::invalid_argument("greedy_unity: no spikes");

    // Coverage precheck feeds the stall diagnostics.
    GreedyUnityResult out;
    out.coefficients.assign(spikes.size(), 0.0);

    // The decomposition runs over unit spikes: zeta / ||zeta||_inf.
    std::vector<std::vector<double>> z(spikes.size());
    for (std::size_t a = 0; a < spikes.size(); ++a) {
        const double sup = spikes[a].sup_norm();
        if (!(sup > 0.0)) throw std::invalid_argument("greedy_unity: spike with vanishing sup");
        z[a].resize(static_cast<std::size_t>(grid_size));
        for (int i = 0; i < grid_size; ++i)
            z[a][static_cast<std::size_t>(i)] =
                spikes[a].zeta_at(static_cast<double>(i) / grid_size) / sup;
    }

    std::vector<double> residual(static_cast<std::size_t>(grid_size), 1.0);
    auto sup_of = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s = std::max(s, x);
        return s;
    };

    double sup = 1.0;
    out.min_intermediate = 0.0;
    for (int round = 0; round < max_rounds && sup >= tol_residual; ++round) {
        const double sup_before = sup;
        // Jacobi round: per-spike steps against the round-start residual,
        // then one joint scaling that preserves positivity. The step stops
        // a shave short of creating an exact zero, which would freeze every
        // later round (the spikes are positive on all of the circle).
        std::vector<double> gamma(spikes.size(), 0.0);
        std::vector<double> round_sum(static_cast<std::size_t>(grid_size), 0.0);
        for (std::size_t a = 0; a < spikes.size(); ++a) {
            double g = std::numeric_limits<double>::infinity();
            for (int i = 0; i < grid_size; ++i) {
                const double zi = z[a][static_cast<std::size_t>(i)];
                if (zi > 1e-300)
                    g = std::min(g, residual[static_cast<std::size_t>(i)] / zi);
            }
            if (!(g > 0.0) || !std::isfinite(g)) g = 0.0;
            gamma[a] = g;
            for (int i = 0; i < grid_size; ++i)
                round_sum[static_cast<std::size_t>(i)] += g * z[a][static_cast<std::size_t>(i)];
        }
        double feasible = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_size; ++i) {
            if (round_sum[static_cast<std::size_t>(i)] > 1e-300)
                feasible = std::min(feasible, residual[static_cast<std::size_t>(i)] /
                                                  round_sum[static_cast<std::size_t>(i)]);
        }
        if (!std::isfinite(feasible)) feasible = 0.0;
        const double s = feasible * (1.0 - 1e-4);
        for (std::size_t a = 0; a < spikes.size(); ++a) out.coefficients[a] += s * gamma[a];
        for (int i = 0; i < grid_size; ++i) {
            residual[static_cast<std::size_t>(i)] -= s * round_sum[static_cast<std::size_t>(i)];
            out.min_intermediate =
                std::min(out.min_intermediate, residual[static_cast<std::size_t>(i)]);
        }
        sup = sup_of(residual);
        out.residual_history.push_back(sup);
        out.rounds = round + 1;
        if (sup > 0.5 * sup_before && sup >= tol_residual) {
            out.stalled = true;
            // report the worst uncovered stretch: argmax of the residual
            int arg = 0;
            for (int i = 0; i < grid_size; ++i)
                if (residual[static_cast<std::size_t>(i)] >
                    residual[static_cast<std::size_t>(arg)])
                    arg = i;
            int lo = arg, hi = arg;
            const double level = 0.5 * residual[static_cast<std::size_t>(arg)];
            while (residual[static_cast<std::size_t>((lo - 1 + grid_size) % grid_size)] > level &&
                   (arg - lo) < grid_size)
                --lo;
            while (residual[static_cast<std::size_t>((hi + 1) % grid_size)] > level &&
                   (hi - arg) < grid_size)
                ++hi;
            out.stall_gap_lo = wrap01(static_cast<double>(lo) / grid_size);
            out.stall_gap_hi = wrap01(static_cast<double>(hi + 1) / grid_size);
            break;
        }
    }
    out.residual = sup;
    return out;
}

StepMeasure GreedyUnityResult::induced_measure(const std::vector<Spike>& spikes) const {
    StepMeasure mu;
    double total = 0.0;
    for (std::size_t a = 0; a < spikes.size(); ++a) {
        if (!spikes[a].has_source || coefficients[a] <= 0.0) continue;
        const double m = coefficients[a] / spikes[a].sup_norm();
        mu.atoms.push_back({spikes[a].source, m});
        total += m;
    }
    if (total <= 0.0) throw std::runtime_error("induced_measure: no word-backed coefficients");
    for (auto& [w, p] : mu.atoms) p /= total;
    return mu;
}


std::string save_step_measure(const StepMeasure& mu) {
    mu.validate();
    nlohmann::json root;
    root["atoms"] = nlohmann::json::array();
    for (const auto& [w, p] : mu.atoms) {
        nlohmann::json a;
        a["mass"] = p;
        a["word"] = nlohmann::json::array();
        for (const Letter& l : w.letters()) a["word"].push_back({l.gen, l.exp});
        root["atoms"].push_back(a);
    }
    return root.dump(2);
}

StepMeasure load_step_measure(const std::string& json_text, const IndexedAlphabet& alphabet) {
    const nlohmann::json root = nlohmann::json::parse(json_text);
    StepMeasure mu;
    for (const auto& a : root.at("atoms")) {
        std::vector<Letter> letters;
        for (const auto& l : a.at("word"))
            letters.push_back(Letter{l.at(0).get<int>(), l.at(1).get<int>()});
        mu.atoms.push_back({GroupWord(alphabet.id, letters), a.at("mass").get<double>()});
    }
    mu.validate();
    return mu;
}

} // namespace circlelab
