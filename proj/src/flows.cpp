#include "circlelab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace circlelab {

double SampledField::eval(double x) const {
    if (x < arc.lo || x > arc.hi) throw std::runtime_error("SampledField: point outside arc");
    const double t = (x - arc.lo) / arc.length() * static_cast<double>(values.size() - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(t), values.size() - 2);
    const double frac = t - static_cast<double>(i);
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

SampledField extract_field(const std::vector<const DevMap*>& maps, const Arc& arc, int m,
                           double C, double cauchy_tol, int grid_size) {
    if (maps.size() < 3)
        throw std::invalid_argument("extract_field: need at least three iterates");
    if (m < 1 || m > 3) throw std::invalid_argument("extract_field: m in {1,2,3}");

    const std::vector<double> grid = arc.grid(grid_size);

    struct Norms {
        double cm = 0.0;
        double cm1 = 0.0;  // order m-1
    };
    auto norms_of = [&](const DevMap& g) {
        Norms nm;
        for (double x : grid) {
            const DevJet j = g.dev_jet(x);
            const double terms[4] = {std::fabs(j.p0), std::fabs(j.p1), std::fabs(j.p2),
                                     std::fabs(j.p3)};
            double s = 0.0;
            for (int i = 0; i <= m; ++i) {
                s += terms[i];
                if (i == m - 1) nm.cm1 = std::max(nm.cm1, s);
            }
            nm.cm = std::max(nm.cm, s);
        }
        return nm;
    };

    std::vector<Norms> nm(maps.size());
    for (std::size_t i = 0; i < maps.size(); ++i) {
        nm[i] = norms_of(*maps[i]);
        if (!(nm[i].cm < 0.1))
            throw std::invalid_argument("extract_field: sequence is not within 0.1 of the identity");
        if (i > 0 && !(nm[i].cm <= nm[i - 1].cm))
            throw std::invalid_argument("extract_field: C^m distances are not decreasing");
        if (nm[i].cm > C * nm[i].cm1)
            throw std::invalid_argument("extract_field: condition 3 violated (C^m > C * C^{m-1})");
    }

    // Normalized deviation profiles of the last three iterates.
    const std::size_t last = maps.size() - 1;
    std::vector<std::vector<double>> X(3, std::vector<double>(grid.size()));
    for (std::size_t w = 0; w < 3; ++w) {
        const DevMap& g = *maps[last - 2 + w];
        const double scale = nm[last - 2 + w].cm;
        for (std::size_t i = 0; i < grid.size(); ++i)
            X[w][i] = g.dev_value(grid[i]) / scale;
    }

    double defect = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        defect = std::max(defect, std::fabs(X[1][i] - X[0][i]));
        defect = std::max(defect, std::fabs(X[2][i] - X[1][i]));
    }
    if (defect > cauchy_tol)
        throw std::runtime_error("extract_field: non-Cauchy tail (defect " +
                                 std::to_string(defect) + ")");

    SampledField f;
    f.arc = arc;
    f.m = m;
    f.cauchy_defect = defect;
    f.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        f.values[i] = (X[0][i] + X[1][i] + X[2][i]) / 3.0;
    // measured lower bound at order m-1 of the averaged field
    double low = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) low = std::max(low, std::fabs(f.values[i]));
    f.norm_lower_bound = low;
    return f;
}

EulerResult euler_flow(const SampledField& field, double x0, double t, int steps) {
    if (steps < 1) throw std::invalid_argument("euler_flow: steps >= 1");
    const double h = t / steps;
    double x = x0;
    for (int i = 0; i < steps; ++i) {
        x += h * field.eval(x);  // eval throws if the trajectory exits the arc
    }
    // Lipschitz constant of the field from its grid differences.
    double lip = 0.0;
    const double gh = field.arc.length() / static_cast<double>(field.values.size() - 1);
    for (std::size_t i = 0; i + 1 < field.values.size(); ++i)
        lip = std::max(lip, std::fabs(field.values[i + 1] - field.values[i]) / gh);
    EulerResult r;
    r.value = x;
    r.error_bound = lip * t * t / steps;
    return r;
}

namespace {

TranslationReport translation_limit_impl(const DevMap& G, double lambda, const Arc& arc,
                                         int j_max, int grid_size, double nonid_threshold) {
    const double disp = G.dev_value(0.0);
    if (std::fabs(disp) < nonid_threshold)
        throw std::invalid_argument("translation_limit: g fixes the reference point (g(p) = p)");

    TranslationReport rep;
    for (int j = 0; j <= j_max; ++j) {
        const double s = std::pow(lambda, j);
        TranslationRow row;
        row.j = j;
        row.translation = disp / s;
        double c0 = 0.0, c1 = 0.0, d2 = 0.0, dev_sum = 0.0;
        for (double u : arc.grid(grid_size)) {
            const DevJet g = G.dev_jet(s * u);
            // deviation of lambda^{-j} G(lambda^j u) from u + translation
            const double dv = g.p0 / s - row.translation;
            const double d1 = g.p1;
            c0 = std::max(c0, std::fabs(dv));
            c1 = std::max(c1, std::fabs(dv) + std::fabs(d1));
            d2 = std::max(d2, std::fabs(g.p2 * s));
            dev_sum = std::max(dev_sum, std::fabs(g.p0 / s) + std::fabs(d1));
        }
        row.c0_dist = c0;
        row.c1_dist = c1;
        row.kappa_rule_fired = d2 <= dev_sum;
        if (row.kappa_rule_fired && rep.kappa < 0 && j >= 1) rep.kappa = j;
        rep.rows.push_back(row);
    }
    return rep;
}

class ShiftedMap final : public DevMap {
public:
    ShiftedMap(const DevMap& base, double center) : base_(&base), center_(center) {}
    DevJet dev_jet(double x) const override { return base_->dev_jet(x + center_); }
    double dev_value(double x) const override { return base_->dev_value(x + center_); }

private:
    const DevMap* base_;
    double center_;
};

} // namespace

TranslationReport translation_limit(const GroupWord& g, const IndexedAlphabet& alphabet,
                                    const KoenigsChart& chart, const Arc& chart_arc,
                                    int j_max, int grid_size, const Tolerances& tol) {
    ChartConjugatedMap G(g, alphabet, chart, tol);
    return translation_limit_impl(G, chart.lambda(), chart_arc, j_max, grid_size,
                                  tol.nonidentity_threshold);
}

TranslationReport translation_limit_linear(const GroupWord& g, const IndexedAlphabet& alphabet,
                                           double lambda, const Arc& arc, int j_max,
                                           int grid_size, const Tolerances& tol) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("translation_limit_linear: lambda in (0,1)");
    WordMap G(g, alphabet, tol);
    return translation_limit_impl(G, lambda, arc, j_max, grid_size, tol.nonidentity_threshold);
}

} // namespace circlelab
