#include "circlelab/evaluate.hpp"

#include <cmath>

namespace circlelab {

DevJet word_dev_jet(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
                    const Tolerances& tol) {
    if (!word.is_identity() && word.alphabet_id() != alphabet.id)
        throw std::invalid_argument("word_dev_jet: word/alphabet mismatch");
    DevJet cum = DevJet::identity();
    double y = x;
    const auto& letters = word.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const PrimitiveMap& g = alphabet.at(it->gen);
        const int n = std::abs(it->exp);
        const bool fwd = it->exp > 0;
        for (int i = 0; i < n; ++i) {
            const DevJet step = fwd ? g.dev_jet(y) : g.inv_dev_jet(y, tol);
            cum = compose_dev(step, cum);
            y = x + cum.p0;
        }
    }
    return cum;
}

double word_dev_value(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
                      const Tolerances& tol) {
    if (!word.is_identity() && word.alphabet_id() != alphabet.id)
        throw std::invalid_argument("word_dev_value: word/alphabet mismatch");
    double dev = 0.0;
    const auto& letters = word.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const PrimitiveMap& g = alphabet.at(it->gen);
        const int n = std::abs(it->exp);
        const bool fwd = it->exp > 0;
        for (int i = 0; i < n; ++i) {
            const double y = x + dev;
            dev += fwd ? g.dev_value(y) : g.inv_dev_value(y, tol);
        }
    }
    return dev;
}

Jet3 eval_jet(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
              const Tolerances& tol) {
    return to_jet(x, word_dev_jet(word, alphabet, x, tol));
}

double word_log_d1(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
                   const Tolerances& tol) {
    double dev = 0.0, logd = 0.0;
    const auto& letters = word.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const PrimitiveMap& g = alphabet.at(it->gen);
        const int n = std::abs(it->exp);
        const bool fwd = it->exp > 0;
        for (int i = 0; i < n; ++i) {
            const double y = x + dev;
            const DevJet step = fwd ? g.dev_jet(y) : g.inv_dev_jet(y, tol);
            logd += std::log1p(step.p1);
            dev += step.p0;
        }
    }
    return logd;
}

CollapsedWordMap::CollapsedWordMap(const GroupWord& word, const IndexedAlphabet& alphabet,
                                   const Tolerances& tol)
    : tol_(tol) {
    if (!word.is_identity() && word.alphabet_id() != alphabet.id)
        throw std::invalid_argument("CollapsedWordMap: word/alphabet mismatch");
    // Walk letters in application order (rightmost first), multiplying runs
    // of Moebius matrices into one.
    bool run_open = false;
    double m[4] = {1.0, 0.0, 0.0, 1.0};
    auto flush = [&]() {
        if (!run_open) return;
        // renormalize the accumulated product back to unit determinant
        const double det = m[0] * m[3] - m[1] * m[2];
        if (!(det > 0.0)) throw std::runtime_error("CollapsedWordMap: degenerate product");
        const double s0 = 1.0 / std::sqrt(det);
        Step s;
        s.map = PrimitiveMap::moebius(m[0] * s0, m[1] * s0, m[2] * s0, m[3] * s0, tol_);
        steps_.push_back(s);
        m[0] = 1.0; m[1] = 0.0; m[2] = 0.0; m[3] = 1.0;
        run_open = false;
    };
    const auto& letters = word.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const PrimitiveMap& g = alphabet.at(it->gen);
        if (g.kind == PrimitiveMap::Kind::Moebius) {
            double a = g.m00, b = g.m01, c = g.m10, d = g.m11;
            if (it->exp < 0) std::swap(a, d), b = -b, c = -c;
            const int reps = std::abs(it->exp);
            for (int r = 0; r < reps; ++r) {
                // applied after the open run: left-multiply
                const double n0 = a * m[0] + b * m[2], n1 = a * m[1] + b * m[3];
                const double n2 = c * m[0] + d * m[2], n3 = c * m[1] + d * m[3];
                m[0] = n0; m[1] = n1; m[2] = n2; m[3] = n3;
            }
            run_open = true;
        } else {
            flush();
            Step s;
            s.map = g;
            s.inverse = it->exp < 0;
            s.repeats = std::abs(it->exp);
            steps_.push_back(s);
        }
    }
    flush();
}

DevJet CollapsedWordMap::dev_jet(double x) const {
    DevJet cum = DevJet::identity();
    double y = x;
    for (const Step& s : steps_) {
        for (int r = 0; r < s.repeats; ++r) {
            const DevJet step = s.inverse ? s.map.inv_dev_jet(y, tol_) : s.map.dev_jet(y);
            cum = compose_dev(step, cum);
            y = x + cum.p0;
        }
    }
    return cum;
}

double CollapsedWordMap::dev_value(double x) const {
    double dev = 0.0;
    for (const Step& s : steps_) {
        for (int r = 0; r < s.repeats; ++r) {
            const double y = x + dev;
            dev += s.inverse ? s.map.inv_dev_value(y, tol_) : s.map.dev_value(y);
        }
    }
    return dev;
}

EndpointTrace trace_through(const GroupWord& word, const IndexedAlphabet& alphabet,
                            const Arc& arc, const std::optional<Arc>& domain,
                            const Tolerances& tol) {
    auto check = [&](double lo, double hi) {
        if (domain && (lo < domain->lo || hi > domain->hi))
            throw EvaluabilityError("intermediate image [" + std::to_string(lo) + "," +
                                    std::to_string(hi) + "] exits chart [" +
                                    std::to_string(domain->lo) + "," +
                                    std::to_string(domain->hi) + "]");
    };
    double lo = arc.lo, hi = arc.hi;
    check(lo, hi);
    const auto& letters = word.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        const PrimitiveMap& g = alphabet.at(it->gen);
        const int n = std::abs(it->exp);
        const bool fwd = it->exp > 0;
        for (int i = 0; i < n; ++i) {
            if (fwd) {
                lo += g.dev_value(lo);
                hi += g.dev_value(hi);
            } else {
                lo += g.inv_dev_value(lo, tol);
                hi += g.inv_dev_value(hi, tol);
            }
            check(lo, hi);
        }
    }
    return EndpointTrace{lo, hi};
}

Arc arc_image(const GroupWord& word, const IndexedAlphabet& alphabet, const Arc& arc,
              const Tolerances& tol) {
    EndpointTrace t = trace_through(word, alphabet, arc, std::nullopt, tol);
    return Arc(t.lo, t.hi);
}

} // namespace circlelab
