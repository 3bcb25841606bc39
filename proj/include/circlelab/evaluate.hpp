// Word evaluation: deviation jets of group words, renormalized (rescaled)
// words, and pseudogroup evaluability checks.
#pragma once

#include <memory>
#include <optional>
#include <stdexcept>

#include "circlelab/arc.hpp"
#include "circlelab/jet.hpp"
#include "circlelab/word.hpp"

namespace circlelab {

// Arc left the configured chart while composing letters. Distinct from
// numeric failure (Newton non-convergence etc.), which throws runtime_error.
class EvaluabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Common currency for everything that measures maps: a map of (part of) the
// line carrying deviation jets.
class DevMap {
public:
    virtual ~DevMap() = default;
    virtual DevJet dev_jet(double x) const = 0;
    virtual double dev_value(double x) const = 0;
    double value(double x) const { return x + dev_value(x); }
};

// Deviation jet of the lift of `word` at x. Letters compose right-to-left;
// negative exponents use Newton inversion of the corresponding primitive.
DevJet word_dev_jet(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
                    const Tolerances& tol = default_tolerances());
double word_dev_value(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
                      const Tolerances& tol = default_tolerances());

// Lift jet of the word at x (public face of the deviation machinery).
Jet3 eval_jet(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
              const Tolerances& tol = default_tolerances());

// log D1 of the word at x, accumulated letter by letter. Deviation jets
// saturate once D1 leaves [ulp(1), 1/ulp(1)]; long hyperbolic words need the
// log channel.
double word_log_d1(const GroupWord& word, const IndexedAlphabet& alphabet, double x,
                   const Tolerances& tol = default_tolerances());

class WordMap final : public DevMap {
public:
    WordMap(GroupWord word, const IndexedAlphabet& alphabet,
            const Tolerances& tol = default_tolerances())
        : word_(std::move(word)), alphabet_(&alphabet), tol_(tol) {
        if (!word_.is_identity() && word_.alphabet_id() != alphabet.id)
            throw std::invalid_argument("WordMap: word/alphabet mismatch");
    }

    DevJet dev_jet(double x) const override { return word_dev_jet(word_, *alphabet_, x, tol_); }
    double dev_value(double x) const override { return word_dev_value(word_, *alphabet_, x, tol_); }

    const GroupWord& word() const { return word_; }
    const IndexedAlphabet& alphabet() const { return *alphabet_; }

private:
    GroupWord word_;
    const IndexedAlphabet* alphabet_;
    Tolerances tol_;
};

// x -> s^{-1} w(s x): the exact-chart renormalization of a word by the linear
// model of a hyperbolic element.
class ScaledWordMap final : public DevMap {
public:
    ScaledWordMap(GroupWord word, const IndexedAlphabet& alphabet, double scale,
                  const Tolerances& tol = default_tolerances())
        : word_(std::move(word)), alphabet_(&alphabet), scale_(scale), tol_(tol) {
        if (!(scale > 0.0)) throw std::invalid_argument("ScaledWordMap: scale must be positive");
    }

    DevJet dev_jet(double x) const override {
        return rescale_dev(word_dev_jet(word_, *alphabet_, scale_ * x, tol_), scale_);
    }
    double dev_value(double x) const override {
        return word_dev_value(word_, *alphabet_, scale_ * x, tol_) / scale_;
    }

    const GroupWord& word() const { return word_; }
    double scale() const { return scale_; }

private:
    GroupWord word_;
    const IndexedAlphabet* alphabet_;
    double scale_;
    Tolerances tol_;
};

// Evaluation plan with consecutive Moebius letters collapsed by matrix
// multiplication. Agrees with plain letter-by-letter evaluation to 1e-12.
class CollapsedWordMap final : public DevMap {
public:
    CollapsedWordMap(const GroupWord& word, const IndexedAlphabet& alphabet,
                     const Tolerances& tol = default_tolerances());

    DevJet dev_jet(double x) const override;
    double dev_value(double x) const override;
    std::size_t step_count() const { return steps_.size(); }

private:
    struct Step {
        PrimitiveMap map;  // collapsed Moebius product or a single primitive
        bool inverse = false;
        int repeats = 1;
    };
    std::vector<Step> steps_;
    Tolerances tol_;
};

// Checks that every intermediate image of [arc] under the letters of `word`
// stays inside `domain` (monotonicity makes endpoint tracking sufficient).
// Returns the image arc endpoints; throws EvaluabilityError on escape.
struct EndpointTrace {
    double lo = 0.0;
    double hi = 0.0;
};
EndpointTrace trace_through(const GroupWord& word, const IndexedAlphabet& alphabet,
                            const Arc& arc, const std::optional<Arc>& domain,
                            const Tolerances& tol = default_tolerances());

// Image of an arc under a word (endpoint lifts).
Arc arc_image(const GroupWord& word, const IndexedAlphabet& alphabet, const Arc& arc,
              const Tolerances& tol = default_tolerances());

} // namespace circlelab
