// Group elements as reduced signed words over a generator alphabet. Words are
// the universal currency: every operation downstream consumes them.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circlelab/primitive.hpp"

namespace circlelab {

struct Letter {
    int gen = 0;  // index into the alphabet
    int exp = 0;  // nonzero exponent
    friend bool operator==(const Letter&, const Letter&) = default;
};

// Letters are stored in composition order: the leftmost letter is the
// outermost map, the rightmost is applied first.
class GroupWord {
public:
    GroupWord() = default;
    explicit GroupWord(int alphabet_id) : alphabet_id_(alphabet_id) {}
    GroupWord(int alphabet_id, std::vector<Letter> letters);

    static GroupWord generator(int alphabet_id, int gen, int exp = 1);

    const std::vector<Letter>& letters() const { return letters_; }
    int alphabet_id() const { return alphabet_id_; }
    bool is_identity() const { return letters_.empty(); }

    // Word length = sum of |exponent|: the letter count of the spelling.
    long length() const;

    GroupWord inverse() const;
    GroupWord operator*(const GroupWord& rhs) const;  // composition: this after rhs
    GroupWord power(int k) const;
    GroupWord conjugate(const GroupWord& by) const;   // by^{-1} * this * by

    // Deterministic ordering for tie-breaking (lexicographic on letters).
    bool lex_less(const GroupWord& other) const;

    std::string spell() const;

private:
    void reduce();

    int alphabet_id_ = 0;
    std::vector<Letter> letters_;
};

// [w1, w2] = w1 * w2 * w1^{-1} * w2^{-1}, reduced.
GroupWord commutator(const GroupWord& w1, const GroupWord& w2);

// Alphabets carry an id so that word/alphabet mismatches are caught early.
struct IndexedAlphabet {
    int id = 0;
    Alphabet gens;

    IndexedAlphabet() = default;
    explicit IndexedAlphabet(Alphabet g);

    const PrimitiveMap& at(int i) const { return gens.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(gens.size()); }

    GroupWord word(int gen, int exp = 1) const { return GroupWord::generator(id, gen, exp); }
    GroupWord id_word() const { return GroupWord(id); }
};

} // namespace circlelab
