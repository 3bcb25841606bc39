#include "circlelab/word.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace circlelab {

GroupWord::GroupWord(int alphabet_id, std::vector<Letter> letters)
    : alphabet_id_(alphabet_id), letters_(std::move(letters)) {
    reduce();
}

GroupWord GroupWord::generator(int alphabet_id, int gen, int exp) {
    GroupWord w(alphabet_id);
    if (exp != 0) w.letters_.push_back(Letter{gen, exp});
    return w;
}

void GroupWord::reduce() {
    std::vector<Letter> out;
    out.reserve(letters_.size());
    for (const Letter& l : letters_) {
        if (l.exp == 0) continue;
        if (!out.empty() && out.back().gen == l.gen) {
            out.back().exp += l.exp;
            if (out.back().exp == 0) out.pop_back();
        } else {
            out.push_back(l);
        }
    }
    letters_ = std::move(out);
}

long GroupWord::length() const {
    long n = 0;
    for (const Letter& l : letters_) n += std::labs(l.exp);
    return n;
}

GroupWord GroupWord::inverse() const {
    GroupWord w(alphabet_id_);
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
        w.letters_.push_back(Letter{it->gen, -it->exp});
    return w;
}

GroupWord GroupWord::operator*(const GroupWord& rhs) const {
    if (alphabet_id_ != rhs.alphabet_id_ && !is_identity() && !rhs.is_identity())
        throw std::invalid_argument("GroupWord: alphabet mismatch in composition");
    GroupWord w(is_identity() ? rhs.alphabet_id_ : alphabet_id_);
    w.letters_ = letters_;
    w.letters_.insert(w.letters_.end(), rhs.letters_.begin(), rhs.letters_.end());
    w.reduce();
    return w;
}

GroupWord GroupWord::power(int k) const {
    GroupWord base = (k < 0) ? inverse() : *this;
    int n = (k < 0) ? -k : k;
    GroupWord acc(alphabet_id_);
    for (int i = 0; i < n; ++i) acc = acc * base;
    return acc;
}

GroupWord GroupWord::conjugate(const GroupWord& by) const {
    return by.inverse() * (*this) * by;
}

bool GroupWord::lex_less(const GroupWord& other) const {
    const auto& a = letters_;
    const auto& b = other.letters_;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i].gen != b[i].gen) return a[i].gen < b[i].gen;
        if (a[i].exp != b[i].exp) return a[i].exp < b[i].exp;
    }
    return a.size() < b.size();
}

std::string GroupWord::spell() const {
    if (letters_.empty()) return "id";
    std::ostringstream os;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) os << '.';
        os << 'g' << letters_[i].gen;
        if (letters_[i].exp != 1) os << '^' << letters_[i].exp;
    }
    return os.str();
}

GroupWord commutator(const GroupWord& w1, const GroupWord& w2) {
    return w1 * w2 * w1.inverse() * w2.inverse();
}

namespace {
std::atomic<int> g_alphabet_counter{1};
}

IndexedAlphabet::IndexedAlphabet(Alphabet g)
    : id(g_alphabet_counter.fetch_add(1)), gens(std::move(g)) {}

} // namespace circlelab
