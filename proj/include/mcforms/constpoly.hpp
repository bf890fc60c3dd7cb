#pragma once

#include "mcforms/word.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <tuple>

namespace mcforms {

// Cycle indices: 1..h are A-loops, h+1..2h are B-paths.
using Cycle = int;

inline std::string cycle_str(Cycle c, int h) {
    return (c <= h) ? ("A" + std::to_string(c)) : ("B" + std::to_string(c - h));
}

struct ConstSym {
    enum Kind { Loop = 0, Tau = 1, Opaque = 2 };
    Kind kind = Loop;
    Word word;        // Loop: Lyndon word of length >= 2
    Cycle cycle = 0;  // Loop
    int i = 0, j = 0; // Tau, stored with i <= j
    std::string key;  // Opaque

    static ConstSym loop(Word w, Cycle c) {
        ConstSym s; s.kind = Loop; s.word = std::move(w); s.cycle = c; return s;
    }
    static ConstSym tau(int i, int j) {
        ConstSym s; s.kind = Tau;
        s.i = std::min(i, j); s.j = std::max(i, j);
        return s;
    }
    static ConstSym opaque(std::string k) {
        ConstSym s; s.kind = Opaque; s.key = std::move(k); return s;
    }

    auto tie() const { return std::tie(kind, word, cycle, i, j, key); }
    bool operator<(const ConstSym& o) const { return tie() < o.tie(); }
    bool operator==(const ConstSym& o) const { return tie() == o.tie(); }

    std::string str(int h) const {
        std::ostringstream os;
        switch (kind) {
            case Loop: {
                os << "[";
                for (size_t k = 0; k < word.size(); ++k) {
                    if (k) os << " ";
                    os << word[k];
                }
                os << "|" << cycle_str(cycle, h) << "]";
                break;
            }
            case Tau: os << "tau_" << i << j; break;
            case Opaque: os << "opaque(" << key << ")"; break;
        }
        return os.str();
    }
};

// Sorted multiset of symbols.
using SymMono = std::vector<ConstSym>;

inline std::string symmono_str(const SymMono& m, int h) {
    std::string s;
    size_t k = 0;
    while (k < m.size()) {
        size_t e = 1;
        while (k + e < m.size() && m[k + e] == m[k]) ++e;
        if (!s.empty()) s += " ";
        s += m[k].str(h);
        if (e > 1) s += "^" + std::to_string(e);
        k += e;
    }
    return s;
}

// Polynomial in ConstSyms over Rational: the coefficient ring everywhere.
struct ConstPoly {
    std::map<SymMono, Rational> terms;

    ConstPoly() = default;
    ConstPoly(const Rational& r) {
        if (r != 0) terms[SymMono{}] = r;
    }
    ConstPoly(int n) : ConstPoly(Rational(n)) {}
    static ConstPoly sym(const ConstSym& s) {
        ConstPoly p;
        p.terms[SymMono{s}] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }
    bool operator==(const ConstPoly& o) const { return terms == o.terms; }

    ConstPoly& operator+=(const ConstPoly& o) {
        for (const auto& [m, c] : o.terms) {
            auto it = terms.find(m);
            if (it == terms.end()) terms.emplace(m, c);
            else {
                it->second += c;
                if (it->second == 0) terms.erase(it);
            }
        }
        return *this;
    }
    ConstPoly operator+(const ConstPoly& o) const { ConstPoly r = *this; r += o; return r; }
    ConstPoly operator-() const {
        ConstPoly r = *this;
        for (auto& [m, c] : r.terms) c = -c;
        return r;
    }
    ConstPoly& operator-=(const ConstPoly& o) { return *this += -o; }
    ConstPoly operator-(const ConstPoly& o) const { ConstPoly r = *this; r -= o; return r; }

    ConstPoly operator*(const ConstPoly& o) const {
        ConstPoly r;
        for (const auto& [m1, c1] : terms)
            for (const auto& [m2, c2] : o.terms) {
                SymMono m;
                m.reserve(m1.size() + m2.size());
                std::merge(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(m));
                auto it = r.terms.find(m);
                if (it == r.terms.end()) r.terms.emplace(std::move(m), c1 * c2);
                else {
                    it->second += c1 * c2;
                    if (it->second == 0) r.terms.erase(it);
                }
            }
        return r;
    }
    ConstPoly& operator*=(const ConstPoly& o) { *this = *this * o; return *this; }
    ConstPoly operator*(const Rational& r) const {
        if (r == 0) return ConstPoly();
        ConstPoly out = *this;
        for (auto& [m, c] : out.terms) c *= r;
        return out;
    }

    // Constant (symbol-free) value, if the polynomial is constant.
    bool is_constant() const {
        return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty());
    }
    Rational constant_value() const {
        if (terms.empty()) return 0;
        return terms.begin()->second;
    }

    std::string str(int h) const {
        if (terms.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : terms) {
            if (!s.empty()) s += (c >= 0) ? " + " : " - ";
            else if (c < 0) s += "-";
            Rational a = (c < 0) ? Rational(-c) : c;
            std::string ms = symmono_str(m, h);
            if (ms.empty()) s += rat_str(a);
            else {
                if (a != 1) s += rat_str(a) + " ";
                s += ms;
            }
        }
        return s;
    }
};

inline ConstPoly operator*(const Rational& r, const ConstPoly& p) { return p * r; }

// --- Radford rewriting ---------------------------------------------------
// The shuffle algebra on words is a free polynomial algebra on Lyndon words.
// express_in_lyndon(w) writes a word as a polynomial in abstract Lyndon-word
// generators: if w has Lyndon factorization l1^n1 ... lk^nk (non-increasing),
// the shuffle product of the factors equals (prod ni!) w plus lex-smaller
// words, so the system inverts triangularly.
using LyndonPoly = std::map<std::vector<Word>, Rational>; // sorted multiset of Lyndon words

namespace detail {

inline void lyndon_add(LyndonPoly& p, std::vector<Word> m, const Rational& c) {
    auto it = p.find(m);
    if (it == p.end()) p.emplace(std::move(m), c);
    else {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

inline const LyndonPoly& express_in_lyndon(const Word& w) {
    static std::map<Word, LyndonPoly> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lk(mtx);
        auto it = cache.find(w);
        if (it != cache.end()) return it->second;
    }
    LyndonPoly result;
    if (is_lyndon(w)) {
        result[{w}] = 1;
    } else {
        std::vector<Word> factors = lyndon_factorize(w);
        auto sh = shuffle_many(factors);
        Int lead = sh.at(w);
        std::vector<Word> sorted_factors = factors;
        std::sort(sorted_factors.begin(), sorted_factors.end());
        // product of the Lyndon generators themselves
        LyndonPoly acc;
        acc[sorted_factors] = Rational(1, lead);
        for (const auto& [v, m] : sh) {
            if (v == w) continue;
            // v < w lex (Radford triangularity) so recursion terminates
            const LyndonPoly& sub = express_in_lyndon(v);
            Rational c = -Rational(m, lead);
            for (const auto& [mono, cc] : sub) lyndon_add(acc, mono, c * cc);
        }
        result = std::move(acc);
    }
    std::lock_guard<std::mutex> lk(mtx);
    return cache.emplace(w, std::move(result)).first->second;
}

} // namespace detail

// Loop constant of an arbitrary word over a cycle: empty -> 1, single letter
// [i|c] -> delta_{ic}, longer words -> polynomial in Lyndon LoopConst symbols.
inline ConstPoly normalize_loop_const(const Word& w, Cycle c) {
    if (w.empty()) return ConstPoly(1);
    const LyndonPoly& lp = detail::express_in_lyndon(w);
    ConstPoly out;
    for (const auto& [mono, coef] : lp) {
        ConstPoly term(coef);
        for (const Word& l : mono) {
            if (l.size() == 1)
                term *= ConstPoly(Rational(l[0] == c ? 1 : 0));
            else
                term *= ConstPoly::sym(ConstSym::loop(l, c));
            if (term.is_zero()) break;
        }
        out += term;
    }
    return out;
}

// Ring-homomorphism evaluation under a symbol assignment.
inline Rational specialize(const ConstPoly& p, const std::map<ConstSym, Rational>& sigma) {
    Rational out = 0;
    for (const auto& [m, c] : p.terms) {
        Rational v = c;
        for (const ConstSym& s : m) {
            auto it = sigma.find(s);
            if (it == sigma.end())
                throw std::runtime_error("unassigned symbol: " + s.str(9));
            v *= it->second;
        }
        out += v;
    }
    return out;
}

} // namespace mcforms
