#pragma once

#include "mcforms/constpoly.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace mcforms {

// Free Lie / enveloping algebra context: letters 1..alphabet, optional
// per-letter degrees (default 1), hard truncation at weighted degree D.
struct AlgCtx {
    int alphabet = 0;
    int D = 0;
    std::vector<int> degs; // 1-based; empty means all letters have degree 1

    AlgCtx() = default;
    AlgCtx(int a, int d) : alphabet(a), D(d) {}
    AlgCtx(int a, int d, std::vector<int> dg) : alphabet(a), D(d), degs(std::move(dg)) {}

    int letter_deg(Letter l) const { return degs.empty() ? 1 : degs[l]; }
    int deg(const Word& w) const {
        int s = 0;
        for (Letter l : w) s += letter_deg(l);
        return s;
    }
    bool operator==(const AlgCtx& o) const {
        return alphabet == o.alphabet && D == o.D && degs == o.degs;
    }
};

inline void require_same_ctx(const AlgCtx& a, const AlgCtx& b) {
    if (!(a == b)) throw std::invalid_argument("incompatible algebra contexts");
}

struct EnvElem {
    AlgCtx ctx;
    std::map<Word, ConstPoly> terms;

    EnvElem() = default;
    explicit EnvElem(AlgCtx c) : ctx(std::move(c)) {}
    static EnvElem unit(const AlgCtx& c) {
        EnvElem e(c);
        e.terms[Word{}] = ConstPoly(1);
        return e;
    }
    static EnvElem word(const AlgCtx& c, Word w, ConstPoly coef = ConstPoly(1)) {
        EnvElem e(c);
        if (!coef.is_zero() && c.deg(w) <= c.D) e.terms[std::move(w)] = std::move(coef);
        return e;
    }

    bool is_zero() const { return terms.empty(); }
    bool operator==(const EnvElem& o) const { return terms == o.terms; }

    void add_term(const Word& w, const ConstPoly& c) {
        if (c.is_zero() || ctx.deg(w) > ctx.D) return;
        auto it = terms.find(w);
        if (it == terms.end()) terms.emplace(w, c);
        else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
    EnvElem& operator+=(const EnvElem& o) {
        require_same_ctx(ctx, o.ctx);
        for (const auto& [w, c] : o.terms) add_term(w, c);
        return *this;
    }
    EnvElem operator+(const EnvElem& o) const { EnvElem r = *this; r += o; return r; }
    EnvElem operator-() const {
        EnvElem r = *this;
        for (auto& [w, c] : r.terms) c = -c;
        return r;
    }
    EnvElem& operator-=(const EnvElem& o) { return *this += -o; }
    EnvElem operator-(const EnvElem& o) const { EnvElem r = *this; r -= o; return r; }
    EnvElem operator*(const ConstPoly& s) const {
        EnvElem r(ctx);
        for (const auto& [w, c] : terms) r.add_term(w, c * s);
        return r;
    }
    EnvElem operator*(const Rational& s) const { return *this * ConstPoly(s); }

    // degree-d homogeneous part
    EnvElem part(int d) const {
        EnvElem r(ctx);
        for (const auto& [w, c] : terms)
            if (ctx.deg(w) == d) r.terms.emplace(w, c);
        return r;
    }
    int min_deg() const {
        int m = ctx.D + 1;
        for (const auto& [w, c] : terms) m = std::min(m, ctx.deg(w));
        return m;
    }
};

inline EnvElem env_mul(const EnvElem& a, const EnvElem& b) {
    require_same_ctx(a.ctx, b.ctx);
    EnvElem r(a.ctx);
    for (const auto& [u, cu] : a.terms)
        for (const auto& [v, cv] : b.terms) {
            Word w = concat(u, v);
            if (a.ctx.deg(w) > a.ctx.D) continue;
            r.add_term(w, cu * cv);
        }
    return r;
}

// ---- Lyndon bracket basis ------------------------------------------------
// P_w for a Lyndon word w: the letter for |w| = 1, else [P_u, P_v] with
// w = uv the standard factorization. Expansion in the word basis is
// P_w = w + (lex-greater words), which makes env -> Lie conversion triangular.
namespace detail {

inline const std::map<Word, Rational>& lyndon_expand(const Word& w) {
    static std::map<Word, std::map<Word, Rational>> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lk(mtx);
        auto it = cache.find(w);
        if (it != cache.end()) return it->second;
    }
    std::map<Word, Rational> result;
    if (w.size() == 1) {
        result[w] = 1;
    } else {
        auto [u, v] = lyndon_standard_split(w);
        const auto eu = lyndon_expand(u); // copy: recursion may touch the cache
        const auto ev = lyndon_expand(v);
        for (const auto& [a, ca] : eu)
            for (const auto& [b, cb] : ev) {
                Word ab = concat(a, b), ba = concat(b, a);
                result[ab] += ca * cb;
                if (result[ab] == 0) result.erase(ab);
                result[ba] -= ca * cb;
                if (result[ba] == 0) result.erase(ba);
            }
    }
    std::lock_guard<std::mutex> lk(mtx);
    return cache.emplace(w, std::move(result)).first->second;
}

} // namespace detail

struct LieElem {
    AlgCtx ctx;
    std::map<Word, ConstPoly> terms; // Lyndon words only

    LieElem() = default;
    explicit LieElem(AlgCtx c) : ctx(std::move(c)) {}
    static LieElem generator(const AlgCtx& c, Letter l) {
        LieElem x(c);
        x.terms[Word{l}] = ConstPoly(1);
        return x;
    }

    bool is_zero() const { return terms.empty(); }
    bool operator==(const LieElem& o) const { return terms == o.terms; }

    void add_term(const Word& w, const ConstPoly& c) {
        if (c.is_zero() || ctx.deg(w) > ctx.D) return;
        auto it = terms.find(w);
        if (it == terms.end()) terms.emplace(w, c);
        else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
    LieElem& operator+=(const LieElem& o) {
        require_same_ctx(ctx, o.ctx);
        for (const auto& [w, c] : o.terms) add_term(w, c);
        return *this;
    }
    LieElem operator+(const LieElem& o) const { LieElem r = *this; r += o; return r; }
    LieElem operator-() const {
        LieElem r = *this;
        for (auto& [w, c] : r.terms) c = -c;
        return r;
    }
    LieElem operator-(const LieElem& o) const { LieElem r = *this; r += -o; return r; }
    LieElem operator*(const ConstPoly& s) const {
        LieElem r(ctx);
        for (const auto& [w, c] : terms) r.add_term(w, c * s);
        return r;
    }
    LieElem part(int d) const {
        LieElem r(ctx);
        for (const auto& [w, c] : terms)
            if (ctx.deg(w) == d) r.terms.emplace(w, c);
        return r;
    }
};

inline EnvElem lie_to_env(const LieElem& x) {
    EnvElem r(x.ctx);
    for (const auto& [w, c] : x.terms)
        for (const auto& [v, q] : detail::lyndon_expand(w)) r.add_term(v, c * q);
    return r;
}

// Inverse of lie_to_env on primitive elements: peel off the lex-least word,
// which must be Lyndon with P_w = w + lex-greater words.
inline LieElem env_to_lie(const EnvElem& x) {
    LieElem out(x.ctx);
    EnvElem rest = x;
    while (!rest.terms.empty()) {
        auto it = rest.terms.begin();
        Word w = it->first;
        ConstPoly c = it->second;
        if (w.empty() || !is_lyndon(w))
            throw std::runtime_error("element is not in the free Lie algebra");
        out.add_term(w, c);
        for (const auto& [v, q] : detail::lyndon_expand(w)) rest.add_term(v, -(c * q));
        if (rest.terms.count(w))
            throw std::logic_error("triangular peel failed");
    }
    return out;
}

inline LieElem lie_bracket(const LieElem& a, const LieElem& b) {
    require_same_ctx(a.ctx, b.ctx);
    EnvElem ea = lie_to_env(a), eb = lie_to_env(b);
    return env_to_lie(env_mul(ea, eb) - env_mul(eb, ea));
}

// ---- exp / log -----------------------------------------------------------

inline EnvElem exp_trunc(const LieElem& x) {
    EnvElem e = lie_to_env(x);
    if (e.terms.count(Word{})) throw std::invalid_argument("exp needs no degree-0 part");
    EnvElem out = EnvElem::unit(x.ctx);
    EnvElem pw = EnvElem::unit(x.ctx);
    for (int k = 1; k <= x.ctx.D; ++k) {
        pw = env_mul(pw, e);
        if (pw.is_zero()) break;
        out += pw * Rational(Int(1), rat_num(factorial(k)));
    }
    return out;
}

inline LieElem log_trunc(const EnvElem& g) {
    auto it = g.terms.find(Word{});
    if (it == g.terms.end() || !(it->second == ConstPoly(1)))
        throw std::invalid_argument("log needs constant term 1");
    EnvElem x = g;
    x.terms.erase(Word{});
    EnvElem out(g.ctx);
    EnvElem pw = EnvElem::unit(g.ctx);
    for (int k = 1; k <= g.ctx.D; ++k) {
        pw = env_mul(pw, x);
        if (pw.is_zero()) break;
        Rational c = Rational((k % 2) ? 1 : -1, k);
        out += pw * c;
    }
    return env_to_lie(out);
}

// ---- Hopf structure ------------------------------------------------------

inline EnvElem antipode(const EnvElem& u) {
    EnvElem r(u.ctx);
    for (const auto& [w, c] : u.terms) {
        Word rw(w.rbegin(), w.rend());
        r.add_term(rw, (w.size() % 2) ? -c : c);
    }
    return r;
}

inline ConstPoly counit(const EnvElem& u) {
    auto it = u.terms.find(Word{});
    return it == u.terms.end() ? ConstPoly() : it->second;
}

// Right deconcatenation by the last letter: u = counit(u) 1 + sum_i partial_i(u) b_i.
inline EnvElem partial_i(const EnvElem& u, Letter i) {
    EnvElem r(u.ctx);
    for (const auto& [w, c] : u.terms) {
        if (w.empty() || w.back() != i) continue;
        r.add_term(Word(w.begin(), w.end() - 1), c);
    }
    return r;
}

// Unshuffle coproduct (generators primitive). Pairs with |left|+|right| <= D.
using EnvPairSum = std::map<std::pair<Word, Word>, ConstPoly>;

inline EnvPairSum coproduct(const EnvElem& u) {
    EnvPairSum out;
    for (const auto& [w, c] : u.terms) {
        size_t m = w.size();
        for (size_t mask = 0; mask < (size_t(1) << m); ++mask) {
            Word a, b;
            for (size_t k = 0; k < m; ++k)
                ((mask >> k) & 1 ? a : b).push_back(w[k]);
            auto key = std::make_pair(std::move(a), std::move(b));
            auto it = out.find(key);
            if (it == out.end()) out.emplace(std::move(key), c);
            else {
                it->second += c;
                if (it->second.is_zero()) out.erase(it);
            }
        }
    }
    return out;
}

inline bool is_grouplike(const EnvElem& u) {
    if (!(counit(u) == ConstPoly(1))) return false;
    EnvPairSum lhs = coproduct(u);
    for (const auto& [w1, c1] : u.terms)
        for (const auto& [w2, c2] : u.terms) {
            if (u.ctx.deg(w1) + u.ctx.deg(w2) > u.ctx.D) continue;
            auto key = std::make_pair(w1, w2);
            auto it = lhs.find(key);
            ConstPoly want = c1 * c2;
            if (it == lhs.end()) {
                if (!want.is_zero()) return false;
            } else {
                it->second -= want;
                if (!it->second.is_zero()) return false;
                lhs.erase(it);
            }
        }
    return lhs.empty();
}

inline bool is_primitive(const EnvElem& x) {
    EnvPairSum d = coproduct(x);
    for (const auto& [w, c] : x.terms) {
        if (w.empty()) return false;
        for (auto key : {std::make_pair(w, Word{}), std::make_pair(Word{}, w)}) {
            auto it = d.find(key);
            if (it == d.end()) return false;
            it->second -= c;
            if (!it->second.is_zero()) return false;
            d.erase(it);
        }
    }
    return d.empty();
}

} // namespace mcforms
