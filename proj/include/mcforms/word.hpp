#pragma once

#include "mcforms/rational.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace mcforms {

using Letter = int;
using Word = std::vector<Letter>;

inline Word concat(const Word& u, const Word& v) {
    Word w = u;
    w.insert(w.end(), v.begin(), v.end());
    return w;
}

// All interleavings of u and v with multiplicity.
inline void shuffle_rec(const Word& u, size_t iu, const Word& v, size_t iv,
                        Word& cur, std::map<Word, Int>& out) {
    if (iu == u.size() && iv == v.size()) { out[cur] += 1; return; }
    if (iu < u.size()) {
        cur.push_back(u[iu]);
        shuffle_rec(u, iu + 1, v, iv, cur, out);
        cur.pop_back();
    }
    if (iv < v.size()) {
        cur.push_back(v[iv]);
        shuffle_rec(u, iu, v, iv + 1, cur, out);
        cur.pop_back();
    }
}

inline std::map<Word, Int> shuffle_words(const Word& u, const Word& v) {
    std::map<Word, Int> out;
    Word cur;
    cur.reserve(u.size() + v.size());
    shuffle_rec(u, 0, v, 0, cur, out);
    return out;
}

inline std::map<Word, Int> shuffle_many(const std::vector<Word>& ws) {
    std::map<Word, Int> acc;
    acc[Word{}] = 1;
    for (const Word& w : ws) {
        std::map<Word, Int> next;
        for (const auto& [a, c] : acc)
            for (const auto& [s, m] : shuffle_words(a, w)) next[s] += c * m;
        acc = std::move(next);
    }
    return acc;
}

// Lyndon: strictly smaller than every proper right rotation (lex, 1 < 2 < ...).
inline bool is_lyndon(const Word& w) {
    if (w.empty()) return false;
    size_t n = w.size();
    for (size_t i = 1; i < n; ++i) {
        Word rot(w.begin() + i, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + i);
        if (!(w < rot)) return false;
    }
    return true;
}

// Chen-Fox-Lyndon factorization into a non-increasing sequence of Lyndon words
// (Duval's algorithm).
inline std::vector<Word> lyndon_factorize(const Word& w) {
    if (w.empty()) throw std::invalid_argument("empty word has no factorization");
    std::vector<Word> out;
    size_t n = w.size(), i = 0;
    while (i < n) {
        size_t j = i + 1, k = i;
        while (j < n && w[k] <= w[j]) {
            if (w[k] < w[j]) k = i; else ++k;
            ++j;
        }
        while (i <= k) {
            out.emplace_back(w.begin() + i, w.begin() + i + (j - k));
            i += j - k;
        }
    }
    return out;
}

// All Lyndon words over letters 1..alphabet with length in [1, maxlen], sorted lex.
inline std::vector<Word> lyndon_words(int alphabet, int maxlen) {
    std::vector<Word> out;
    Word w{0};
    while (!w.empty()) {
        ++w.back();
        if ((int)w.size() <= maxlen) out.push_back(w);
        size_t m = w.size();
        while ((int)w.size() < maxlen) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == alphabet) w.pop_back();
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Standard factorization of a Lyndon word of length >= 2: w = uv with v the
// longest proper Lyndon suffix; [P_u, P_v] is the Lyndon basis bracketing.
inline std::pair<Word, Word> lyndon_standard_split(const Word& w) {
    if (w.size() < 2) throw std::invalid_argument("split needs length >= 2");
    for (size_t i = 1; i < w.size(); ++i) {
        Word v(w.begin() + i, w.end());
        if (is_lyndon(v)) return {Word(w.begin(), w.begin() + i), v};
    }
    throw std::logic_error("no Lyndon suffix found");
}

} // namespace mcforms
