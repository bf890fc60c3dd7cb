#include <catch2/catch_amalgamated.hpp>

#include "mcforms/constpoly.hpp"

#include <random>

using namespace mcforms;

TEST_CASE("rational basics") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(rat_den(Rational(3) / Rational(-6)) == 2);
    CHECK(rat_num(Rational(3) / Rational(-6)) == -1);
    CHECK(factorial(4) == 24);
    CHECK(binomial(5, 2) == 10);
}

TEST_CASE("bernoulli numbers") {
    CHECK(bernoulli(0) == 1);
    CHECK(bernoulli(1) == Rational(-1, 2));
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(3) == 0);
    CHECK(bernoulli(4) == Rational(-1, 30));
    CHECK(bernoulli(6) == Rational(1, 42));
}

TEST_CASE("shuffle words") {
    auto s = shuffle_words({1}, {2});
    CHECK(s == std::map<Word, Int>{{{1, 2}, 1}, {{2, 1}, 1}});
    CHECK(shuffle_words({1}, {}) == std::map<Word, Int>{{{1}, 1}});
    auto t = shuffle_words({1, 2}, {3});
    CHECK(t == std::map<Word, Int>{{{1, 2, 3}, 1}, {{1, 3, 2}, 1}, {{3, 1, 2}, 1}});
    // total multiplicity is C(|u|+|v|, |u|)
    auto u = shuffle_words({1, 2, 1}, {2, 1});
    Int total = 0;
    for (auto& [w, m] : u) total += m;
    CHECK(total == 10);
}

TEST_CASE("lyndon predicates and factorization") {
    CHECK(is_lyndon({1, 2}));
    CHECK_FALSE(is_lyndon({2, 1}));
    CHECK_FALSE(is_lyndon({1, 2, 1, 2}));
    CHECK(is_lyndon({1, 1, 2}));
    CHECK(lyndon_factorize({1, 2}) == std::vector<Word>{{1, 2}});
    CHECK(lyndon_factorize({2, 1}) == std::vector<Word>{{2}, {1}});
    CHECK(lyndon_factorize({2, 1, 2}) == std::vector<Word>{{2}, {1, 2}});
    CHECK_THROWS(lyndon_factorize({}));

    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Word w;
        int len = 1 + (int)(rng() % 6);
        for (int k = 0; k < len; ++k) w.push_back(1 + (int)(rng() % 4));
        auto f = lyndon_factorize(w);
        Word back;
        for (auto& p : f) {
            CHECK(is_lyndon(p));
            back.insert(back.end(), p.begin(), p.end());
        }
        CHECK(back == w);
        for (size_t k = 0; k + 1 < f.size(); ++k) CHECK(!(f[k] < f[k + 1]));
    }
}

TEST_CASE("lyndon word enumeration matches Witt counts") {
    // number of Lyndon words of length d over q letters: (1/d) sum mu(e) q^{d/e}
    auto lw = lyndon_words(2, 5);
    std::map<int, int> bylen;
    for (auto& w : lw) bylen[(int)w.size()]++;
    CHECK(bylen[1] == 2);
    CHECK(bylen[2] == 1);
    CHECK(bylen[3] == 2);
    CHECK(bylen[4] == 3);
    CHECK(bylen[5] == 6);
}

TEST_CASE("normalize_loop_const base cases") {
    CHECK(normalize_loop_const({}, 1) == ConstPoly(1));
    CHECK(normalize_loop_const({1}, 1) == ConstPoly(1));
    CHECK(normalize_loop_const({1}, 2) == ConstPoly(0));
    // [2,1|c] = delta_1c delta_2c - [1,2|c]
    ConstPoly p = normalize_loop_const({2, 1}, 3);
    CHECK(p == -ConstPoly::sym(ConstSym::loop({1, 2}, 3)));
}

TEST_CASE("normalize_loop_const is a shuffle homomorphism") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        Word u, v;
        int lu = (int)(rng() % 4), lv = 1 + (int)(rng() % 3);
        for (int k = 0; k < lu; ++k) u.push_back(1 + (int)(rng() % 4));
        for (int k = 0; k < lv; ++k) v.push_back(1 + (int)(rng() % 4));
        if (lu + lv > 5) continue;
        Cycle c = 1 + (int)(rng() % 4);
        ConstPoly lhs;
        for (auto& [w, m] : shuffle_words(u, v))
            lhs += normalize_loop_const(w, c) * Rational(m);
        ConstPoly rhs = normalize_loop_const(u, c) * normalize_loop_const(v, c);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("ring ops") {
    ConstPoly x = ConstPoly::sym(ConstSym::loop({1, 2}, 1));
    CHECK(ConstPoly(0) + x == x);
    CHECK(ConstPoly(1) * x == x);
    CHECK(x + x == x * Rational(2));
    CHECK((x - x).is_zero());
    ConstPoly y = ConstPoly::sym(ConstSym::tau(2, 1));
    CHECK(y == ConstPoly::sym(ConstSym::tau(1, 2)));
    CHECK(x * y == y * x);
    ConstPoly z = ConstPoly::sym(ConstSym::loop({1, 1, 2}, 3));
    CHECK((x + y) * z == x * z + y * z);
}

TEST_CASE("specialize is a ring homomorphism") {
    ConstSym s = ConstSym::loop({1, 2}, 1);
    ConstPoly x = ConstPoly::sym(s);
    std::map<ConstSym, Rational> sigma{{s, Rational(4)}};
    CHECK(specialize(x * Rational(3, 2), sigma) == 6);
    CHECK(specialize(ConstPoly(5), {}) == 5);
    CHECK(specialize(x * x - x, sigma) == 12);
    sigma[ConstSym::tau(1, 2)] = Rational(-2, 3);
    ConstPoly y = ConstPoly::sym(ConstSym::tau(1, 2));
    CHECK(specialize(x * y, sigma) == specialize(x, sigma) * specialize(y, sigma));
    CHECK(specialize(x + y, sigma) == specialize(x, sigma) + specialize(y, sigma));
    CHECK_THROWS(specialize(ConstPoly::sym(ConstSym::opaque("k")), sigma));
}
