#pragma once

#include "mcforms/engine.hpp"

#include <random>
#include <set>
#include <sstream>

namespace mcforms {

// ---- deterministic rational specialization ---------------------------------------

struct Assignment {
    uint64_t seed = 0;
    std::map<ConstSym, Rational> values;
};

namespace detail {

// small stable digest so opaque symbols get seed-independent values
inline Rational digest_rational(const std::string& key) {
    uint64_t x = 1469598103934665603ull;
    for (char ch : key) {
        x ^= (unsigned char)ch;
        x *= 1099511628211ull;
    }
    int num = (int)(x % 195) - 97;
    if (num == 0) num = 1;
    int den = (int)((x >> 32) % 13) + 1;
    return Rational(num, den);
}

} // namespace detail

inline Assignment random_assignment(uint64_t seed, const std::set<ConstSym>& universe) {
    Assignment a;
    a.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-97, 97), den(1, 13);
    for (const ConstSym& s : universe) {
        if (s.kind == ConstSym::Opaque) {
            a.values[s] = detail::digest_rational(s.key);
            continue;
        }
        int v = num(rng);
        while (v == 0) v = num(rng);
        a.values[s] = Rational(v, den(rng));
    }
    return a;
}

inline void collect_symbols(const FormVal& x, std::set<ConstSym>& out) {
    for (const auto& [k, c] : x.terms)
        for (const auto& [m, r] : c.terms)
            for (const ConstSym& s : m) out.insert(s);
}

// coordinates over the formal basis {function monomial x base form x Lie value},
// keyed by the canonical string of the basis element
using SpecVector = std::map<std::string, Rational>;

namespace detail {

inline std::string termkey_str(const FormCtx& ctx, const TermKey& k) {
    std::ostringstream os;
    os << funcmono_str(k.funcs) << "|" << k.base.str(ctx.h) << "|";
    for (int l : k.lie) os << l << " ";
    return os.str();
}

} // namespace detail

inline SpecVector specialize_form(const FormVal& x, const Assignment& sigma) {
    FormVal ex = omega_expand(x);
    SpecVector v;
    for (const auto& [k, c] : ex.terms) {
        Rational val = specialize(c, sigma.values);
        if (val == 0) continue;
        std::string key = detail::termkey_str(ex.ctx, k);
        v[key] += val;
        if (v[key] == 0) v.erase(key);
    }
    return v;
}

// ---- identity cross-checking -----------------------------------------------------

struct OracleReport {
    bool pass = true;
    std::string id;
    int h = 0, n = 0, D = 0, trials = 0;
    uint64_t seed = 0;
    std::string detail;

    std::string line() const {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << " " << id << " h=" << h << " n=" << n << " D=" << D
           << " trials=" << trials << " seed=" << seed;
        if (!detail.empty()) os << " (" << detail << ")";
        return os.str();
    }
};

// compare the two sides of each pair under `trials` independent specializations
inline OracleReport crosscheck_pairs(const std::string& id,
                                     const std::vector<std::pair<FormVal, FormVal>>& pairs,
                                     int h, int n, int D, int trials, uint64_t seed) {
    OracleReport rep{true, id, h, n, D, trials, seed, ""};
    std::set<ConstSym> universe;
    std::vector<std::pair<FormVal, FormVal>> ex;
    for (const auto& [l, r] : pairs) {
        ex.push_back({omega_expand(l), omega_expand(r)});
        collect_symbols(ex.back().first, universe);
        collect_symbols(ex.back().second, universe);
    }
    for (int t = 0; t < trials && rep.pass; ++t) {
        Assignment sig = random_assignment(seed + (uint64_t)t, universe);
        for (size_t p = 0; p < ex.size() && rep.pass; ++p) {
            SpecVector vl = specialize_form(ex[p].first, sig);
            SpecVector vr = specialize_form(ex[p].second, sig);
            if (vl == vr) continue;
            rep.pass = false;
            for (const auto& [key, val] : vl) {
                auto it = vr.find(key);
                if (it == vr.end() || it->second != val) {
                    rep.detail = "trial " + std::to_string(t) + " mismatch at " + key;
                    break;
                }
            }
            if (rep.detail.empty())
                for (const auto& [key, val] : vr)
                    if (!vl.count(key)) {
                        rep.detail = "trial " + std::to_string(t) + " mismatch at " + key;
                        break;
                    }
        }
    }
    return rep;
}

inline const std::vector<std::string>& oracle_identity_ids() {
    static const std::vector<std::string> ids{
        "g-inverse",      "exp-log",        "I-two-routes", "fixed-point",
        "H-factorization", "K-reassembly",  "monodromy-g",  "monodromy-K",
        "monodromy-H",    "composed-zero",  "tuples-membership", "diagram",
        "boldg-monodromy", "negative-control"};
    return ids;
}

inline OracleReport crosscheck(const std::string& id, int h, int n, int D, int trials,
                               uint64_t seed) {
    using Pairs = std::vector<std::pair<FormVal, FormVal>>;
    SeriesBundle B = compute_g(solve_lambda(h, D));
    FormVal one = form_unit(B.ctx);
    Pairs pairs;
    if (id == "g-inverse") {
        pairs.push_back({form_mul(B.g, B.ginv), one});
        pairs.push_back({form_mul(B.ginv, B.g), one});
    } else if (id == "exp-log") {
        pairs.push_back({form_exp(log_of_g(B)), B.g});
        pairs.push_back({lambda_total(lambda_series(h, D)), log_of_g(B)});
    } else if (id == "I-two-routes") {
        pairs.push_back({compute_I(h, D, lambda_series(h, D)), compute_I_direct(B)});
    } else if (id == "fixed-point") {
        for (int j = 1; j <= h; ++j)
            pairs.push_back({fixed_point_image(B, compute_K(B, j)), bernoulli_seed(B.ctx, j)});
    } else if (id == "H-factorization") {
        for (int j = 1; j <= h; ++j) {
            FormVal K = compute_K(B, j);
            pairs.push_back({compute_H(B, K, j), form_mul(B.g, K)});
        }
    } else if (id == "K-reassembly") {
        for (int j = 1; j <= h; ++j) {
            FormVal sum(B.ctx);
            for (const Word& w : words_over(h, 0, D)) {
                FormVal e(B.ctx);
                e.add_term(TermKey{FuncMono{}, BaseForm::fun(), w}, ConstPoly(1));
                sum += form_mul(resolve_omega_word(B, w, j), e);
            }
            pairs.push_back({sum, compute_K(B, j)});
        }
    } else if (id == "monodromy-g") {
        for (int c = 1; c <= h; ++c) {
            pairs.push_back({deck_pullback({DeckLetter{c, 1}}, B.g), B.g});
            pairs.push_back({deck_pullback({DeckLetter{h + c, 1}}, B.g),
                             form_mul(B.g, env_exp_letter(B.ctx, c, -1))});
        }
    } else if (id == "monodromy-K") {
        for (int j = 1; j <= h; ++j) {
            FormVal K = compute_K(B, j);
            for (int c = 1; c <= h; ++c)
                pairs.push_back({deck_pullback({DeckLetter{h + c, 1}}, K),
                                 form_mul(env_exp_letter(B.ctx, c, +1), K)});
        }
    } else if (id == "monodromy-H") {
        for (int j = 1; j <= h; ++j) {
            FormVal H = compute_H(B, compute_K(B, j), j);
            for (int c = 1; c <= h; ++c)
                pairs.push_back({deck_pullback({DeckLetter{h + c, 1}}, H), H});
        }
    } else if (id == "composed-zero") {
        auto P = thn_build(h, std::max(n, 2), D);
        FormCtx c = B.ctx;
        c.n = P->n;
        FormVal delta(c);
        std::mt19937_64 rng(seed ^ 0x5eedf00dull);
        std::uniform_int_distribution<int> num(-9, 9), let(1, h);
        for (int t = 0; t < 6; ++t) {
            Word u, fw;
            for (int l = (int)(rng() % (uint64_t)D); l > 0; --l) u.push_back(let(rng));
            for (int l = 1 + (int)(rng() % 2); l > 0; --l)
                fw.push_back(1 + (int)(rng() % (uint64_t)(2 * h)));
            FuncMono m{FuncSym{fw, 1}};
            delta.add_term(TermKey{m, BaseForm::omega(let(rng)), u}, ConstPoly(Rational(num(rng))));
        }
        pairs.push_back({tuple_to_bold(forms_to_tuple(delta, h), P), FormVal(thn_ctx(P))});
    } else if (id == "tuples-membership") {
        FormCtx c = B.ctx;
        c.n = std::max(n, 2);
        FormVal under = symbolic_underK(c);
        for (int j = 1; j <= h; ++j) {
            FormVal ebp = env_exp_letter(c, j, +1), ebm = env_exp_letter(c, j, -1);
            pairs.push_back({deck_pullback({DeckLetter{h + j, 1}}, under), form_mul(ebp, under)});
            FormVal corr(c), Kj = symbolic_K(c, j);
            // right multiplication by (1 - e^{-b_j})/b_j
            for (int l = 1; l <= c.D + 1; ++l) {
                Rational q = Rational((l % 2) ? 1 : -1) / factorial(l);
                for (const auto& [k, cc] : Kj.terms) {
                    Word w = k.lie;
                    for (int t = 0; t < l - 1; ++t) w.push_back(j);
                    corr.add_term(TermKey{k.funcs, k.base, w}, cc * q);
                }
            }
            pairs.push_back({deck_pullback({DeckLetter{h + j, 2}}, under),
                             form_mul(under, ebm) + corr});
        }
    } else if (id == "diagram") {
        int nn = std::max(n, 2);
        auto P = thn_build(h, nn, D);
        FormCtx cn = B.ctx;
        cn.n = nn;
        FormTuple T = k_tuple(B, cn);
        pairs.push_back({bold_s_gamma(log_of_g(B), tuple_to_bold(T, P)),
                         tuple_to_bold(S_gamma(re_ctx(B.g, cn), T), P)});
    } else if (id == "boldg-monodromy") {
        auto P = thn_build(h, std::max(n, 2), D);
        FormVal bg = bold_g(B, P);
        for (int r = 1; r <= P->n; ++r)
            for (int i = 1; i <= h; ++i)
                pairs.push_back({residual_bold_g(bg, i, r), FormVal(thn_ctx(P))});
    } else if (id == "negative-control") {
        FormVal bad = B.g;
        bad.add_term(TermKey{FuncMono{FuncSym{{h + 1}, 1}}, BaseForm::fun(), {1, 1}},
                     ConstPoly(Rational(1, 7)));
        OracleReport inner =
            crosscheck_pairs(id, {{form_mul(bad, B.ginv), one}}, h, n, D, trials, seed);
        OracleReport rep{!inner.pass, id, h, n, D, trials, seed,
                         inner.pass ? "perturbation was not detected"
                                    : "perturbation detected as expected"};
        return rep;
    } else {
        throw std::invalid_argument("unknown oracle identity: " + id);
    }
    return crosscheck_pairs(id, pairs, h, n, D, trials, seed);
}

// ---- quotient dimension cross-check ------------------------------------------------

inline bool thn_dim_crosscheck(int h, int n, int d) {
    auto P1 = thn_build(h, n, std::max(d, 1));
    ThnBuildOptions alt;
    alt.reverse_letters = true;
    alt.shuffle_seed = 0x7a11ced;
    alt.pivot_from_back = true;
    auto P2 = thn_build(h, n, std::max(d, 1), alt);
    return P1->dim(d) == P2->dim(d);
}

} // namespace mcforms
