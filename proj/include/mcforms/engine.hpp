#pragma once

#include "mcforms/symcalc.hpp"

#include <functional>

namespace mcforms {

// ---- small helpers ---------------------------------------------------------------

inline std::vector<Word> words_over(int alphabet, int minlen, int maxlen) {
    std::vector<Word> out;
    if (minlen == 0) out.push_back(Word{});
    std::vector<Word> cur{Word{}};
    for (int l = 1; l <= maxlen; ++l) {
        std::vector<Word> next;
        for (const Word& w : cur)
            for (int i = 1; i <= alphabet; ++i) {
                Word v = w;
                v.push_back(i);
                next.push_back(std::move(v));
            }
        cur = std::move(next);
        if (l >= minlen) out.insert(out.end(), cur.begin(), cur.end());
    }
    return out;
}

inline std::vector<std::vector<int>> compositions(int d, int parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int p) {
        if (p == 1) {
            if (left >= 1) {
                cur.push_back(left);
                out.push_back(cur);
                cur.pop_back();
            }
            return;
        }
        for (int v = 1; v + (p - 1) <= left; ++v) {
            cur.push_back(v);
            rec(left - v, p - 1);
            cur.pop_back();
        }
    };
    rec(d, parts);
    return out;
}

inline FormVal form_unit(const FormCtx& c) { return FormVal::scalar(c, ConstPoly(1)); }

inline FormVal fun_sym_term(const FormCtx& c, Word w, int coord = 1,
                            ConstPoly coef = ConstPoly(1)) {
    FormVal v(c);
    v.add_term(TermKey{FuncMono{FuncSym{std::move(w), coord}}, BaseForm::fun(), {}}, coef);
    return v;
}

inline FormVal base_val(const FormCtx& c, BaseForm b, ConstPoly coef = ConstPoly(1)) {
    FormVal v(c);
    v.add_term(TermKey{FuncMono{}, std::move(b), {}}, coef);
    return v;
}

// scalar series sum_l f(l) b_j^l in the env slot
inline FormVal env_bseries(const FormCtx& c, int j, const std::function<Rational(int)>& f) {
    FormVal v(c);
    for (int l = 0; l <= c.D; ++l)
        v.add_term(TermKey{FuncMono{}, BaseForm::fun(), Word((size_t)l, j)}, ConstPoly(f(l)));
    return v;
}

inline FormVal env_exp_letter(const FormCtx& c, int j, int sign) {
    return env_bseries(c, j, [&](int l) {
        Rational r = Rational(1) / factorial(l);
        return (sign < 0 && (l % 2)) ? Rational(-r) : r;
    });
}

// reinterpret a FormVal in a compatible context (same h, D, algebra)
inline FormVal re_ctx(const FormVal& x, const FormCtx& c) {
    FormVal out(c);
    for (const auto& [k, v] : x.terms) out.add_term(k, v);
    return out;
}

// relabel coordinates of functions and base forms
inline FormVal coord_relabel(const FormVal& x, const std::function<int(int)>& f) {
    FormVal out(x.ctx);
    for (const auto& [k, v] : x.terms) {
        FuncMono m;
        for (FuncSym fs : k.funcs) {
            fs.coord = f(fs.coord);
            m.insert(std::upper_bound(m.begin(), m.end(), fs), fs);
        }
        BaseForm b = k.base;
        if (b.kind != BaseForm::Fun) b.coord = f(b.coord);
        if (b.kind == BaseForm::PsiW) b.coord2 = f(b.coord2);
        out.add_term(TermKey{m, b, k.lie}, v);
    }
    return out;
}

// ---- the holonomy coefficients Lambda ---------------------------------------------

struct LambdaSolution {
    int h = 1, D = 1;
    AlgCtx ctx{1, 1};
    std::vector<EnvElem> lam; // index i-1 for i in [1,2h], env expansion of Lie elements
};

// degreewise triangular solve of the A/B holonomy equations; the length-1 loop
// coefficients are Kronecker deltas, so each degree is solved by substitution
inline LambdaSolution solve_lambda(int h, int D) {
    LambdaSolution S;
    S.h = h;
    S.D = D;
    S.ctx = AlgCtx(h, D);
    for (int i = 0; i < 2 * h; ++i) S.lam.emplace_back(S.ctx);
    for (int j = 1; j <= h; ++j) S.lam[h + j - 1].add_term({(Letter)j}, ConstPoly(1));
    for (int d = 2; d <= D; ++d) {
        std::vector<EnvElem> upd;
        for (int c = 1; c <= 2 * h; ++c) {
            EnvElem rhs(S.ctx);
            if (c > h)
                rhs.add_term(Word((size_t)d, c - h), ConstPoly(Rational(1) / factorial(d)));
            // subtract known lower-degree contributions of words of length >= 2
            for (int m = 2; m <= d; ++m)
                for (const Word& w : words_over(2 * h, m, m)) {
                    ConstPoly coef = normalize_loop_const(w, c);
                    if (coef.is_zero()) continue;
                    EnvElem prod = S.lam[w[0] - 1];
                    for (size_t k = 1; k < w.size() && !prod.is_zero(); ++k)
                        prod = env_mul(prod, S.lam[w[k] - 1]);
                    EnvElem pd = prod.part(d);
                    if (!pd.is_zero()) rhs = rhs - pd * coef;
                }
            upd.push_back(rhs.part(d));
        }
        for (int c = 1; c <= 2 * h; ++c) S.lam[c - 1] = S.lam[c - 1] + upd[c - 1];
    }
    for (const EnvElem& L : S.lam) env_to_lie(L); // throws if a solution failed primitivity
    return S;
}

// residual of the defining loop equations; zero for a valid solution
inline EnvElem lambda_loop_residual(const LambdaSolution& S, int c, int d) {
    EnvElem acc(S.ctx);
    for (int m = 1; m <= d; ++m)
        for (const Word& w : words_over(2 * S.h, m, m)) {
            ConstPoly coef = normalize_loop_const(w, c);
            if (coef.is_zero()) continue;
            EnvElem prod = S.lam[w[0] - 1];
            for (size_t k = 1; k < w.size() && !prod.is_zero(); ++k)
                prod = env_mul(prod, S.lam[w[k] - 1]);
            acc += prod.part(d) * coef;
        }
    if (c > S.h)
        acc.add_term(Word((size_t)d, c - S.h), ConstPoly(Rational(-1) / factorial(d)));
    return acc;
}

// ---- g and its inverse --------------------------------------------------------------

struct SeriesBundle {
    FormCtx ctx;
    LambdaSolution sol;
    FormVal g, ginv;
};

inline SeriesBundle compute_g(const LambdaSolution& S) {
    FormCtx c;
    c.h = S.h;
    c.D = S.D;
    SeriesBundle B{c, S, form_unit(c), form_unit(c)};
    for (int m = 1; m <= S.D; ++m)
        for (const Word& w : words_over(2 * S.h, m, m)) {
            EnvElem fwd = S.lam[w[0] - 1];
            for (size_t k = 1; k < w.size() && !fwd.is_zero(); ++k)
                fwd = env_mul(fwd, S.lam[w[k] - 1]);
            EnvElem rev = S.lam[w[m - 1] - 1];
            for (int k = m - 2; k >= 0 && !rev.is_zero(); --k)
                rev = env_mul(rev, S.lam[w[k] - 1]);
            if (fwd.is_zero() && rev.is_zero()) continue;
            FuncMono fm{FuncSym{w, 1}};
            for (const auto& [u, cc] : fwd.terms)
                B.ginv.add_term(TermKey{fm, BaseForm::fun(), u}, cc);
            Rational sgn = (m % 2) ? -1 : 1;
            for (const auto& [u, cc] : rev.terms)
                B.g.add_term(TermKey{fm, BaseForm::fun(), u}, cc * sgn);
        }
    return B;
}

// ---- lambda = log(g), two routes ---------------------------------------------------

// closed loop integral of a gamma-valued series (the Lie slot is carried along)
inline FormVal loop_integral(int cyc, const FormVal& x) {
    FormVal ex = omega_expand(x);
    FormVal out(x.ctx);
    for (const auto& [k, c] : ex.terms) {
        if (k.base.kind != BaseForm::Gamma)
            throw std::invalid_argument("loop_integral expects gamma-valued terms");
        if (k.funcs.size() > 1) throw std::invalid_argument("loop_integral: single coordinate");
        Word w = k.funcs.empty() ? Word{} : k.funcs[0].word;
        w.push_back(k.base.index);
        ConstPoly q = normalize_loop_const(w, cyc);
        if (!q.is_zero()) out.add_term(TermKey{FuncMono{}, BaseForm::fun(), k.lie}, c * q);
    }
    return out;
}

// recursion in terms of loop integrals and primitives; entry [d] is homogeneous
inline std::vector<FormVal> lambda_series(int h, int D) {
    FormCtx c;
    c.h = h;
    c.D = D;
    std::vector<FormVal> lam((size_t)D + 1, FormVal(c));
    for (int i = 1; i <= h; ++i)
        lam[1].add_term(TermKey{FuncMono{FuncSym{{(Letter)(h + i)}, 1}}, BaseForm::fun(),
                                {(Letter)i}},
                        ConstPoly(-1));
    for (int d = 2; d <= D; ++d) {
        FormVal acc(c);
        for (int k = 1; k <= d - 1; ++k) {
            ConstPoly pref(Rational(1) / factorial(k + 1));
            for (const auto& comp : compositions(d, k + 1)) {
                FormVal N = differential(lam[comp[k]]);
                for (int i = k - 1; i >= 0; --i) N = form_commutator(lam[comp[i]], N);
                if (N.is_zero()) continue;
                FormVal t(c);
                for (int cyc = 1; cyc <= 2 * h; ++cyc)
                    t += form_mul(fun_sym_term(c, {(Letter)cyc}), loop_integral(cyc, N));
                t -= path_primitive(N);
                acc += t * pref;
            }
        }
        lam[d] = acc;
    }
    return lam;
}

inline FormVal lambda_total(const std::vector<FormVal>& lam) {
    FormVal out = lam[1];
    for (size_t d = 2; d < lam.size(); ++d) out += lam[d];
    return out;
}

inline FormVal form_exp(const FormVal& x) {
    if (!x.part(0).is_zero()) throw std::invalid_argument("form_exp: no degree-0 part allowed");
    FormVal out = form_unit(x.ctx), p = form_unit(x.ctx);
    for (int k = 1; k <= x.ctx.D; ++k) {
        p = form_mul(p, x) * ConstPoly(Rational(1) / k);
        if (p.is_zero()) break;
        out += p;
    }
    return out;
}

// direct logarithm of the series g
inline FormVal log_of_g(const SeriesBundle& B) {
    FormVal x = B.g - form_unit(B.ctx);
    FormVal out(B.ctx), p = x;
    for (int k = 1; k <= B.ctx.D && !p.is_zero(); ++k) {
        Rational coef = Rational((k % 2) ? 1 : -1) / k;
        out += p * ConstPoly(coef);
        p = form_mul(p, x);
    }
    return out;
}

// ---- I, two routes ---------------------------------------------------------------------

inline FormVal compute_I(int h, int D, const std::vector<FormVal>& lam) {
    FormCtx c;
    c.h = h;
    c.D = D;
    FormVal I(c);
    for (int i = 1; i <= h; ++i)
        I.add_term(TermKey{FuncMono{}, BaseForm::gamma(h + i), {(Letter)i}}, ConstPoly(1));
    for (int d = 2; d <= D; ++d)
        for (int k = 1; k <= d - 1; ++k) {
            ConstPoly pref(Rational(-1) / factorial(k + 1));
            for (const auto& comp : compositions(d, k + 1)) {
                FormVal N = differential(lam[comp[k]]);
                for (int i = k - 1; i >= 0; --i) N = form_commutator(lam[comp[i]], N);
                if (N.is_zero()) continue;
                for (int cyc = 1; cyc <= 2 * h; ++cyc) {
                    FormVal li = loop_integral(cyc, N);
                    if (!li.is_zero())
                        I += form_mul(base_val(c, BaseForm::gamma(cyc)), li) * pref;
                }
            }
        }
    return I;
}

inline FormVal compute_I_direct(const SeriesBundle& B) {
    return form_mul(B.g, differential(B.ginv));
}

// ---- K and H ---------------------------------------------------------------------------

inline FormVal op_big(const FormVal& x) { return psi_apply(x) + op_apply(x) - x; }

inline FormVal bernoulli_seed(const FormCtx& c, int j) {
    FormVal v(c);
    for (int d = 0; d <= c.D; ++d)
        v.add_term(TermKey{FuncMono{}, BaseForm::omega(j), Word((size_t)d, j)},
                   ConstPoly(bernoulli(d) / factorial(d)));
    return v;
}

inline FormVal compute_K(const SeriesBundle& B, int j) {
    FormVal gm1 = B.g - form_unit(B.ctx);
    FormVal K = bernoulli_seed(B.ctx, j), cur = K;
    for (int r = 0; r < B.ctx.D; ++r) {
        cur = op_big(form_mul(gm1, cur));
        if (cur.is_zero()) break;
        K += cur;
    }
    return K;
}

inline FormVal compute_H(const SeriesBundle& B, const FormVal& K, int j) {
    FormVal x = form_mul(B.g - form_unit(B.ctx), K);
    return psi_apply(x) + op_apply(x) + bernoulli_seed(B.ctx, j);
}

// residual of the defining fixed-point equation; equals the seed for a valid K
inline FormVal fixed_point_image(const SeriesBundle& B, const FormVal& K) {
    return K - op_big(form_mul(B.g - form_unit(B.ctx), K));
}

// the coefficient 1-forms of K, indexed by words in the b-letters
inline FormVal resolve_omega_word(const SeriesBundle& B, const Word& w, int j) {
    if ((int)w.size() + 1 > B.ctx.D + 1)
        throw std::invalid_argument("resolve_omega_word: word too long for this context");
    std::map<Word, FormVal> gcoef;
    for (const auto& [k, c] : B.g.terms) {
        auto it = gcoef.find(k.lie);
        if (it == gcoef.end()) it = gcoef.emplace(k.lie, FormVal(B.ctx)).first;
        it->second.add_term(TermKey{k.funcs, k.base, {}}, c);
    }
    std::map<Word, FormVal> memo;
    std::function<const FormVal&(const Word&)> rec = [&](const Word& u) -> const FormVal& {
        auto mit = memo.find(u);
        if (mit != memo.end()) return mit->second;
        FormVal out(B.ctx);
        bool all_j = std::all_of(u.begin(), u.end(), [&](Letter l) { return l == j; });
        if (all_j)
            out += base_val(B.ctx, BaseForm::omega(j),
                            ConstPoly(bernoulli((int)u.size()) / factorial((int)u.size())));
        for (size_t p = 1; p <= u.size(); ++p) {
            Word head(u.begin(), u.begin() + p), rest(u.begin() + p, u.end());
            auto git = gcoef.find(head);
            if (git == gcoef.end()) continue;
            const FormVal& inner = rec(rest);
            if (!inner.is_zero()) out += op_big(form_mul(git->second, inner));
        }
        return memo.emplace(u, std::move(out)).first->second;
    };
    return rec(w);
}

// ---- symbol-level forms for configuration-space components -------------------------------

inline FormVal symbolic_K(const FormCtx& c, int j) {
    FormVal v(c);
    for (const Word& u : words_over(c.h, 0, c.D)) {
        Word w = u;
        w.push_back(j);
        v.add_term(TermKey{FuncMono{}, BaseForm::omegaw(w), u}, ConstPoly(1));
    }
    return v;
}

inline FormVal symbolic_underK(const FormCtx& c) {
    FormVal v(c);
    v.add_term(TermKey{FuncMono{}, BaseForm::psiw({}, 1, 2), {}}, ConstPoly(1));
    for (const Word& w : words_over(c.h, 1, c.D))
        v.add_term(TermKey{FuncMono{}, BaseForm::psiw(w, 1, 2), w}, ConstPoly(1));
    return v;
}

// ---- tuples and assembly into t_{h,n} -----------------------------------------------------

struct FormTuple {
    std::vector<FormVal> kappa; // single-coordinate components, index j-1
    FormVal under;              // pair-coordinate component on coordinates (1,2)
};

inline FormTuple forms_to_tuple(const FormVal& delta, int h) {
    FormTuple T;
    for (int i = 1; i <= h; ++i) {
        FormVal bi(delta.ctx);
        bi.add_term(TermKey{FuncMono{}, BaseForm::fun(), {(Letter)i}}, ConstPoly(1));
        T.kappa.push_back(form_mul(delta, bi));
    }
    T.under = delta;
    return T;
}

inline FormCtx thn_ctx(const std::shared_ptr<const ThnPresentation>& P) {
    FormCtx c;
    c.h = P->h;
    c.n = P->n;
    c.D = P->D;
    c.alg = FormCtx::Thn;
    c.pres = P;
    return c;
}

inline FormVal tuple_to_bold(const FormTuple& T,
                             const std::shared_ptr<const ThnPresentation>& P) {
    if (P->n < 1) throw std::invalid_argument("tuple_to_bold: need n >= 1");
    FormCtx c = thn_ctx(P);
    FormVal out(c);
    auto add_ad = [&](const FormVal& x, int target_letter, int coord2_to) {
        for (const auto& [k, coef] : x.terms) {
            Word u;
            for (Letter l : k.lie) u.push_back(P->b_letter(l, 1));
            ThnElem res = ad_env_apply(P, u, thn_generator(P, target_letter));
            if (res.is_zero()) continue;
            FuncMono m;
            for (FuncSym fs : k.funcs) {
                if (fs.coord == 2 && coord2_to) fs.coord = coord2_to;
                m.insert(std::upper_bound(m.begin(), m.end(), fs), fs);
            }
            BaseForm b = k.base;
            if (coord2_to && b.kind == BaseForm::PsiW && b.coord2 == 2) b.coord2 = coord2_to;
            for (const auto& [id, cc] : res.coords)
                out.add_term(TermKey{m, b, {id}}, coef * cc);
        }
    };
    for (int i = 1; i <= P->h; ++i) add_ad(T.kappa[i - 1], P->a_letter(i, 1), 0);
    for (int r = 2; r <= P->n; ++r) add_ad(T.under, P->t_letter(1, r), r);
    return out;
}

// ---- gamma-twisted maps between multi-valued and single-valued forms ----------------------

// right deconcatenation by b_i on the env slot
inline FormVal env_partial_form(const FormVal& x, int i) {
    FormVal out(x.ctx);
    for (const auto& [k, c] : x.terms) {
        if (k.lie.empty() || k.lie.back() != i) continue;
        Word u(k.lie.begin(), k.lie.end() - 1);
        out.add_term(TermKey{k.funcs, k.base, u}, c);
    }
    return out;
}

inline FormVal env_antipode_form(const FormVal& x) {
    FormVal out(x.ctx);
    for (const auto& [k, c] : x.terms) {
        Word u(k.lie.rbegin(), k.lie.rend());
        Rational sgn = (k.lie.size() % 2) ? -1 : 1;
        out.add_term(TermKey{k.funcs, k.base, u}, c * sgn);
    }
    return out;
}

inline FormVal form_inverse(const FormVal& x) {
    FormVal one = form_unit(x.ctx);
    FormVal y = one - x; // no constant term
    if (!y.part(0).is_zero()) throw std::invalid_argument("form_inverse: constant term must be 1");
    FormVal out = one, p = y;
    for (int k = 1; k <= x.ctx.D && !p.is_zero(); ++k) {
        out += p;
        p = form_mul(p, y);
    }
    return out;
}

// check the properties required of the twisting function gamma
inline void check_gamma(const FormVal& gamma) {
    FormVal p0 = gamma.part(0);
    if (!(p0 == form_unit(gamma.ctx)))
        throw std::invalid_argument("gamma must have constant term 1");
    for (int i = 1; i <= gamma.ctx.h; ++i) {
        FormVal res = deck_pullback({DeckLetter{gamma.ctx.h + i, 1}}, gamma) -
                      form_mul(gamma, env_exp_letter(gamma.ctx, i, -1));
        if (!res.is_zero())
            throw std::invalid_argument("gamma lacks the required B-monodromy");
    }
    // group-likeness: the logarithm must be primitive in the env slot
    FormVal lg(gamma.ctx), p = gamma - form_unit(gamma.ctx);
    FormVal x = p;
    for (int k = 1; k <= gamma.ctx.D && !p.is_zero(); ++k) {
        lg += p * ConstPoly(Rational((k % 2) ? 1 : -1) / k);
        p = form_mul(p, x);
    }
    std::map<std::pair<FuncMono, BaseForm>, EnvElem> groups;
    AlgCtx ectx(gamma.ctx.h, gamma.ctx.D);
    for (const auto& [k, c] : lg.terms) {
        auto key = std::make_pair(k.funcs, k.base);
        auto it = groups.find(key);
        if (it == groups.end()) it = groups.emplace(key, EnvElem(ectx)).first;
        it->second.add_term(k.lie, c);
    }
    for (const auto& [key, env] : groups)
        env_to_lie(env); // throws if some coefficient is not primitive
}

inline FormVal s_gamma(const FormVal& gamma, const FormVal& delta) {
    check_gamma(gamma);
    return form_mul(gamma, delta);
}

inline FormTuple S_gamma(const FormVal& gamma, const FormTuple& T) {
    check_gamma(gamma);
    FormTuple out;
    for (const FormVal& k : T.kappa) out.kappa.push_back(form_mul(gamma, k));
    FormVal g2 = coord_relabel(gamma, [](int c) { return c == 1 ? 2 : c; });
    out.under = form_mul(form_mul(gamma, T.under), form_inverse(g2));
    for (int i = 1; i <= gamma.ctx.h; ++i) {
        FormVal tail = coord_relabel(env_antipode_form(env_partial_form(gamma, i)),
                                     [](int c) { return c == 1 ? 2 : c; });
        out.under += form_mul(form_mul(gamma, T.kappa[i - 1]), tail);
    }
    return out;
}

// embed a Lie-valued env-letter FormVal into t_{h,n} at coordinate r
inline FormVal form_embed_thn(const FormVal& x, const std::shared_ptr<const ThnPresentation>& P,
                              int r) {
    FormCtx c = thn_ctx(P);
    AlgCtx full(2 * P->h, P->D);
    std::map<std::pair<FuncMono, BaseForm>, EnvElem> groups;
    for (const auto& [k, v] : x.terms) {
        auto key = std::make_pair(k.funcs, k.base);
        auto it = groups.find(key);
        if (it == groups.end()) it = groups.emplace(key, EnvElem(full)).first;
        Word u;
        for (Letter l : k.lie) u.push_back(P->h + l); // b-letters of the free source
        it->second.add_term(u, v);
    }
    FormVal out(c);
    for (const auto& [key, env] : groups) {
        ThnElem e = thn_embed_r(P, env_to_lie(env), r);
        FuncMono m;
        for (FuncSym fs : key.first) {
            fs.coord = (fs.coord == 1) ? r : fs.coord;
            m.insert(std::upper_bound(m.begin(), m.end(), fs), fs);
        }
        BaseForm b = key.second;
        if (b.kind != BaseForm::Fun && b.coord == 1) b.coord = r;
        for (const auto& [id, cc] : e.coords) out.add_term(TermKey{m, b, {id}}, cc);
    }
    return out;
}

// bracket of t_{h,n}-Lie-valued FormVals (each term carries a single basis id)
inline FormVal form_thn_bracket(const FormVal& a, const FormVal& b) {
    const auto& P = a.ctx.pres;
    FormVal out(a.ctx);
    for (const auto& [k1, c1] : a.terms)
        for (const auto& [k2, c2] : b.terms) {
            if (k1.lie.size() != 1 || k2.lie.size() != 1)
                throw std::invalid_argument("form_thn_bracket expects Lie-valued terms");
            if (k1.base.kind != BaseForm::Fun && k2.base.kind != BaseForm::Fun)
                throw std::invalid_argument("product of two 1-forms");
            const BaseForm& base = (k1.base.kind != BaseForm::Fun) ? k1.base : k2.base;
            const auto& br = thn_basis_bracket(P, k1.lie[0], k2.lie[0]);
            if (br.empty()) continue;
            ConstPoly coef = c1 * c2;
            for (const auto& [m, q] : funcmono_mul(k1.funcs, k2.funcs))
                for (const auto& [id, cc] : br)
                    out.add_term(TermKey{m, base, {id}}, coef * Rational(q * rat_num(cc), rat_den(cc)));
        }
    return out;
}

// Ad by the product over coordinates of exp(lambda), applied to a Lie-valued element
inline FormVal bold_s_gamma(const FormVal& lambda, const FormVal& boldx) {
    const auto& P = boldx.ctx.pres;
    FormVal y = boldx;
    for (int r = 1; r <= P->n; ++r) {
        FormVal lr = form_embed_thn(lambda, P, r);
        FormVal acc = y, term = y;
        for (int k = 1; k <= boldx.ctx.D; ++k) {
            term = form_thn_bracket(lr, term) * Rational(1, k);
            if (term.is_zero()) break;
            acc += term;
        }
        y = acc;
    }
    return y;
}

// ---- assembly of the Maurer-Cartan elements ----------------------------------------------

// swap coordinates 1 and r everywhere (functions, base forms, Lie values)
inline FormVal transpose_1r(const FormVal& x, int r) {
    if (r == 1) return x;
    const auto& P = x.ctx.pres;
    std::vector<int> sigma(P->n + 1);
    for (int s = 0; s <= P->n; ++s) sigma[s] = s;
    std::swap(sigma[1], sigma[r]);
    auto f = [&](int c) { return sigma[c]; };
    FormVal out(x.ctx);
    for (const auto& [k, v] : coord_relabel(x, f).terms) {
        if (k.lie.size() != 1) throw std::invalid_argument("transpose_1r expects Lie-valued terms");
        ThnElem im = thn_permute_basis(P, k.lie[0], sigma);
        for (const auto& [id, cc] : im.coords) out.add_term(TermKey{k.funcs, k.base, {id}}, v * cc);
    }
    return out;
}

inline FormTuple k_tuple(const SeriesBundle& B, const FormCtx& cn) {
    FormTuple T;
    for (int j = 1; j <= B.ctx.h; ++j) T.kappa.push_back(re_ctx(compute_K(B, j), cn));
    T.under = symbolic_underK(cn);
    return T;
}

inline FormVal assemble_boldK(const SeriesBundle& B,
                              const std::shared_ptr<const ThnPresentation>& P) {
    FormCtx cn = B.ctx;
    cn.n = P->n;
    FormVal K1 = tuple_to_bold(k_tuple(B, cn), P);
    FormVal out = K1;
    for (int r = 2; r <= P->n; ++r) out += transpose_1r(K1, r);
    return out;
}

inline FormVal assemble_boldJ(const SeriesBundle& B,
                              const std::shared_ptr<const ThnPresentation>& P) {
    FormCtx cn = B.ctx;
    cn.n = P->n;
    auto lam = lambda_series(B.ctx.h, B.ctx.D);
    FormVal I = compute_I(B.ctx.h, B.ctx.D, lam);
    FormVal H1 = tuple_to_bold(S_gamma(re_ctx(B.g, cn), k_tuple(B, cn)), P);
    FormVal out(thn_ctx(P));
    for (int r = 1; r <= P->n; ++r) {
        out += form_embed_thn(re_ctx(I, cn), P, r);
        out += transpose_1r(H1, r);
    }
    return out;
}

// ---- monodromy residuals -------------------------------------------------------------------

inline FormVal residual_g(const SeriesBundle& B, const DeckLetter& t) {
    FormVal pb = deck_pullback({t}, B.g);
    if (t.cycle <= B.ctx.h) return pb - B.g;
    return pb - form_mul(B.g, env_exp_letter(B.ctx, t.cycle - B.ctx.h, -1));
}

inline FormVal residual_K(const SeriesBundle& B, const FormVal& K, int j) {
    FormVal pb = deck_pullback({DeckLetter{B.ctx.h + j, 1}}, K);
    return pb - form_mul(env_exp_letter(B.ctx, j, +1), K);
}

inline FormVal residual_H(const FormVal& H, int j) {
    return deck_pullback({DeckLetter{H.ctx.h + j, 1}}, H) - H;
}

// the id of a degree-1 quotient generator, which is always a basis element
inline int thn_gen_id(const std::shared_ptr<const ThnPresentation>& P, int letter) {
    ThnElem e = thn_generator(P, letter);
    if (e.coords.size() != 1 || !(e.coords.begin()->second == ConstPoly(1)))
        throw std::logic_error("degree-1 generator is not a basis element");
    return e.coords.begin()->first;
}

// product over coordinates of g, valued in the enveloping algebra of t_{h,n}
inline FormVal bold_g(const SeriesBundle& B, const std::shared_ptr<const ThnPresentation>& P) {
    FormCtx c = thn_ctx(P);
    FormVal out = form_unit(c);
    for (int r = 1; r <= P->n; ++r) {
        FormVal gr(c);
        for (const auto& [k, v] : B.g.terms) {
            FuncMono m;
            for (FuncSym fs : k.funcs) {
                fs.coord = r;
                m.insert(std::upper_bound(m.begin(), m.end(), fs), fs);
            }
            PbwPoly pw{{PbwMono{}, 1}};
            for (Letter l : k.lie) {
                PbwMono gen{thn_gen_id(P, P->b_letter(l, r))};
                PbwPoly nx;
                for (const auto& [mo, q] : pw)
                    for (const auto& [mo2, q2] : pbw_mul(P, mo, gen)) nx[mo2] += q * q2;
                pw = std::move(nx);
            }
            for (const auto& [mo, q] : pw)
                if (q != 0) gr.add_term(TermKey{m, k.base, mo}, v * q);
        }
        out = form_mul(out, gr);
    }
    return out;
}

inline FormVal residual_bold_g(const FormVal& bg, int i, int r) {
    const auto& P = bg.ctx.pres;
    int id = thn_gen_id(P, P->b_letter(i, r));
    FormVal e(bg.ctx);
    for (int l = 0; l * P->basis_deg(id) <= bg.ctx.D; ++l)
        e.add_term(TermKey{FuncMono{}, BaseForm::fun(), PbwMono((size_t)l, id)},
                   ConstPoly(Rational((l % 2) ? -1 : 1) / factorial(l)));
    return deck_pullback({DeckLetter{P->h + i, r}}, bg) - form_mul(bg, e);
}

// ---- base-point difference symbols ----------------------------------------------------------
//
// The change-of-pole forms are modeled as formal signed combinations of pole labels,
// all anchored at a common reference point, so the cocycle identity is structural.
struct PoleDiff {
    bool svalued = false; // transported by s_gamma
    std::map<std::string, Rational> pts;

    PoleDiff operator+(const PoleDiff& o) const {
        if (svalued != o.svalued) throw std::invalid_argument("mixed pole-difference families");
        PoleDiff r = *this;
        for (const auto& [p, c] : o.pts) {
            r.pts[p] += c;
            if (r.pts[p] == 0) r.pts.erase(p);
        }
        return r;
    }
    bool operator==(const PoleDiff& o) const { return svalued == o.svalued && pts == o.pts; }
};

inline PoleDiff d_symbol(const std::string& P, const std::string& Pp) {
    PoleDiff d;
    if (P != Pp) {
        d.pts[P] = 1;
        d.pts[Pp] = -1;
    }
    return d;
}

inline PoleDiff e_symbol(const std::string& P, const std::string& Pp) {
    PoleDiff d = d_symbol(P, Pp);
    d.svalued = true;
    return d;
}

} // namespace mcforms
