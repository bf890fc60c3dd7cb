#pragma once

#include "mcforms/thn.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

namespace mcforms {

// ---- iterated-integral function symbols ------------------------------------

// [i1,...,im|.] attached to coordinate r of the configuration space.
struct FuncSym {
    Word word;
    int coord = 1;
    auto tie() const { return std::tie(coord, word); }
    bool operator<(const FuncSym& o) const { return tie() < o.tie(); }
    bool operator==(const FuncSym& o) const { return tie() == o.tie(); }
    std::string str() const {
        std::ostringstream os;
        os << "[";
        for (size_t k = 0; k < word.size(); ++k) {
            if (k) os << " ";
            os << word[k];
        }
        os << "|.";
        if (coord != 1) os << coord;
        os << "]";
        return os.str();
    }
};

// product of FuncSyms with pairwise distinct coords, sorted by coord
using FuncMono = std::vector<FuncSym>;

inline std::string funcmono_str(const FuncMono& m) {
    std::string s;
    for (const auto& f : m) {
        if (!s.empty()) s += " ";
        s += f.str();
    }
    return s;
}

// shuffle-merge two monomials; same-coordinate pairs collapse by shuffling
inline std::map<FuncMono, Int> funcmono_mul(const FuncMono& a, const FuncMono& b) {
    std::map<FuncMono, Int> acc;
    acc[a] = 1;
    for (const FuncSym& f : b) {
        std::map<FuncMono, Int> next;
        for (const auto& [m, c] : acc) {
            auto it = std::find_if(m.begin(), m.end(),
                                   [&](const FuncSym& g) { return g.coord == f.coord; });
            if (it == m.end()) {
                FuncMono m2 = m;
                m2.insert(std::upper_bound(m2.begin(), m2.end(), f), f);
                next[m2] += c;
            } else {
                FuncMono rest = m;
                Word other = it->word;
                rest.erase(rest.begin() + (it - m.begin()));
                for (const auto& [w, q] : shuffle_words(other, f.word)) {
                    FuncMono m2 = rest;
                    FuncSym nf{w, f.coord};
                    m2.insert(std::upper_bound(m2.begin(), m2.end(), nf), nf);
                    next[m2] += c * q;
                }
            }
        }
        acc = std::move(next);
    }
    return acc;
}

// ConstPoly-linear combination of FuncMonos
struct FuncExpr {
    std::map<FuncMono, ConstPoly> terms;

    FuncExpr() = default;
    FuncExpr(const ConstPoly& c) {
        if (!c.is_zero()) terms[FuncMono{}] = c;
    }
    static FuncExpr sym(Word w, int coord = 1, ConstPoly c = ConstPoly(1)) {
        FuncExpr f;
        if (!c.is_zero()) f.terms[FuncMono{FuncSym{std::move(w), coord}}] = std::move(c);
        return f;
    }
    bool is_zero() const { return terms.empty(); }
    bool operator==(const FuncExpr& o) const { return terms == o.terms; }
    void add_term(const FuncMono& m, const ConstPoly& c) {
        if (c.is_zero()) return;
        auto it = terms.find(m);
        if (it == terms.end()) terms.emplace(m, c);
        else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
    FuncExpr& operator+=(const FuncExpr& o) {
        for (const auto& [m, c] : o.terms) add_term(m, c);
        return *this;
    }
    FuncExpr operator+(const FuncExpr& o) const { FuncExpr r = *this; r += o; return r; }
    FuncExpr operator-() const {
        FuncExpr r = *this;
        for (auto& [m, c] : r.terms) c = -c;
        return r;
    }
};

inline FuncExpr func_mul(const FuncExpr& f, const FuncExpr& g) {
    FuncExpr out;
    for (const auto& [m1, c1] : f.terms)
        for (const auto& [m2, c2] : g.terms)
            for (const auto& [m, q] : funcmono_mul(m1, m2)) out.add_term(m, c1 * c2 * Rational(q));
    return out;
}

// ---- base forms and 1-form expressions --------------------------------------

struct FormMono;

struct BaseForm {
    enum Kind { Fun = 0, Gamma, Omega, OmegaW, PsiW, Psi, Op };
    Kind kind = Fun;
    int index = 0;  // Gamma: 1..2h, Omega: 1..h
    int coord = 1;
    int coord2 = 0; // PsiW second slot
    Word word;      // OmegaW / PsiW
    std::shared_ptr<const FormMono> arg; // Psi / Op

    bool operator<(const BaseForm& o) const;
    bool operator==(const BaseForm& o) const { return !(*this < o) && !(o < *this); }

    static BaseForm fun() { return BaseForm{}; }
    static BaseForm gamma(int i, int coord = 1) {
        BaseForm b; b.kind = Gamma; b.index = i; b.coord = coord; return b;
    }
    static BaseForm omega(int i, int coord = 1) {
        BaseForm b; b.kind = Omega; b.index = i; b.coord = coord; return b;
    }
    static BaseForm omegaw(Word w, int coord = 1) {
        BaseForm b; b.kind = OmegaW; b.word = std::move(w); b.coord = coord; return b;
    }
    static BaseForm psiw(Word w, int r, int s) {
        BaseForm b; b.kind = PsiW; b.word = std::move(w); b.coord = r; b.coord2 = s; return b;
    }
    static BaseForm psi_node(std::shared_ptr<const FormMono> a) {
        BaseForm b; b.kind = Psi; b.arg = std::move(a); return b;
    }
    static BaseForm op_node(std::shared_ptr<const FormMono> a) {
        BaseForm b; b.kind = Op; b.arg = std::move(a); return b;
    }

    std::string str(int h) const;
};

// a coefficient-free monomial (functions x base), the payload of Psi/op nodes
struct FormMono {
    FuncMono funcs;
    BaseForm base;
    bool operator<(const FormMono& o) const {
        if (funcs != o.funcs) return funcs < o.funcs;
        return base < o.base;
    }
    std::string str(int h) const {
        std::string s = funcmono_str(funcs);
        std::string b = base.str(h);
        if (!b.empty()) {
            if (!s.empty()) s += " ";
            s += b;
        }
        return s.empty() ? "1" : s;
    }
};

inline bool BaseForm::operator<(const BaseForm& o) const {
    auto lhs = std::tie(kind, index, coord, coord2, word);
    auto rhs = std::tie(o.kind, o.index, o.coord, o.coord2, o.word);
    if (lhs != rhs) return lhs < rhs;
    bool la = (arg != nullptr), ra = (o.arg != nullptr);
    if (la != ra) return la < ra;
    if (!la) return false;
    return *arg < *o.arg;
}

inline std::string BaseForm::str(int h) const {
    std::ostringstream os;
    auto coordsuf = [&](int c) { return c == 1 ? std::string() : "^(" + std::to_string(c) + ")"; };
    switch (kind) {
        case Fun: return "";
        case Gamma:
            if (index <= h) os << "alpha_" << index;
            else os << "beta_" << (index - h);
            os << coordsuf(coord);
            break;
        case Omega: os << "omega_" << index << coordsuf(coord); break;
        case OmegaW: {
            os << "omegaw{";
            for (size_t k = 0; k < word.size(); ++k) {
                if (k) os << " ";
                os << word[k];
            }
            os << "}" << coordsuf(coord);
            break;
        }
        case PsiW: {
            os << "psiw{";
            for (size_t k = 0; k < word.size(); ++k) {
                if (k) os << " ";
                os << word[k];
            }
            os << "}^(" << coord << "," << coord2 << ")";
            break;
        }
        case Psi: os << "Psi(" << arg->str(h) << ")"; break;
        case Op: os << "op(" << arg->str(h) << ")"; break;
    }
    return os.str();
}

// ---- FormVal ----------------------------------------------------------------

// Lie slot of a term. EnvB: a word in b_1..b_h (letters 1..h).
// Thn: a PBW monomial of quotient-basis ids (a single id for Lie-valued data).
using LieKey = std::vector<int>;

struct FormCtx {
    enum Alg { EnvB = 0, Thn = 1 };
    int h = 1, n = 1, D = 3;
    Alg alg = EnvB;
    std::shared_ptr<const ThnPresentation> pres;

    bool operator==(const FormCtx& o) const {
        return h == o.h && n == o.n && D == o.D && alg == o.alg && pres == o.pres;
    }
    int lie_deg(const LieKey& l) const {
        if (alg == EnvB) return (int)l.size();
        int s = 0;
        for (int id : l) s += pres->basis_deg(id);
        return s;
    }
};

struct TermKey {
    FuncMono funcs;
    BaseForm base;
    LieKey lie;
    bool operator==(const TermKey& o) const {
        return funcs == o.funcs && base == o.base && lie == o.lie;
    }
    bool operator<(const TermKey& o) const {
        if (funcs != o.funcs) return funcs < o.funcs;
        if (base < o.base || o.base < base) return base < o.base;
        return lie < o.lie;
    }
};

struct FormVal {
    FormCtx ctx;
    std::map<TermKey, ConstPoly> terms;

    FormVal() = default;
    explicit FormVal(FormCtx c) : ctx(std::move(c)) {}
    static FormVal scalar(const FormCtx& c, const ConstPoly& coef) {
        FormVal v(c);
        if (!coef.is_zero()) v.terms[TermKey{}] = coef;
        return v;
    }

    bool is_zero() const { return terms.empty(); }
    bool operator==(const FormVal& o) const { return terms == o.terms; }

    void add_term(const TermKey& k, const ConstPoly& c) {
        if (c.is_zero() || ctx.lie_deg(k.lie) > ctx.D) return;
        auto it = terms.find(k);
        if (it == terms.end()) terms.emplace(k, c);
        else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
    FormVal& operator+=(const FormVal& o) {
        if (!(ctx == o.ctx)) throw std::invalid_argument("FormVal context mismatch");
        for (const auto& [k, c] : o.terms) add_term(k, c);
        return *this;
    }
    FormVal operator+(const FormVal& o) const { FormVal r = *this; r += o; return r; }
    FormVal operator-() const {
        FormVal r = *this;
        for (auto& [k, c] : r.terms) c = -c;
        return r;
    }
    FormVal& operator-=(const FormVal& o) { return *this += -o; }
    FormVal operator-(const FormVal& o) const { FormVal r = *this; r -= o; return r; }
    FormVal operator*(const ConstPoly& s) const {
        FormVal r(ctx);
        for (const auto& [k, c] : terms) r.add_term(k, c * s);
        return r;
    }
    FormVal operator*(const Rational& s) const { return *this * ConstPoly(s); }

    FormVal part(int d) const { // homogeneous in Lie weight
        FormVal r(ctx);
        for (const auto& [k, c] : terms)
            if (ctx.lie_deg(k.lie) == d) r.terms.emplace(k, c);
        return r;
    }
    int max_present_deg() const {
        int m = 0;
        for (const auto& [k, c] : terms) m = std::max(m, ctx.lie_deg(k.lie));
        return m;
    }
};

// product; at most one of the two factors may carry a (non-Fun) base per term
inline FormVal form_mul(const FormVal& a, const FormVal& b) {
    if (!(a.ctx == b.ctx)) throw std::invalid_argument("FormVal context mismatch");
    FormVal out(a.ctx);
    for (const auto& [k1, c1] : a.terms)
        for (const auto& [k2, c2] : b.terms) {
            if (k1.base.kind != BaseForm::Fun && k2.base.kind != BaseForm::Fun)
                throw std::invalid_argument("product of two 1-forms");
            const BaseForm& base = (k1.base.kind != BaseForm::Fun) ? k1.base : k2.base;
            ConstPoly coef = c1 * c2;
            std::vector<std::pair<LieKey, Rational>> lies;
            if (a.ctx.alg == FormCtx::EnvB) {
                LieKey l = k1.lie;
                l.insert(l.end(), k2.lie.begin(), k2.lie.end());
                lies.push_back({std::move(l), 1});
            } else {
                for (const auto& [m, q] : pbw_mul(a.ctx.pres, k1.lie, k2.lie))
                    lies.push_back({m, q});
            }
            for (const auto& [m, fq] : funcmono_mul(k1.funcs, k2.funcs))
                for (const auto& [l, lq] : lies)
                    out.add_term(TermKey{m, base, l}, coef * Rational(fq * rat_num(lq), rat_den(lq)));
        }
    return out;
}

inline FormVal form_commutator(const FormVal& a, const FormVal& b) {
    return form_mul(a, b) - form_mul(b, a);
}

// ---- differential -----------------------------------------------------------

// d[i1...im|.] = [i1...i_{m-1}|.] gamma_{im}; Leibniz over monomials.
inline FormVal differential(const FormVal& f) {
    FormVal out(f.ctx);
    for (const auto& [k, c] : f.terms) {
        if (k.base.kind != BaseForm::Fun)
            throw std::invalid_argument("differential expects function terms");
        for (size_t idx = 0; idx < k.funcs.size(); ++idx) {
            const FuncSym& fs = k.funcs[idx];
            if (fs.word.empty()) continue;
            FuncMono m = k.funcs;
            Word w = fs.word;
            Letter last = w.back();
            w.pop_back();
            if (w.empty()) m.erase(m.begin() + idx);
            else m[idx].word = w;
            out.add_term(TermKey{m, BaseForm::gamma(last, fs.coord), k.lie}, c);
        }
    }
    return out;
}

// ---- deck transformations -----------------------------------------------------

struct DeckLetter {
    Cycle cycle = 1; // 1..h: A_j, h+1..2h: B_j
    int coord = 1;
};
using DeckWord = std::vector<DeckLetter>;

// pullback of a single FuncSym by one deck letter (same coordinate):
// theta^* [w|.] = sum_{w=uv} (int_theta gamma_u) [v|.]
inline FuncExpr deck_pullback_sym(const DeckLetter& t, const FuncSym& f) {
    FuncExpr out;
    for (size_t cut = 0; cut <= f.word.size(); ++cut) {
        Word u(f.word.begin(), f.word.begin() + cut);
        Word v(f.word.begin() + cut, f.word.end());
        ConstPoly c = normalize_loop_const(u, t.cycle);
        if (c.is_zero()) continue;
        if (v.empty()) out.add_term(FuncMono{}, c);
        else out.add_term(FuncMono{FuncSym{std::move(v), f.coord}}, c);
    }
    return out;
}

inline FormVal deck_pullback_letter(const DeckLetter& t, const FormVal& x) {
    int h = x.ctx.h;
    FormVal out(x.ctx);
    for (const auto& [k, c] : x.terms) {
        // functions: multiplicative, only the matching coordinate moves
        std::map<FuncMono, ConstPoly> funcs;
        funcs[FuncMono{}] = ConstPoly(1);
        for (const FuncSym& f : k.funcs) {
            std::map<FuncMono, ConstPoly> next;
            FuncExpr fe;
            if (f.coord == t.coord) fe = deck_pullback_sym(t, f);
            else fe.add_term(FuncMono{f}, ConstPoly(1));
            for (const auto& [m1, c1] : funcs)
                for (const auto& [m2, c2] : fe.terms)
                    for (const auto& [m, q] : funcmono_mul(m1, m2)) {
                        auto it = next.find(m);
                        ConstPoly add = c1 * c2 * Rational(q);
                        if (it == next.end()) next.emplace(m, add);
                        else it->second += add;
                    }
            funcs = std::move(next);
        }
        // base: OmegaW / PsiW carry monodromy along B-letters; everything else is fixed
        std::vector<std::tuple<BaseForm, ConstPoly>> bases;
        const BaseForm& B = k.base;
        bool bmoves = t.cycle > h &&
                      ((B.kind == BaseForm::OmegaW && B.coord == t.coord) ||
                       (B.kind == BaseForm::PsiW && (B.coord == t.coord || B.coord2 == t.coord)));
        if (!bmoves) {
            bases.push_back({B, ConstPoly(1)});
        } else if (B.kind == BaseForm::OmegaW) {
            int j = t.cycle - h;
            size_t m = B.word.size();
            for (size_t l = 0; l + 1 <= m; ++l) { // keep at least one letter
                bool all_j = true;
                for (size_t k2 = 0; k2 < l; ++k2) all_j = all_j && (B.word[k2] == j);
                if (!all_j) break;
                Word rest(B.word.begin() + l, B.word.end());
                bases.push_back({BaseForm::omegaw(std::move(rest), B.coord),
                                 ConstPoly(Rational(1) / factorial((int)l))});
            }
        } else if (B.coord == t.coord) { // PsiW, first slot
            int j = t.cycle - h;
            size_t m = B.word.size();
            for (size_t l = 0; l <= m; ++l) {
                bool all_j = true;
                for (size_t k2 = 0; k2 < l; ++k2) all_j = all_j && (B.word[k2] == j);
                if (!all_j) break;
                Word rest(B.word.begin() + l, B.word.end());
                bases.push_back({BaseForm::psiw(std::move(rest), B.coord, B.coord2),
                                 ConstPoly(Rational(1) / factorial((int)l))});
            }
        } else { // PsiW, second slot
            int j = t.cycle - h;
            size_t m = B.word.size();
            for (size_t l = 0; l <= m; ++l) { // psi part
                bool all_j = true;
                for (size_t k2 = 0; k2 < l; ++k2) all_j = all_j && (B.word[m - 1 - k2] == j);
                if (!all_j) break;
                Word rest(B.word.begin(), B.word.end() - l);
                bases.push_back({BaseForm::psiw(std::move(rest), B.coord, B.coord2),
                                 ConstPoly(Rational((l % 2) ? -1 : 1) / factorial((int)l))});
            }
            for (size_t l = 1; l <= m + 1; ++l) { // omega part, first-slot coordinate
                bool all_j = true;
                for (size_t k2 = 0; k2 + 1 < l; ++k2) all_j = all_j && (B.word[m - 1 - k2] == j);
                if (!all_j) break;
                if (m + 1 < l) break;
                Word head(B.word.begin(), B.word.end() - (l - 1));
                head.push_back(j);
                bases.push_back({BaseForm::omegaw(std::move(head), B.coord),
                                 ConstPoly(Rational((l % 2) ? 1 : -1) / factorial((int)l))});
            }
        }
        for (const auto& [m, fc] : funcs)
            for (const auto& [bb, bc] : bases) out.add_term(TermKey{m, bb, k.lie}, c * fc * bc);
    }
    return out;
}

// group word: pullback by theta theta' = (pullback by theta') then (by theta)
inline FormVal deck_pullback(const DeckWord& theta, const FormVal& x) {
    FormVal out = x;
    for (auto it = theta.rbegin(); it != theta.rend(); ++it)
        out = deck_pullback_letter(*it, out);
    return out;
}

inline FuncExpr deck_pullback(const DeckWord& theta, const FuncExpr& f, const FormCtx& ctx) {
    FormVal v(ctx);
    for (const auto& [m, c] : f.terms) v.add_term(TermKey{m, BaseForm::fun(), {}}, c);
    FormVal w = deck_pullback(theta, v);
    FuncExpr out;
    for (const auto& [k, c] : w.terms) out.add_term(k.funcs, c);
    return out;
}

// ---- evaluation ---------------------------------------------------------------

inline ConstPoly eval_basepoint(const FuncExpr& f) {
    auto it = f.terms.find(FuncMono{});
    return it == f.terms.end() ? ConstPoly() : it->second;
}

inline ConstPoly eval_translate(const FuncExpr& f, const DeckWord& theta, const FormCtx& ctx) {
    return eval_basepoint(deck_pullback(theta, f, ctx));
}

// ---- A-cycle integration (acyc) ------------------------------------------------

namespace detail {

inline ConstPoly acyc_mono(int k, int h, const FuncMono& funcs, const BaseForm& B);

inline ConstPoly acyc_funcword_gamma(int k, const Word& w, int j) {
    Word wj = w;
    wj.push_back(j);
    return normalize_loop_const(wj, k);
}

inline ConstPoly acyc_mono(int k, int h, const FuncMono& funcs, const BaseForm& B) {
    if (funcs.size() > 1) throw std::invalid_argument("acyc expects a single coordinate");
    Word w = funcs.empty() ? Word{} : funcs[0].word;
    switch (B.kind) {
        case BaseForm::Gamma:
            return acyc_funcword_gamma(k, w, B.index);
        case BaseForm::Omega: {
            if (w.empty()) return ConstPoly(Rational(k == B.index ? 1 : 0));
            ConstPoly out = acyc_funcword_gamma(k, w, B.index);
            for (int l = 1; l <= h; ++l)
                out += ConstPoly::sym(ConstSym::tau(B.index, l)) * acyc_funcword_gamma(k, w, h + l);
            return out;
        }
        case BaseForm::OmegaW: {
            if (!w.empty())
                return ConstPoly::sym(
                    ConstSym::opaque(FormMono{funcs, B}.str(h) + "@A" + std::to_string(k)));
            int m = (int)B.word.size();
            for (Letter l : B.word)
                if (l != k) return ConstPoly();
            return ConstPoly(bernoulli(m - 1) / factorial(m - 1));
        }
        case BaseForm::Psi: {
            if (funcs.empty()) return ConstPoly();
            return ConstPoly::sym(
                ConstSym::opaque(FormMono{funcs, B}.str(h) + "@A" + std::to_string(k)));
        }
        case BaseForm::Op: {
            // int_{A_k} f op(y) = sum_l acyc(l, y) acyc(k, f omega_l); with f = 1
            // this is just acyc(k, y).
            const FormMono& y = *B.arg;
            if (funcs.empty()) return acyc_mono(k, h, y.funcs, y.base);
            ConstPoly out;
            for (int l = 1; l <= h; ++l) {
                ConstPoly cl = acyc_mono(l, h, y.funcs, y.base);
                if (cl.is_zero()) continue;
                out += cl * acyc_mono(k, h, funcs, BaseForm::omega(l, B.coord));
            }
            return out;
        }
        default:
            throw std::invalid_argument("acyc: unsupported base form");
    }
}

} // namespace detail

// A-cycle period of each term; the Lie slot is carried along by the caller,
// so the input must have trivial Lie slots.
inline ConstPoly acyc(int k, const FormVal& x) {
    ConstPoly out;
    for (const auto& [key, c] : x.terms) {
        if (!key.lie.empty()) throw std::invalid_argument("acyc expects trivial Lie slot");
        out += c * detail::acyc_mono(k, x.ctx.h, key.funcs, key.base);
    }
    return out;
}

// ---- Psi / op rewrite system ----------------------------------------------------

namespace detail {

// returns terms (coefficient, base) replacing "Psi(funcs base)"
inline std::vector<std::pair<ConstPoly, BaseForm>> psi_mono(const FuncMono& funcs,
                                                            const BaseForm& B, int h) {
    if (!funcs.empty() || (B.kind == BaseForm::Gamma && B.index <= h) ||
        B.kind == BaseForm::OmegaW)
        return {{ConstPoly(1), BaseForm::psi_node(std::make_shared<FormMono>(FormMono{funcs, B}))}};
    switch (B.kind) {
        case BaseForm::Omega: return {};
        case BaseForm::Gamma: return {{ConstPoly(1), B}}; // beta_i
        case BaseForm::Psi: return {{ConstPoly(1), B}};
        case BaseForm::Op: return {};
        default: throw std::invalid_argument("Psi: unsupported base form");
    }
}

inline std::vector<std::pair<ConstPoly, BaseForm>> op_mono(const FuncMono& funcs,
                                                           const BaseForm& B, int h) {
    if (!funcs.empty())
        return {{ConstPoly(1), BaseForm::op_node(std::make_shared<FormMono>(FormMono{funcs, B}))}};
    switch (B.kind) {
        case BaseForm::Omega: return {{ConstPoly(1), B}};
        case BaseForm::Gamma:
            if (B.index > h) return {};
            return {{ConstPoly(1), BaseForm::omega(B.index, B.coord)}};
        case BaseForm::Psi: return {};
        case BaseForm::Op: return {{ConstPoly(1), B}};
        case BaseForm::OmegaW: {
            // op(omegaw{w}) = sum_k acyc(k, omegaw{w}) omega_k
            int m = (int)B.word.size();
            Letter first = B.word[0];
            for (Letter l : B.word)
                if (l != first) return {};
            return {{ConstPoly(bernoulli(m - 1) / factorial(m - 1)),
                     BaseForm::omega(first, B.coord)}};
        }
        default: throw std::invalid_argument("op: unsupported base form");
    }
}

} // namespace detail

inline FormVal psi_apply(const FormVal& x) {
    FormVal out(x.ctx);
    for (const auto& [k, c] : x.terms)
        for (const auto& [q, b] : detail::psi_mono(k.funcs, k.base, x.ctx.h))
            out.add_term(TermKey{FuncMono{}, b, k.lie}, c * q);
    return out;
}

inline FormVal op_apply(const FormVal& x) {
    FormVal out(x.ctx);
    for (const auto& [k, c] : x.terms)
        for (const auto& [q, b] : detail::op_mono(k.funcs, k.base, x.ctx.h))
            out.add_term(TermKey{FuncMono{}, b, k.lie}, c * q);
    return out;
}

// ---- omega expansion: omega_i = alpha_i + sum_j tau_ij beta_j -------------------

inline FormVal omega_expand(const FormVal& x) {
    FormVal out(x.ctx);
    int h = x.ctx.h;
    for (const auto& [k, c] : x.terms) {
        if (k.base.kind != BaseForm::Omega) {
            out.add_term(k, c);
            continue;
        }
        out.add_term(TermKey{k.funcs, BaseForm::gamma(k.base.index, k.base.coord), k.lie}, c);
        for (int j = 1; j <= h; ++j)
            out.add_term(TermKey{k.funcs, BaseForm::gamma(h + j, k.base.coord), k.lie},
                         c * ConstPoly::sym(ConstSym::tau(k.base.index, j)));
    }
    return out;
}

// ---- primitive along the path from the base point -------------------------------
//
// int_{base}^{.} [w|.] gamma_j = [w j|.] coordinatewise; omegas are expanded first.
// Inverts the differential and vanishes at the base point.
inline FormVal path_primitive(const FormVal& x) {
    FormVal ex = omega_expand(x);
    FormVal out(x.ctx);
    for (const auto& [k, c] : ex.terms) {
        if (k.base.kind != BaseForm::Gamma)
            throw std::invalid_argument("path_primitive expects gamma-valued terms");
        FuncMono m = k.funcs;
        auto it = std::find_if(m.begin(), m.end(),
                               [&](const FuncSym& f) { return f.coord == k.base.coord; });
        if (it == m.end()) {
            FuncSym nf{Word{k.base.index}, k.base.coord};
            m.insert(std::upper_bound(m.begin(), m.end(), nf), nf);
        } else {
            it->word.push_back(k.base.index);
        }
        out.add_term(TermKey{m, BaseForm::fun(), k.lie}, c);
    }
    return out;
}

} // namespace mcforms
