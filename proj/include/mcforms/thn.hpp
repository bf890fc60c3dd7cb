#pragma once

#include "mcforms/freelie.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <functional>
#include <numeric>
#include <random>
#include <string>

namespace mcforms {

// Graded Lie algebra on a_i^{(r)}, b_i^{(r)} (degree 1) and t_{rs} (degree 2)
// subject to:
//   (i)   [a_i^{(r)}, t_{lm}] = [b_i^{(r)}, t_{lm}] = 0 for r not in {l,m}
//   (ii)  sum_i [b_i^{(r)}, a_i^{(r)}] + sum_{s != r} t_{rs} = 0
//   (iii) [b_i^{(r)}, a_j^{(s)}] = -[a_i^{(r)}, b_j^{(s)}] = delta_ij t_{rs},
//         [a_i^{(r)}, a_j^{(s)}] = [b_i^{(r)}, b_j^{(s)}] = 0  for r != s
// realized degreewise: span the relation ideal in the free Lie algebra and
// take a complement of its row space by exact row reduction.
struct ThnPresentation {
    struct Gen {
        char kind;          // 'a', 'b' or 't'
        int i = 0;          // a/b: homology index
        int r = 0, s = 0;   // coordinates (t: r < s)
        int deg = 1;
        std::string str(int n) const {
            std::string out;
            if (kind == 't') return "t_" + std::to_string(r) + std::to_string(s);
            out = std::string(1, kind) + "_" + std::to_string(i);
            if (n > 1) out += "^(" + std::to_string(r) + ")";
            return out;
        }
    };

    int h = 1, n = 1, D = 1;
    std::vector<Gen> gens;       // 0-based here, letters are index+1
    AlgCtx free_ctx;
    // generator lookup tables (letters)
    std::vector<std::vector<int>> a_of, b_of; // [i][r] -> letter
    std::map<std::pair<int, int>, int> t_of;  // (r<s) -> letter

    // per-degree data (index 1..D)
    std::vector<std::vector<Word>> lbasis;            // Lyndon words of weight d
    std::vector<std::map<Word, int>> lcol;            // word -> column
    std::vector<std::vector<std::map<int, Rational>>> rref; // reduced ideal rows
    std::vector<std::map<int, int>> pivot_row;        // pivot column -> row index
    std::vector<std::vector<int>> qcols;              // non-pivot columns

    // flattened quotient basis
    std::vector<std::pair<int, int>> basis_list;      // id -> (d, column)
    std::map<std::pair<int, int>, int> basis_id;      // (d, column) -> id

    mutable std::map<std::pair<int, int>, std::vector<std::pair<int, Rational>>> bracket_cache;
    mutable std::mutex cache_mtx;

    int a_letter(int i, int r) const { return a_of[i][r]; }
    int b_letter(int i, int r) const { return b_of[i][r]; }
    int t_letter(int r, int s) const { return t_of.at({std::min(r, s), std::max(r, s)}); }
    int dim(int d) const { return d >= 1 && d <= D ? (int)qcols[d].size() : 0; }
    int basis_deg(int id) const { return basis_list[id].first; }
    const Word& basis_word(int id) const {
        auto [d, col] = basis_list[id];
        return lbasis[d][col];
    }
    std::string basis_str(int id) const {
        const Word& w = basis_word(id);
        std::function<std::string(const Word&)> br = [&](const Word& v) -> std::string {
            if (v.size() == 1) return gens[v[0] - 1].str(n);
            auto [u, vv] = lyndon_standard_split(v);
            return "[" + br(u) + ", " + br(vv) + "]";
        };
        return br(w);
    }
};

// Element of t_{h,n}: ConstPoly coordinates over the flattened quotient basis.
struct ThnElem {
    std::shared_ptr<const ThnPresentation> pres;
    std::map<int, ConstPoly> coords;

    bool is_zero() const { return coords.empty(); }
    bool operator==(const ThnElem& o) const { return coords == o.coords; }
    void add(int id, const ConstPoly& c) {
        if (c.is_zero()) return;
        auto it = coords.find(id);
        if (it == coords.end()) coords.emplace(id, c);
        else {
            it->second += c;
            if (it->second.is_zero()) coords.erase(it);
        }
    }
    ThnElem& operator+=(const ThnElem& o) {
        for (const auto& [id, c] : o.coords) add(id, c);
        return *this;
    }
    ThnElem operator+(const ThnElem& o) const { ThnElem r = *this; r += o; return r; }
    ThnElem operator-() const {
        ThnElem r = *this;
        for (auto& [id, c] : r.coords) c = -c;
        return r;
    }
    ThnElem operator-(const ThnElem& o) const { ThnElem r = *this; r += -o; return r; }
    ThnElem operator*(const ConstPoly& s) const {
        ThnElem r;
        r.pres = pres;
        for (const auto& [id, c] : coords) r.add(id, c * s);
        return r;
    }
};

namespace detail {

// sparse exact row reduction helpers
inline void reduce_row(std::map<int, Rational>& row,
                       const std::vector<std::map<int, Rational>>& rows,
                       const std::map<int, int>& pivot_row) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = row.begin(); it != row.end(); ++it) {
            auto pr = pivot_row.find(it->first);
            if (pr == pivot_row.end()) continue;
            Rational f = it->second;
            const auto& prow = rows[pr->second];
            for (const auto& [c, v] : prow) {
                auto jt = row.find(c);
                if (jt == row.end()) row.emplace(c, -f * v);
                else {
                    jt->second -= f * v;
                    if (jt->second == 0) row.erase(jt);
                }
            }
            changed = true;
            break;
        }
    }
}

} // namespace detail

struct ThnBuildOptions {
    bool reverse_letters = false;  // alternative generator ordering
    unsigned shuffle_seed = 0;     // 0: keep natural ideal row order
    bool pivot_from_back = false;  // choose largest column as pivot
};

inline std::shared_ptr<const ThnPresentation> thn_build(int h, int n, int D,
                                                        const ThnBuildOptions& opt = {}) {
    if (h < 1 || n < 1 || D < 1) throw std::invalid_argument("thn_build: parameters must be >= 1");
    auto P = std::make_shared<ThnPresentation>();
    auto& p = *P;
    p.h = h; p.n = n; p.D = D;
    for (int r = 1; r <= n; ++r) {
        for (int i = 1; i <= h; ++i) p.gens.push_back({'a', i, r, 0, 1});
        for (int i = 1; i <= h; ++i) p.gens.push_back({'b', i, r, 0, 1});
    }
    for (int r = 1; r <= n; ++r)
        for (int s = r + 1; s <= n; ++s) p.gens.push_back({'t', 0, r, s, 2});
    if (opt.reverse_letters) std::reverse(p.gens.begin(), p.gens.end());

    int A = (int)p.gens.size();
    std::vector<int> degs(A + 1, 1);
    for (int k = 0; k < A; ++k) degs[k + 1] = p.gens[k].deg;
    p.free_ctx = AlgCtx(A, D, degs);

    p.a_of.assign(h + 1, std::vector<int>(n + 1, 0));
    p.b_of.assign(h + 1, std::vector<int>(n + 1, 0));
    for (int k = 0; k < A; ++k) {
        const auto& g = p.gens[k];
        if (g.kind == 'a') p.a_of[g.i][g.r] = k + 1;
        else if (g.kind == 'b') p.b_of[g.i][g.r] = k + 1;
        else p.t_of[{g.r, g.s}] = k + 1;
    }

    const AlgCtx& ctx = p.free_ctx;
    auto gen_lie = [&](int letter) { return LieElem::generator(ctx, letter); };

    // relations as free-Lie elements, grouped by weighted degree
    std::map<int, std::vector<LieElem>> rels;
    for (int r = 1; r <= n; ++r) { // (ii)
        LieElem rel(ctx);
        for (int i = 1; i <= h; ++i)
            rel += lie_bracket(gen_lie(p.b_letter(i, r)), gen_lie(p.a_letter(i, r)));
        for (int s = 1; s <= n; ++s)
            if (s != r) rel += gen_lie(p.t_letter(r, s));
        rels[2].push_back(rel);
    }
    for (int r = 1; r <= n; ++r) // (iii)
        for (int s = 1; s <= n; ++s) {
            if (s == r) continue;
            for (int i = 1; i <= h; ++i)
                for (int j = 1; j <= h; ++j) {
                    LieElem ba = lie_bracket(gen_lie(p.b_letter(i, r)), gen_lie(p.a_letter(j, s)));
                    if (i == j) ba = ba - gen_lie(p.t_letter(r, s));
                    rels[2].push_back(ba);
                    rels[2].push_back(
                        lie_bracket(gen_lie(p.a_letter(i, r)), gen_lie(p.a_letter(j, s))));
                    rels[2].push_back(
                        lie_bracket(gen_lie(p.b_letter(i, r)), gen_lie(p.b_letter(j, s))));
                }
        }
    for (auto& [rs, tl] : p.t_of) // (i)
        for (int r = 1; r <= n; ++r) {
            if (r == rs.first || r == rs.second) continue;
            for (int i = 1; i <= h; ++i) {
                rels[3].push_back(lie_bracket(gen_lie(p.a_letter(i, r)), gen_lie(tl)));
                rels[3].push_back(lie_bracket(gen_lie(p.b_letter(i, r)), gen_lie(tl)));
            }
        }

    auto all_lyndon = lyndon_words(A, D);
    p.lbasis.assign(D + 1, {});
    p.lcol.assign(D + 1, {});
    p.rref.assign(D + 1, {});
    p.pivot_row.assign(D + 1, {});
    p.qcols.assign(D + 1, {});
    for (const Word& w : all_lyndon) {
        int d = ctx.deg(w);
        if (d <= D) p.lbasis[d].push_back(w);
    }
    for (int d = 1; d <= D; ++d)
        for (int c = 0; c < (int)p.lbasis[d].size(); ++c) p.lcol[d][p.lbasis[d][c]] = c;

    std::vector<std::vector<LieElem>> ideal(D + 1); // reduced independent rows, as Lie elements
    for (int d = 1; d <= D; ++d) {
        std::vector<LieElem> src;
        if (rels.count(d)) src = rels[d];
        for (int k = 0; k < A; ++k) {
            int e = p.gens[k].deg;
            if (d - e >= 1)
                for (const LieElem& y : ideal[d - e]) src.push_back(lie_bracket(gen_lie(k + 1), y));
        }
        if (opt.shuffle_seed) {
            std::mt19937 rng(opt.shuffle_seed + d);
            std::shuffle(src.begin(), src.end(), rng);
        }
        for (const LieElem& x : src) {
            std::map<int, Rational> row;
            for (const auto& [w, c] : x.terms) {
                if (!c.is_constant()) throw std::logic_error("ideal rows must be rational");
                row[p.lcol[d].at(w)] = c.constant_value();
            }
            detail::reduce_row(row, p.rref[d], p.pivot_row[d]);
            if (row.empty()) continue;
            int pivot = opt.pivot_from_back ? row.rbegin()->first : row.begin()->first;
            Rational lead = row.at(pivot);
            for (auto& [c, v] : row) v /= lead;
            // back-substitute into earlier rows
            for (auto& prow : p.rref[d]) {
                auto it = prow.find(pivot);
                if (it == prow.end()) continue;
                Rational f = it->second;
                for (const auto& [c, v] : row) {
                    auto jt = prow.find(c);
                    if (jt == prow.end()) prow.emplace(c, -f * v);
                    else {
                        jt->second -= f * v;
                        if (jt->second == 0) prow.erase(jt);
                    }
                }
            }
            p.pivot_row[d][pivot] = (int)p.rref[d].size();
            p.rref[d].push_back(row);
            LieElem red(ctx);
            for (const auto& [c, v] : row) red.add_term(p.lbasis[d][c], ConstPoly(v));
            ideal[d].push_back(red);
        }
        for (int c = 0; c < (int)p.lbasis[d].size(); ++c)
            if (!p.pivot_row[d].count(c)) p.qcols[d].push_back(c);
    }

    for (int d = 1; d <= D; ++d)
        for (int c : p.qcols[d]) {
            p.basis_id[{d, c}] = (int)p.basis_list.size();
            p.basis_list.push_back({d, c});
        }
    return P;
}

// Projection of a free-Lie element (on the t_{h,n} alphabet) to the quotient.
inline ThnElem thn_project(const std::shared_ptr<const ThnPresentation>& P, const LieElem& x) {
    const auto& p = *P;
    ThnElem out;
    out.pres = P;
    std::map<int, std::map<int, ConstPoly>> bydeg; // d -> column -> coeff
    for (const auto& [w, c] : x.terms) bydeg[p.free_ctx.deg(w)][p.lcol[p.free_ctx.deg(w)].at(w)] = c;
    for (auto& [d, vec] : bydeg) {
        // eliminate pivot coordinates
        for (const auto& [pivot, ridx] : p.pivot_row[d]) {
            auto it = vec.find(pivot);
            if (it == vec.end()) continue;
            ConstPoly f = it->second;
            for (const auto& [c, v] : p.rref[d][ridx]) {
                auto jt = vec.find(c);
                ConstPoly delta = f * v;
                if (jt == vec.end()) vec.emplace(c, -delta);
                else {
                    jt->second -= delta;
                    if (jt->second.is_zero()) vec.erase(jt);
                }
            }
        }
        for (const auto& [c, v] : vec) {
            if (v.is_zero()) continue;
            out.add(p.basis_id.at({d, c}), v);
        }
    }
    return out;
}

inline ThnElem thn_basis_elem(const std::shared_ptr<const ThnPresentation>& P, int id,
                              ConstPoly coef = ConstPoly(1)) {
    ThnElem x;
    x.pres = P;
    x.add(id, coef);
    return x;
}

inline ThnElem thn_generator(const std::shared_ptr<const ThnPresentation>& P, int letter) {
    return thn_project(P, LieElem::generator(P->free_ctx, letter));
}

// bracket of quotient basis elements, with rational coordinates, cached
inline const std::vector<std::pair<int, Rational>>& thn_basis_bracket(
    const std::shared_ptr<const ThnPresentation>& P, int id1, int id2) {
    const auto& p = *P;
    {
        std::lock_guard<std::mutex> lk(p.cache_mtx);
        auto it = p.bracket_cache.find({id1, id2});
        if (it != p.bracket_cache.end()) return it->second;
    }
    std::vector<std::pair<int, Rational>> val;
    if (p.basis_deg(id1) + p.basis_deg(id2) <= p.D) {
        LieElem x1(p.free_ctx), x2(p.free_ctx);
        x1.add_term(p.basis_word(id1), ConstPoly(1));
        x2.add_term(p.basis_word(id2), ConstPoly(1));
        ThnElem b = thn_project(P, lie_bracket(x1, x2));
        for (const auto& [id, c] : b.coords) val.push_back({id, c.constant_value()});
    }
    std::lock_guard<std::mutex> lk(p.cache_mtx);
    return p.bracket_cache.emplace(std::make_pair(id1, id2), std::move(val)).first->second;
}

inline ThnElem thn_bracket(const ThnElem& a, const ThnElem& b) {
    ThnElem out;
    out.pres = a.pres;
    for (const auto& [i1, c1] : a.coords)
        for (const auto& [i2, c2] : b.coords)
            for (const auto& [id, q] : thn_basis_bracket(a.pres, i1, i2)) out.add(id, c1 * c2 * q);
    return out;
}

// Lie morphism a_i -> a_i^{(r)}, b_i -> b_i^{(r)} from the free Lie algebra on
// the 2h-letter alphabet (1..h = a_i, h+1..2h = b_i).
inline ThnElem thn_embed_r(const std::shared_ptr<const ThnPresentation>& P, const LieElem& x,
                           int r) {
    const auto& p = *P;
    if (r < 1 || r > p.n) throw std::invalid_argument("embed_r: coordinate out of range");
    EnvElem e = lie_to_env(x);
    EnvElem out(p.free_ctx);
    for (const auto& [w, c] : e.terms) {
        Word v;
        v.reserve(w.size());
        for (Letter l : w)
            v.push_back(l <= p.h ? p.a_letter(l, r) : p.b_letter(l - p.h, r));
        out.add_term(v, c);
    }
    return thn_project(P, env_to_lie(out));
}

// ad(b_{i1} ... b_{im})(X) = [b_{i1}, [..., [b_{im}, X]...]], letters are
// free-alphabet letters of the presentation.
inline ThnElem ad_env_apply(const std::shared_ptr<const ThnPresentation>& P, const Word& u,
                            const ThnElem& X) {
    ThnElem out = X;
    for (auto it = u.rbegin(); it != u.rend(); ++it)
        out = thn_bracket(thn_generator(P, *it), out);
    return out;
}

inline ThnElem exp_ad_apply(const std::shared_ptr<const ThnPresentation>& P, int letter,
                            const ThnElem& X) {
    ThnElem acc = X, cur = X;
    ThnElem gen = thn_generator(P, letter);
    for (int k = 1; k <= P->D; ++k) {
        cur = thn_bracket(gen, cur);
        if (cur.is_zero()) break;
        acc += cur * ConstPoly(Rational(1) / factorial(k));
    }
    return acc;
}

// ---- PBW monomials for U(t_{h,n}) -----------------------------------------
// A PBW monomial is a non-decreasing sequence of quotient-basis ids; products
// are straightened with x y = y x + [x, y] for x > y.
using PbwMono = std::vector<int>;
using PbwPoly = std::map<PbwMono, Rational>;

inline int pbw_deg(const ThnPresentation& p, const PbwMono& m) {
    int s = 0;
    for (int id : m) s += p.basis_deg(id);
    return s;
}

inline void pbw_straighten(const std::shared_ptr<const ThnPresentation>& P, PbwMono m,
                           const Rational& coef, PbwPoly& out) {
    if (pbw_deg(*P, m) > P->D) return;
    for (size_t i = 0; i + 1 < m.size(); ++i) {
        if (m[i] <= m[i + 1]) continue;
        PbwMono swapped = m;
        std::swap(swapped[i], swapped[i + 1]);
        pbw_straighten(P, std::move(swapped), coef, out);
        const auto& br = thn_basis_bracket(P, m[i], m[i + 1]);
        for (const auto& [id, q] : br) {
            PbwMono contracted;
            contracted.reserve(m.size() - 1);
            contracted.insert(contracted.end(), m.begin(), m.begin() + i);
            contracted.push_back(id);
            contracted.insert(contracted.end(), m.begin() + i + 2, m.end());
            pbw_straighten(P, std::move(contracted), coef * q, out);
        }
        return;
    }
    out[m] += coef;
    if (out[m] == 0) out.erase(m);
}

inline PbwPoly pbw_mul(const std::shared_ptr<const ThnPresentation>& P, const PbwMono& a,
                       const PbwMono& b) {
    PbwMono m = a;
    m.insert(m.end(), b.begin(), b.end());
    PbwPoly out;
    pbw_straighten(P, std::move(m), 1, out);
    return out;
}

// Coordinate permutation automorphism: a_i^{(r)} -> a_i^{(sigma r)} etc.
// Applied to a quotient basis element, returns quotient coordinates.
inline ThnElem thn_permute_basis(const std::shared_ptr<const ThnPresentation>& P, int id,
                                 const std::vector<int>& sigma /* 1-based */) {
    const auto& p = *P;
    LieElem x(p.free_ctx);
    x.add_term(p.basis_word(id), ConstPoly(1));
    EnvElem e = lie_to_env(x);
    EnvElem out(p.free_ctx);
    for (const auto& [w, c] : e.terms) {
        Word v;
        v.reserve(w.size());
        for (Letter l : w) {
            const auto& g = p.gens[l - 1];
            if (g.kind == 'a') v.push_back(p.a_letter(g.i, sigma[g.r]));
            else if (g.kind == 'b') v.push_back(p.b_letter(g.i, sigma[g.r]));
            else v.push_back(p.t_letter(sigma[g.r], sigma[g.s]));
        }
        out.add_term(v, c);
    }
    return thn_project(P, env_to_lie(out));
}

} // namespace mcforms
