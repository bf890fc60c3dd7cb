#pragma once

#include "mcforms/engine.hpp"

#include <json.hpp>

namespace mcforms {

namespace detail {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

inline ordered int_json(const Int& v) {
    if (v >= Int(-((int64_t)1 << 53)) && v <= Int((int64_t)1 << 53))
        return (int64_t)v;
    return v.str();
}

inline Int int_from_json(const ordered& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    return Int(j.get<int64_t>());
}

inline ordered funcs_json(const FuncMono& m) {
    ordered arr = ordered::array();
    for (const FuncSym& f : m) arr.push_back({{"word", f.word}, {"coord", f.coord}});
    return arr;
}

inline FuncMono funcs_from_json(const ordered& j) {
    FuncMono m;
    for (const auto& e : j) {
        FuncSym f{e.at("word").get<Word>(), e.at("coord").get<int>()};
        m.insert(std::upper_bound(m.begin(), m.end(), f), f);
    }
    return m;
}

inline ordered base_json(const BaseForm& b, int h);

inline ordered mono_json(const FormMono& m, int h) {
    return {{"functions", funcs_json(m.funcs)}, {"base", base_json(m.base, h)}};
}

inline ordered base_json(const BaseForm& b, int h) {
    switch (b.kind) {
        case BaseForm::Fun: return {{"kind", "fun"}};
        case BaseForm::Gamma:
            return {{"kind", "gamma"}, {"index", b.index}, {"coord", b.coord}};
        case BaseForm::Omega:
            return {{"kind", "omega"}, {"index", b.index}, {"coord", b.coord}};
        case BaseForm::OmegaW:
            return {{"kind", "omegaw"}, {"word", b.word}, {"coord", b.coord}};
        case BaseForm::PsiW:
            return {{"kind", "psiw"}, {"word", b.word}, {"coord", b.coord}, {"coord2", b.coord2}};
        case BaseForm::Psi: return {{"kind", "psi"}, {"arg", mono_json(*b.arg, h)}};
        default: return {{"kind", "op"}, {"arg", mono_json(*b.arg, h)}};
    }
}

inline BaseForm base_from_json(const ordered& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "fun") return BaseForm::fun();
    if (kind == "gamma") return BaseForm::gamma(j.at("index").get<int>(), j.at("coord").get<int>());
    if (kind == "omega") return BaseForm::omega(j.at("index").get<int>(), j.at("coord").get<int>());
    if (kind == "omegaw")
        return BaseForm::omegaw(j.at("word").get<Word>(), j.at("coord").get<int>());
    if (kind == "psiw")
        return BaseForm::psiw(j.at("word").get<Word>(), j.at("coord").get<int>(),
                              j.at("coord2").get<int>());
    const auto& a = j.at("arg");
    auto arg = std::make_shared<FormMono>(
        FormMono{funcs_from_json(a.at("functions")), base_from_json(a.at("base"))});
    if (kind == "psi") return BaseForm::psi_node(std::move(arg));
    if (kind == "op") return BaseForm::op_node(std::move(arg));
    throw std::invalid_argument("unknown base kind: " + kind);
}

inline ordered sym_json(const ConstSym& s, int exp, int h) {
    switch (s.kind) {
        case ConstSym::Loop: return ordered::array({"loop", s.word, cycle_str(s.cycle, h), exp});
        case ConstSym::Tau: return ordered::array({"tau", s.i, s.j, exp});
        default: return ordered::array({"opaque", s.key, exp});
    }
}

inline ConstSym sym_from_json(const ordered& j, int h) {
    std::string kind = j.at(0).get<std::string>();
    if (kind == "loop") {
        std::string cy = j.at(2).get<std::string>();
        int idx = std::stoi(cy.substr(1));
        return ConstSym::loop(j.at(1).get<Word>(), cy[0] == 'A' ? idx : h + idx);
    }
    if (kind == "tau") return ConstSym::tau(j.at(1).get<int>(), j.at(2).get<int>());
    if (kind == "opaque") return ConstSym::opaque(j.at(1).get<std::string>());
    throw std::invalid_argument("unknown symbol kind: " + kind);
}

} // namespace detail

inline nlohmann::ordered_json emit_json(const FormVal& x) {
    using detail::ordered;
    int h = x.ctx.h;
    ordered terms = ordered::array();
    for (const auto& [k, c] : x.terms)
        for (const auto& [mono, r] : c.terms) {
            ordered syms = ordered::array();
            size_t i = 0;
            while (i < mono.size()) {
                size_t e = 1;
                while (i + e < mono.size() && mono[i + e] == mono[i]) ++e;
                syms.push_back(detail::sym_json(mono[i], (int)e, h));
                i += e;
            }
            terms.push_back({{"coeff",
                              {{"num", detail::int_json(rat_num(r))},
                               {"den", detail::int_json(rat_den(r))},
                               {"symbols", syms}}},
                             {"functions", detail::funcs_json(k.funcs)},
                             {"base", detail::base_json(k.base, h)},
                             {"lie", k.lie}});
        }
    return {{"context",
             {{"h", x.ctx.h},
              {"n", x.ctx.n},
              {"D", x.ctx.D},
              {"algebra", x.ctx.alg == FormCtx::EnvB ? "envb" : "thn"}}},
            {"terms", terms}};
}

inline FormVal parse_json(const nlohmann::ordered_json& j,
                          std::shared_ptr<const ThnPresentation> pres = nullptr) {
    const auto& cx = j.at("context");
    FormCtx c;
    c.h = cx.at("h").get<int>();
    c.n = cx.at("n").get<int>();
    c.D = cx.at("D").get<int>();
    if (cx.at("algebra").get<std::string>() == "thn") {
        c.alg = FormCtx::Thn;
        if (pres && (pres->h != c.h || pres->n != c.n || pres->D != c.D))
            throw std::invalid_argument("presentation does not match serialized context");
        c.pres = pres ? pres : thn_build(c.h, c.n, c.D);
    }
    FormVal out(c);
    for (const auto& t : j.at("terms")) {
        const auto& co = t.at("coeff");
        Rational r(detail::int_from_json(co.at("num")), detail::int_from_json(co.at("den")));
        ConstPoly cp(r);
        for (const auto& s : co.at("symbols")) {
            ConstSym sym = detail::sym_from_json(s, c.h);
            int e = s.at(s.size() - 1).get<int>();
            ConstPoly p = ConstPoly::sym(sym);
            for (int k = 0; k < e; ++k) cp = cp * p;
        }
        out.add_term(TermKey{detail::funcs_from_json(t.at("functions")),
                             detail::base_from_json(t.at("base")), t.at("lie").get<LieKey>()},
                     cp);
    }
    return out;
}

inline std::string json_render(const FormVal& x) { return emit_json(x).dump(1) + "\n"; }

} // namespace mcforms
