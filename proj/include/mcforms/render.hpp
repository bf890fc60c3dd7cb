#pragma once

#include "mcforms/engine.hpp"

#include <sstream>

namespace mcforms {

// ---- plain text ---------------------------------------------------------------

namespace detail {

inline std::string coeff_prefix(const ConstPoly& c, int h) {
    if (c == ConstPoly(1)) return "";
    if (c == ConstPoly(-1)) return "-";
    std::string s = c.str(h);
    if (c.terms.size() > 1) return "(" + s + ") ";
    return s + " ";
}

inline std::string lie_str_text(const FormCtx& ctx, const LieKey& l) {
    if (l.empty()) return "";
    std::ostringstream os;
    if (ctx.alg == FormCtx::EnvB) {
        for (size_t i = 0; i < l.size(); ++i) {
            if (i) os << " ";
            os << "b_" << l[i];
        }
    } else {
        for (size_t i = 0; i < l.size(); ++i) {
            if (i) os << " ";
            os << ctx.pres->basis_str(l[i]);
        }
    }
    return os.str();
}

} // namespace detail

// One term (or projector group) per line, canonically ordered. Terms x, Psi(x)
// and op(x) sharing the same monomial x and Lie value collapse into a single
// "(id - Psi - op)(x)" style line when their coefficients allow it.
inline std::string render_text(const FormVal& x) {
    int h = x.ctx.h;
    struct Group {
        ConstPoly cid, cpsi, cop;
    };
    std::map<std::pair<LieKey, FormMono>, Group> groups;
    for (const auto& [k, c] : x.terms) {
        bool node = (k.base.kind == BaseForm::Psi || k.base.kind == BaseForm::Op) &&
                    k.funcs.empty();
        FormMono m = node ? *k.base.arg : FormMono{k.funcs, k.base};
        Group& g = groups[{k.lie, m}];
        if (!node) g.cid += c;
        else if (k.base.kind == BaseForm::Psi) g.cpsi += c;
        else g.cop += c;
    }
    std::vector<std::pair<std::pair<int, std::pair<LieKey, FormMono>>, std::string>> lines;
    for (const auto& [key, g] : groups) {
        const auto& [lie, m] = key;
        std::string body;
        if (g.cpsi.is_zero() && g.cop.is_zero()) {
            if (g.cid.is_zero()) continue;
            body = detail::coeff_prefix(g.cid, h) + m.str(h);
        } else {
            ConstPoly lead = !g.cid.is_zero() ? g.cid : (!g.cpsi.is_zero() ? g.cpsi : g.cop);
            auto rel = [&](const ConstPoly& c) -> const char* {
                if (c.is_zero()) return nullptr;
                if (c == lead) return "+";
                if (c == -lead) return "-";
                return "?";
            };
            const char* ri = rel(g.cid);
            const char* rp = rel(g.cpsi);
            const char* ro = rel(g.cop);
            bool simple = (!ri || *ri != '?') && (!rp || *rp != '?') && (!ro || *ro != '?');
            if (simple) {
                std::string ops;
                auto app = [&](const char* r, const char* name) {
                    if (!r) return;
                    if (ops.empty()) ops = (*r == '-') ? std::string("-") + name : name;
                    else ops += std::string(" ") + r + " " + name;
                };
                app(ri, "id");
                app(rp, "Psi");
                app(ro, "op");
                body = detail::coeff_prefix(lead, h) + "(" + ops + ")(" + m.str(h) + ")";
            } else {
                std::string parts;
                auto app = [&](const ConstPoly& c, const std::string& expr) {
                    if (c.is_zero()) return;
                    if (!parts.empty()) parts += " + ";
                    parts += detail::coeff_prefix(c, h) + expr;
                };
                app(g.cid, m.str(h));
                app(g.cpsi, "Psi(" + m.str(h) + ")");
                app(g.cop, "op(" + m.str(h) + ")");
                body = parts;
            }
        }
        std::string ls = detail::lie_str_text(x.ctx, lie);
        if (!ls.empty()) body += " (x) " + ls;
        lines.push_back({{x.ctx.lie_deg(lie), key}, body});
    }
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out;
    for (const auto& [k, s] : lines) out += s + "\n";
    if (out.empty()) out = "0\n";
    return out;
}

// ---- LaTeX -----------------------------------------------------------------------

namespace detail {

inline std::string latex_word(const Word& w) {
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(w[i]);
    }
    return s;
}

inline std::string latex_sym(const ConstSym& s) {
    switch (s.kind) {
        case ConstSym::Loop: return "[" + latex_word(s.word) + "|" + std::to_string(s.cycle) + "]";
        case ConstSym::Tau: return "\\tau_{" + std::to_string(s.i) + std::to_string(s.j) + "}";
        default: return "\\mathrm{opq}(" + s.key + ")";
    }
}

inline std::string latex_rat(const Rational& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    std::string s = rat_num(r) < 0 ? "-" : "";
    Int n = rat_num(r) < 0 ? Int(-rat_num(r)) : rat_num(r);
    return s + "\\tfrac{" + n.str() + "}{" + rat_den(r).str() + "}";
}

inline std::string latex_poly(const ConstPoly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& [m, c] : p.terms) {
        std::string t = latex_rat(c);
        if (!m.empty() && (c == 1 || c == -1)) t = (c == -1) ? "-" : "";
        for (const ConstSym& y : m) t += "\\," + latex_sym(y);
        if (!s.empty() && !t.empty() && t[0] != '-') s += "+";
        s += t;
    }
    return s;
}

inline std::string latex_funcs(const FuncMono& m) {
    std::string s;
    for (const FuncSym& f : m) {
        std::string b = "\\bullet";
        if (f.coord != 1) b += "_{" + std::to_string(f.coord) + "}";
        s += "[" + latex_word(f.word) + "|" + b + "]";
    }
    return s;
}

inline std::string latex_base(const BaseForm& b, int h);

inline std::string latex_mono(const FormMono& m, int h) {
    std::string s = latex_funcs(m.funcs);
    std::string bb = latex_base(m.base, h);
    if (bb != "1") {
        if (!s.empty()) s += "\\,";
        s += bb;
    }
    return s.empty() ? "1" : s;
}

inline std::string latex_base(const BaseForm& b, int h) {
    auto sup = [&](int c) { return c == 1 ? std::string() : "^{(" + std::to_string(c) + ")}"; };
    switch (b.kind) {
        case BaseForm::Fun: return "1";
        case BaseForm::Gamma:
            return (b.index <= h ? "\\alpha_{" + std::to_string(b.index)
                                 : "\\beta_{" + std::to_string(b.index - h)) +
                   "}" + sup(b.coord);
        case BaseForm::Omega: return "\\omega_{" + std::to_string(b.index) + "}" + sup(b.coord);
        case BaseForm::OmegaW:
            return "\\omega_{\\hat\\infty," + latex_word(b.word) + "}" + sup(b.coord);
        case BaseForm::PsiW:
            return "\\psi_{\\hat\\infty," + latex_word(b.word) + "}^{(" +
                   std::to_string(b.coord) + "," + std::to_string(b.coord2) + ")}";
        case BaseForm::Psi: return "\\Psi_{\\hat\\infty}\\big(" + latex_mono(*b.arg, h) + "\\big)";
        default: return "\\mathrm{op}\\big(" + latex_mono(*b.arg, h) + "\\big)";
    }
}

inline std::string latex_lie(const FormCtx& ctx, const LieKey& l) {
    if (l.empty()) return "";
    std::string s;
    if (ctx.alg == FormCtx::EnvB) {
        for (int i : l) s += "b_{" + std::to_string(i) + "}";
    } else {
        for (size_t i = 0; i < l.size(); ++i) {
            if (i) s += "\\cdot ";
            s += ctx.pres->basis_str(l[i]);
        }
    }
    return s;
}

} // namespace detail

inline std::string render_latex(const FormVal& x) {
    if (x.terms.empty()) return "0\n";
    std::string out;
    for (const auto& [k, c] : x.terms) {
        std::string line = detail::latex_poly(c);
        if (line == "1") line.clear();
        else if (line == "-1") line = "-";
        else if (c.terms.size() > 1) line = "\\big(" + line + "\\big)";
        std::string m = detail::latex_mono(FormMono{k.funcs, k.base}, x.ctx.h);
        if (m != "1" || line.empty()) {
            if (!line.empty() && line != "-") line += "\\,";
            line += m;
        }
        std::string ls = detail::latex_lie(x.ctx, k.lie);
        if (!ls.empty()) line += "\\otimes " + ls;
        out += line + "\\\\\n";
    }
    return out;
}

} // namespace mcforms
