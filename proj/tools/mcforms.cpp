#include <CLI11.hpp>

#include "mcforms/jsonio.hpp"
#include "mcforms/oracle.hpp"
#include "mcforms/render.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace mcforms;
namespace fs = std::filesystem;

namespace {

struct Cfg {
    int h = 1, n = 1, D = 3, limit = 4;
    int j = 1;
    std::vector<int> word;
    std::string object = "g", format = "text", suite = "all";
    uint64_t seed = 42;
    int trials = 20;
    std::string fixtures_dir = "fixtures";
};

void add_common(CLI::App* c, Cfg& cfg) {
    c->set_help_flag("--help", "print help");
    c->add_option("--h", cfg.h, "genus")->check(CLI::PositiveNumber);
    c->add_option("--n", cfg.n, "number of points")->check(CLI::PositiveNumber);
    c->add_option("--max-degree", cfg.D, "truncation degree");
    c->add_option("--max-degree-limit", cfg.limit, "configured degree maximum");
    c->add_option("--fixtures-dir", cfg.fixtures_dir, "golden fixture directory");
}

int check_degree(const Cfg& cfg) {
    if (cfg.D < 1) {
        std::cerr << "error: --max-degree must be >= 1\n";
        return 2;
    }
    if (cfg.D > cfg.limit) {
        std::cerr << "error: --max-degree " << cfg.D << " exceeds the configured maximum "
                  << cfg.limit << "\n";
        return 2;
    }
    return 0;
}

std::string fixture_path(const Cfg& cfg, const std::string& name) {
    std::string dir = cfg.fixtures_dir;
    if (const char* env = std::getenv("MCFORMS_FIXTURES")) dir = env;
    return dir + "/" + name + "_h" + std::to_string(cfg.h) + "_n" + std::to_string(cfg.n) +
           "_d" + std::to_string(cfg.D) + ".json";
}

std::string render(const FormVal& x, const std::string& format) {
    if (format == "json") return json_render(x);
    if (format == "latex") return render_latex(x);
    return render_text(x);
}

// the objects shipped as golden fixtures, in a fixed order
const std::vector<std::string>& fixture_objects() {
    static const std::vector<std::string> v{"lambda", "g", "log-g", "I", "boldK", "boldJ"};
    return v;
}

FormVal compute_object(const Cfg& cfg, const std::string& object) {
    if (object == "lambda") {
        LambdaSolution S = solve_lambda(cfg.h, cfg.D);
        FormCtx c;
        c.h = cfg.h;
        c.D = cfg.D;
        // pack the 2h coefficients as gamma_c-tagged rows of a single value
        FormVal out(c);
        for (int cy = 1; cy <= 2 * cfg.h; ++cy)
            for (const auto& [w, q] : S.lam[cy - 1].terms)
                out.add_term(TermKey{FuncMono{}, BaseForm::gamma(cy), w}, q);
        return out;
    }
    SeriesBundle B = compute_g(solve_lambda(cfg.h, cfg.D));
    if (object == "g") return B.g;
    if (object == "g-inverse") return B.ginv;
    if (object == "log-g") return log_of_g(B);
    if (object == "I") return compute_I_direct(B);
    if (object == "K" || object == "H" || object == "omega-word") {
        if (cfg.j < 1 || cfg.j > cfg.h) throw CLI::ValidationError("--j must lie in [1,h]");
        if (object == "K") return compute_K(B, cfg.j);
        if (object == "H") return compute_H(B, compute_K(B, cfg.j), cfg.j);
        Word w(cfg.word.begin(), cfg.word.end());
        for (int l : w)
            if (l < 1 || l > cfg.h) throw CLI::ValidationError("--word letters must lie in [1,h]");
        return resolve_omega_word(B, w, cfg.j);
    }
    auto P = thn_build(cfg.h, cfg.n, cfg.D);
    if (object == "boldK" || object == "K-bold") return assemble_boldK(B, P);
    if (object == "boldJ" || object == "J" || object == "J-bold") return assemble_boldJ(B, P);
    throw CLI::ValidationError("unknown object: " + object);
}

int cmd_compute(const Cfg& cfg) {
    if (int rc = check_degree(cfg)) return rc;
    FormVal x = compute_object(cfg, cfg.object);
    std::cout << render(x, cfg.format);
    return 0;
}

struct Suite {
    bool ok = true;
    void report(bool pass, const std::string& name, const Cfg& cfg) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << " h=" << cfg.h << " n=" << cfg.n
                  << " D=" << cfg.D << "\n";
        ok = ok && pass;
    }
};

void suite_inverse(Suite& s, const Cfg& cfg) {
    SeriesBundle B = compute_g(solve_lambda(cfg.h, cfg.D));
    FormVal one = form_unit(B.ctx);
    s.report(form_mul(B.g, B.ginv) == one && form_mul(B.ginv, B.g) == one,
             "g-times-inverse-is-1", cfg);
}

void suite_explog(Suite& s, const Cfg& cfg) {
    SeriesBundle B = compute_g(solve_lambda(cfg.h, cfg.D));
    s.report(form_exp(log_of_g(B)) == B.g, "exp-log-g-is-g", cfg);
    s.report(lambda_total(lambda_series(cfg.h, cfg.D)) == log_of_g(B),
             "log-g-recursion-matches-series", cfg);
    s.report(compute_I(cfg.h, cfg.D, lambda_series(cfg.h, cfg.D)) == compute_I_direct(B),
             "I-two-routes-agree", cfg);
}

void suite_monodromy(Suite& s, const Cfg& cfg) {
    SeriesBundle B = compute_g(solve_lambda(cfg.h, cfg.D));
    bool okg = true;
    for (int c = 1; c <= 2 * cfg.h; ++c) okg = okg && residual_g(B, DeckLetter{c, 1}).is_zero();
    s.report(okg, "g-monodromy", cfg);
    for (int j = 1; j <= cfg.h; ++j) {
        FormVal K = compute_K(B, j);
        s.report(residual_K(B, K, j).is_zero(), "K-monodromy-j" + std::to_string(j), cfg);
        FormVal H = compute_H(B, K, j);
        bool okh = true;
        for (int i = 1; i <= cfg.h; ++i) okh = okh && residual_H(H, i).is_zero();
        s.report(okh, "H-monodromy-j" + std::to_string(j), cfg);
    }
}

void suite_fixedpoint(Suite& s, const Cfg& cfg) {
    SeriesBundle B = compute_g(solve_lambda(cfg.h, cfg.D));
    for (int j = 1; j <= cfg.h; ++j) {
        FormVal K = compute_K(B, j);
        s.report(fixed_point_image(B, K) == bernoulli_seed(B.ctx, j),
                 "fixed-point-residual-j" + std::to_string(j), cfg);
        s.report(compute_H(B, K, j) == form_mul(B.g, K), "H-equals-gK-j" + std::to_string(j),
                 cfg);
        FormVal sum(B.ctx);
        for (const Word& w : words_over(cfg.h, 0, cfg.D)) {
            FormVal e(B.ctx);
            e.add_term(TermKey{FuncMono{}, BaseForm::fun(), w}, ConstPoly(1));
            sum += form_mul(resolve_omega_word(B, w, j), e);
        }
        s.report(sum == K, "word-coefficients-reassemble-K-j" + std::to_string(j), cfg);
    }
}

void suite_tuples(Suite& s, const Cfg& cfg) {
    int n = std::max(cfg.n, 2);
    auto P = thn_build(cfg.h, n, cfg.D);
    FormCtx c;
    c.h = cfg.h;
    c.n = n;
    c.D = cfg.D;
    FormVal delta(c);
    delta.add_term(TermKey{FuncMono{}, BaseForm::omega(1), {1}}, ConstPoly(2));
    delta.add_term(TermKey{FuncMono{FuncSym{{cfg.h + 1}, 1}}, BaseForm::gamma(1), {1}},
                   ConstPoly(Rational(1, 3)));
    s.report(tuple_to_bold(forms_to_tuple(delta, cfg.h), P).is_zero(), "composed-map-is-zero",
             cfg);

    FormVal under = symbolic_underK(c);
    bool ok = true;
    for (int j = 1; j <= cfg.h && ok; ++j) {
        ok = deck_pullback({DeckLetter{cfg.h + j, 1}}, under) ==
             form_mul(env_exp_letter(c, j, +1), under);
        FormVal corr(c), Kj = symbolic_K(c, j);
        for (int l = 1; l <= c.D + 1; ++l) {
            Rational q = Rational((l % 2) ? 1 : -1) / factorial(l);
            for (const auto& [k, cc] : Kj.terms) {
                Word w = k.lie;
                for (int t = 0; t < l - 1; ++t) w.push_back(j);
                corr.add_term(TermKey{k.funcs, k.base, w}, cc * q);
            }
        }
        ok = ok && deck_pullback({DeckLetter{cfg.h + j, 2}}, under) ==
                       form_mul(under, env_exp_letter(c, j, -1)) + corr;
    }
    s.report(ok, "K-tuple-membership", cfg);
}

void suite_diagram(Suite& s, const Cfg& cfg) {
    int n = std::max(cfg.n, 2);
    auto P = thn_build(cfg.h, n, cfg.D);
    SeriesBundle B = compute_g(solve_lambda(cfg.h, cfg.D));
    FormCtx cn = B.ctx;
    cn.n = n;
    FormTuple T = k_tuple(B, cn);
    s.report(bold_s_gamma(log_of_g(B), tuple_to_bold(T, P)) ==
                 tuple_to_bold(S_gamma(re_ctx(B.g, cn), T), P),
             "twisted-action-diagram-commutes", cfg);
}

void suite_fixtures(Suite& s, const Cfg& cfg) {
    auto P = thn_build(cfg.h, cfg.n, cfg.D);
    for (const std::string& name : fixture_objects()) {
        std::string path = fixture_path(cfg, name);
        std::ifstream in(path);
        if (!in) {
            std::cout << "FAIL fixture-" << name << " (missing file " << path << ")\n";
            s.ok = false;
            continue;
        }
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(in);
        FormVal golden = parse_json(j, P);
        FormVal fresh = compute_object(cfg, name);
        s.report(golden == fresh && emit_json(fresh).dump(1) == j.dump(1),
                 "fixture-" + name, cfg);
    }
}

void suite_oracle(Suite& s, const Cfg& cfg) {
    for (const std::string& id : oracle_identity_ids()) {
        Cfg c = cfg;
        if (id == "diagram" || id == "boldg-monodromy") {
            c.h = 1;             // quadratic blowup in n; keep the default run fast
            c.D = std::min(c.D, 2 + (c.h == 1));
        }
        OracleReport r = crosscheck(id, c.h, c.n, c.D, c.trials, c.seed);
        std::cout << r.line() << "\n";
        s.ok = s.ok && r.pass;
    }
    bool dims = true;
    for (int h = 1; h <= 2; ++h)
        for (int n = 1; n <= 2; ++n)
            for (int d = 1; d <= std::min(cfg.D, 3); ++d)
                dims = dims && thn_dim_crosscheck(h, n, d);
    s.report(dims, "quotient-dimension-crosscheck", cfg);
}

int cmd_verify(const Cfg& cfg) {
    if (int rc = check_degree(cfg)) return rc;
    Suite s;
    bool all = cfg.suite == "all";
    if (all || cfg.suite == "inverse") suite_inverse(s, cfg);
    if (all || cfg.suite == "explog") suite_explog(s, cfg);
    if (all || cfg.suite == "monodromy") suite_monodromy(s, cfg);
    if (all || cfg.suite == "fixedpoint") suite_fixedpoint(s, cfg);
    if (all || cfg.suite == "tuples") suite_tuples(s, cfg);
    if (all || cfg.suite == "diagram") suite_diagram(s, cfg);
    if (all || cfg.suite == "fixtures") suite_fixtures(s, cfg);
    if (all || cfg.suite == "oracle") suite_oracle(s, cfg);
    return s.ok ? 0 : 1;
}

int cmd_fixtures(const Cfg& cfg, const std::string& action) {
    if (int rc = check_degree(cfg)) return rc;
    if (action == "write") {
        std::string dir = cfg.fixtures_dir;
        if (const char* env = std::getenv("MCFORMS_FIXTURES")) dir = env;
        fs::create_directories(dir);
        for (const std::string& name : fixture_objects()) {
            std::ofstream out(fixture_path(cfg, name), std::ios::trunc);
            out << json_render(compute_object(cfg, name));
        }
        return 0;
    }
    if (action == "check") {
        Suite s;
        suite_fixtures(s, cfg);
        return s.ok ? 0 : 1;
    }
    std::cerr << "error: fixtures action must be write or check\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact symbolic series for flat connections on configuration spaces"};
    app.require_subcommand(1);
    Cfg cfg;

    CLI::App* comp = app.add_subcommand("compute", "compute an object and print it");
    add_common(comp, cfg);
    comp->add_option("--object", cfg.object,
                     "lambda|g|g-inverse|log-g|I|K|H|omega-word|boldK|boldJ");
    comp->add_option("--j", cfg.j, "form index for K/H/omega-word");
    comp->add_option("--word", cfg.word, "letter word for omega-word");
    comp->add_option("--format", cfg.format, "text|json|latex")
        ->check(CLI::IsMember({"text", "json", "latex"}));

    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    add_common(ver, cfg);
    ver->add_option("--suite", cfg.suite, "verification suite")
        ->check(CLI::IsMember({"monodromy", "inverse", "explog", "fixedpoint", "tuples",
                               "diagram", "fixtures", "oracle", "all"}));
    ver->add_option("--seed", cfg.seed, "oracle seed");
    ver->add_option("--trials", cfg.trials, "oracle trials")->check(CLI::PositiveNumber);

    CLI::App* fix = app.add_subcommand("fixtures", "write or check golden fixtures");
    add_common(fix, cfg);
    std::string action;
    fix->add_option("action", action, "write|check")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (comp->parsed()) return cmd_compute(cfg);
        if (ver->parsed()) return cmd_verify(cfg);
        return cmd_fixtures(cfg, action);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
