#include <catch2/catch_amalgamated.hpp>

#include "displays.hpp"
#include "mcforms/engine.hpp"

using namespace mcforms;
namespace dsp = mcforms::displays;

namespace {

FormCtx envb(int h, int D) {
    FormCtx c;
    c.h = h;
    c.D = D;
    return c;
}

} // namespace

TEST_CASE("loop holonomy coefficients solve the defining system") {
    int h = 2, D = 3;
    LambdaSolution S = solve_lambda(h, D);
    for (int c = 1; c <= 2 * h; ++c) {
        for (int d = 1; d <= D; ++d) CHECK(lambda_loop_residual(S, c, d).is_zero());
        for (int d = 1; d <= 3; ++d)
            CHECK(S.lam[c - 1].part(d) == dsp::Lambda_part(S.ctx, h, c, d));
    }
}

TEST_CASE("g inverts exactly and matches its closed low-degree form") {
    int h = 2, D = 3;
    SeriesBundle B = compute_g(solve_lambda(h, D));
    FormVal one = form_unit(B.ctx);
    CHECK(form_mul(B.g, B.ginv) == one);
    CHECK(form_mul(B.ginv, B.g) == one);
    for (int d = 1; d <= 3; ++d) CHECK(B.g.part(d) == dsp::g_part(B.ctx, d));
}

TEST_CASE("g has trivial A-monodromy and exponential B-monodromy") {
    for (int h = 1; h <= 2; ++h) {
        SeriesBundle B = compute_g(solve_lambda(h, 3));
        for (int c = 1; c <= 2 * h; ++c) CHECK(residual_g(B, DeckLetter{c, 1}).is_zero());
    }
}

TEST_CASE("logarithm of g: recursion agrees with the direct series") {
    int h = 2, D = 3;
    SeriesBundle B = compute_g(solve_lambda(h, D));
    auto lam = lambda_series(h, D);
    CHECK(lambda_total(lam) == log_of_g(B));
    CHECK(form_exp(log_of_g(B)) == B.g);
    for (int d = 1; d <= 3; ++d) CHECK(lam[d] == dsp::lambda_part(B.ctx, d));
}

TEST_CASE("I: recursion route, direct route and closed low-degree form agree") {
    int h = 2, D = 3;
    SeriesBundle B = compute_g(solve_lambda(h, D));
    FormVal I = compute_I(h, D, lambda_series(h, D));
    CHECK(I == compute_I_direct(B));
    for (int d = 1; d <= 3; ++d) CHECK(I.part(d) == dsp::I_part(B.ctx, d));
}

TEST_CASE("K solves the fixed-point equation, H matches gK, monodromy closes") {
    for (int h = 1; h <= 2; ++h) {
        SeriesBundle B = compute_g(solve_lambda(h, 3));
        for (int j = 1; j <= h; ++j) {
            FormVal K = compute_K(B, j);
            CHECK(fixed_point_image(B, K) == bernoulli_seed(B.ctx, j));
            FormVal H = compute_H(B, K, j);
            CHECK(H == form_mul(B.g, K));
            CHECK(residual_K(B, K, j).is_zero());
            for (int i = 1; i <= h; ++i) CHECK(residual_H(H, i).is_zero());
        }
    }
}

TEST_CASE("word-indexed coefficient forms reassemble K") {
    int h = 2, D = 3;
    SeriesBundle B = compute_g(solve_lambda(h, D));
    for (int j = 1; j <= h; ++j) {
        FormVal K = compute_K(B, j);
        FormVal sum(B.ctx);
        for (const Word& w : words_over(h, 0, D))
            sum += form_mul(resolve_omega_word(B, w, j), dsp::envw(B.ctx, w));
        CHECK(sum == K);
    }
}

TEST_CASE("assembled connection matches the low-degree displays for n=1") {
    int h = 2, D = 3;
    auto P = thn_build(h, 1, D);
    SeriesBundle B = compute_g(solve_lambda(h, D));
    FormVal bK = assemble_boldK(B, P);
    FormVal bJ = assemble_boldJ(B, P);
    for (int d = 1; d <= 3; ++d) {
        CHECK(bK.part(d) == dsp::boldK_part(P, d));
        CHECK(bJ.part(d) == dsp::boldJ_part(P, d));
    }
}

TEST_CASE("composing the two decomposition maps gives zero") {
    for (auto [h, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {1, 3}}) {
        int D = 3;
        auto P = thn_build(h, n, D);
        FormCtx c = envb(h, D);
        c.n = n;
        FormVal delta(c);
        delta.add_term(TermKey{FuncMono{}, BaseForm::omega(1), {1}}, ConstPoly(2));
        delta.add_term(TermKey{FuncMono{FuncSym{{h + 1}, 1}}, BaseForm::gamma(1), {1, 1}},
                       ConstPoly(Rational(1, 3)));
        delta.add_term(TermKey{FuncMono{FuncSym{{1, h + 1}, 1}}, BaseForm::omega(h), {}},
                       ConstPoly(-1));
        CHECK(tuple_to_bold(forms_to_tuple(delta, h), P).is_zero());
    }
}

TEST_CASE("the twisted actions commute with the assembly map") {
    for (int h = 1; h <= 2; ++h) {
        int D = 2, n = 2;
        auto P = thn_build(h, n, D);
        SeriesBundle B = compute_g(solve_lambda(h, D));
        FormCtx cn = B.ctx;
        cn.n = n;
        FormTuple T = k_tuple(B, cn);
        FormVal lhs = bold_s_gamma(log_of_g(B), tuple_to_bold(T, P));
        FormVal rhs = tuple_to_bold(S_gamma(re_ctx(B.g, cn), T), P);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("gamma validation rejects series without the right monodromy") {
    SeriesBundle B = compute_g(solve_lambda(1, 2));
    CHECK_NOTHROW(check_gamma(B.g));
    FormVal bad = B.g;
    bad.add_term(TermKey{FuncMono{FuncSym{{1}, 1}}, BaseForm::fun(), {1}}, ConstPoly(1));
    CHECK_THROWS(check_gamma(bad));
}

TEST_CASE("product of coordinate copies of g keeps its B-monodromy") {
    for (auto [h, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}}) {
        int D = (h == 1) ? 3 : 2;
        auto P = thn_build(h, n, D);
        SeriesBundle B = compute_g(solve_lambda(h, D));
        FormVal bg = bold_g(B, P);
        for (int r = 1; r <= n; ++r)
            for (int i = 1; i <= h; ++i) {
                CHECK(residual_bold_g(bg, i, r).is_zero());
                CHECK(deck_pullback({DeckLetter{i, r}}, bg) == bg);
            }
    }
}

TEST_CASE("pole difference symbols satisfy the cocycle identity") {
    CHECK(d_symbol("P", "Q") + d_symbol("Q", "R") == d_symbol("P", "R"));
    CHECK(e_symbol("P", "Q") + e_symbol("Q", "R") == e_symbol("P", "R"));
    CHECK(d_symbol("P", "P").pts.empty());
    CHECK_THROWS(d_symbol("P", "Q") + e_symbol("Q", "R"));
}
