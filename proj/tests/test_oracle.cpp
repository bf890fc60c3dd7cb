#include <catch2/catch_amalgamated.hpp>

#include "mcforms/oracle.hpp"

using namespace mcforms;

TEST_CASE("random assignments are deterministic and canonical") {
    std::set<ConstSym> u{ConstSym::loop({3, 4}, 1), ConstSym::loop({3, 4}, 2),
                         ConstSym::tau(1, 2)};
    Assignment a = random_assignment(42, u), b = random_assignment(42, u);
    CHECK(a.values == b.values);
    CHECK(a.values.size() == 3);
    Assignment c = random_assignment(43, u);
    CHECK(a.values != c.values);

    // tau is stored under a canonical key, so both orders get the same value
    CHECK(ConstSym::tau(2, 1) == ConstSym::tau(1, 2));
    CHECK(a.values.at(ConstSym::tau(2, 1)) == a.values.at(ConstSym::tau(1, 2)));

    std::set<ConstSym> u2{ConstSym::loop({4, 3}, 1)};
    Assignment d = random_assignment(42, u2);
    for (const auto& [s, v] : d.values) CHECK(a.values.find(s) == a.values.end());

    // opaque values come from a digest, not from the seed
    std::set<ConstSym> u3{ConstSym::opaque("x")};
    CHECK(random_assignment(1, u3).values == random_assignment(2, u3).values);
}

TEST_CASE("specialization is linear and respects structural equality") {
    int h = 2, D = 3;
    SeriesBundle B = compute_g(solve_lambda(h, D));
    std::set<ConstSym> u;
    collect_symbols(omega_expand(B.g), u);
    collect_symbols(omega_expand(compute_K(B, 1)), u);
    Assignment sig = random_assignment(7, u);

    CHECK(specialize_form(FormVal(B.ctx), sig).empty());
    FormVal K = compute_K(B, 1);
    SpecVector vs = specialize_form(B.g + K, sig);
    SpecVector va = specialize_form(B.g, sig), vb = specialize_form(K, sig);
    for (const auto& [k, v] : vb) {
        va[k] += v;
        if (va[k] == 0) va.erase(k);
    }
    CHECK(vs == va);
    CHECK(specialize_form(B.g, sig) == specialize_form(compute_g(solve_lambda(h, D)).g, sig));
}

TEST_CASE("registered identities pass the cross-check") {
    for (const std::string& id : oracle_identity_ids()) {
        int h = (id == "diagram" || id == "boldg-monodromy") ? 1 : 2;
        int D = (id == "diagram") ? 2 : 3;
        OracleReport r = crosscheck(id, h, 2, D, 3, 42);
        INFO(r.line());
        CHECK(r.pass);
        CHECK(r.line().substr(0, 5) == "PASS ");
    }
}

TEST_CASE("a perturbed series fails the cross-check with a located residual") {
    SeriesBundle B = compute_g(solve_lambda(2, 3));
    FormVal bad = B.g;
    bad.add_term(TermKey{FuncMono{FuncSym{{3}, 1}}, BaseForm::fun(), {1, 1}},
                 ConstPoly(Rational(1, 7)));
    OracleReport r = crosscheck_pairs("perturbed-g", {{form_mul(bad, B.ginv), form_unit(B.ctx)}},
                                      2, 1, 3, 5, 42);
    CHECK_FALSE(r.pass);
    CHECK(r.detail.find("mismatch at") != std::string::npos);
    CHECK(r.line().substr(0, 5) == "FAIL ");
}

TEST_CASE("quotient dimensions agree between independent solver strategies") {
    for (int h = 1; h <= 2; ++h)
        for (int n = 1; n <= 2; ++n)
            for (int d = 1; d <= 3; ++d) CHECK(thn_dim_crosscheck(h, n, d));
    auto P = thn_build(1, 1, 2);
    CHECK(P->dim(1) == 2);
    CHECK(P->dim(2) == 0);
    CHECK(thn_build(1, 2, 2)->dim(2) == thn_build(1, 2, 2)->dim(2));
}
