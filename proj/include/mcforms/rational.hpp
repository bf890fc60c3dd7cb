#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcforms {

using Int = boost::multiprecision::cpp_int;

// Exact rational scalar. cpp_rational keeps the fraction reduced with a
// positive denominator, which is exactly the canonical form we need.
using Rational = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial of negative");
    Int f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return Rational(f);
}

inline Rational binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Int num = 1, den = 1;
    for (int i = 0; i < k; ++i) { num *= (n - i); den *= (i + 1); }
    return Rational(num, den);
}

// Bernoulli numbers of the generating function t/(e^t - 1), so b1 = -1/2.
// Recurrence: sum_{k=0}^{m} C(m+1,k) b_k = 0 for m >= 1, b_0 = 1.
inline Rational bernoulli(int n) {
    std::vector<Rational> b{Rational(1)};
    for (int m = 1; m <= n; ++m) {
        Rational s = 0;
        for (int k = 0; k < m; ++k) s += binomial(m + 1, k) * b[k];
        b.push_back(-s / binomial(m + 1, m));
    }
    return b[n];
}

inline std::string rat_str(const Rational& r) {
    std::string s = rat_num(r).str();
    if (rat_den(r) != 1) s += "/" + rat_den(r).str();
    return s;
}

} // namespace mcforms
