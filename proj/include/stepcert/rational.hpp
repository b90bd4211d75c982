#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "error.hpp"

namespace stepcert {

// Exact arithmetic foundation.  Rational is always reduced with positive
// denominator; GMP maintains that invariant for results of arithmetic on
// canonical operands, so the only care point is construction, which must go
// through rat()/parse_rational below.
using BigInt   = mpz_class;
using Rational = mpq_class;

inline Rational rat(const BigInt& num, const BigInt& den) {
    if (den == 0) fail("ZeroDenominator", "rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational rat(long num, long den = 1) { return rat(BigInt(num), BigInt(den)); }

inline BigInt num(const Rational& q) { return q.get_num(); }
inline BigInt den(const Rational& q) { return q.get_den(); }

inline int sign(const Rational& q) { return sgn(q); }
inline Rational rat_abs(const Rational& q) { return abs(q); }

inline BigInt int_pow(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational rat_pow(const Rational& base, unsigned long e) {
    return Rational(int_pow(num(base), e), int_pow(den(base), e));
}

inline BigInt binomial(unsigned long n, unsigned long k) {
    if (k > n) return 0;
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// Serialized form: "num/den" reduced, or plain "num" when den == 1.
inline std::string rat_str(const Rational& q) {
    if (den(q) == 1) return num(q).get_str();
    return num(q).get_str() + "/" + den(q).get_str();
}

// Accepts exactly the serialized forms above: optional sign, decimal digits,
// optional "/digits".  Anything else (decimals, spaces, empty fields) fails.
inline Rational parse_rational(const std::string& s) {
    const auto bad = [&]() { fail("MalformedRational", "not an a/b rational: '" + s + "'"); };
    if (s.empty()) bad();
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') { ++i; ++digits; }
    if (digits == 0) bad();
    std::string ns = s.substr(0, i);
    std::string ds = "1";
    if (i < s.size()) {
        if (s[i] != '/') bad();
        ++i;
        std::size_t j = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        if (i == j || i != s.size()) bad();
        ds = s.substr(j);
    }
    bool neg = ns[0] == '-';
    if (ns[0] == '+' || ns[0] == '-') ns.erase(0, 1);
    BigInt n(ns, 10), d(ds, 10);
    if (neg) n = -n;
    if (d == 0) fail("ZeroDenominator", "zero denominator in '" + s + "'");
    return rat(n, d);
}

} // namespace stepcert
