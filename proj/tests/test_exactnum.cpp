#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stepcert/poly.hpp>
#include <stepcert/quad.hpp>
#include <stepcert/rational.hpp>

#include <cstdint>
#include <vector>

using namespace stepcert;

namespace {

// Deterministic 64-bit mixer for property tests.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rational small_rat(std::uint64_t seed) {
    long n = static_cast<long>(mix64(seed) % 41) - 20;
    long d = static_cast<long>(mix64(seed * 7 + 1) % 19) + 1;
    return rat(n, d);
}

// S_{K3,path3+v}(p) = -2(1-p)^2 p + 5(1-p)p^2 - 3p^3, built term by term.
PolyP exceptional_cubic() {
    PolyP p = PolyP::x();
    PolyP q = poly_sub(PolyP::constant(rat(1)), p); // 1-p
    PolyP t1 = poly_scale(poly_mul(poly_mul(q, q), p), rat(-2));
    PolyP t2 = poly_scale(poly_mul(q, poly_mul(p, p)), rat(5));
    PolyP t3 = poly_scale(poly_mul(p, poly_mul(p, p)), rat(-3));
    return poly_add(poly_add(t1, t2), t3);
}

// 100-digit fixed-point interval sign oracle for c0 + c1*sqrt(a) + c2*sqrt(b)
// + c3*sqrt(ab).  Returns -1/0/+1, or +2 if the interval straddles zero.
int interval_sign_oracle(const QuadValue& v) {
    const int digits = 100;
    BigInt scale = int_pow(BigInt(10), digits);
    BigInt lo = 0, hi = 0;
    const auto& rads = v.radicands();
    const auto& c = v.coords();
    for (std::size_t i = 0; i < c.size(); ++i) {
        BigInt r = 1;
        for (std::size_t b = 0; b < rads.size(); ++b)
            if (i & (std::size_t{1} << b)) r *= rads[b];
        // floor and ceil of sqrt(r) * scale
        BigInt s2 = r * scale * scale;
        BigInt root;
        mpz_sqrt(root.get_mpz_t(), s2.get_mpz_t());
        BigInt root_lo = root, root_hi = root + 1;
        // term = c_i * sqrt(r): interval endpoints depend on sign of c_i
        BigInt cn = num(c[i]), cd = den(c[i]);
        auto fdiv = [](const BigInt& a, const BigInt& b) {
            BigInt q;
            mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            return q;
        };
        auto cdiv = [](const BigInt& a, const BigInt& b) {
            BigInt q;
            mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            return q;
        };
        if (sgn(cn) >= 0) {
            lo += fdiv(cn * root_lo, cd);
            hi += cdiv(cn * root_hi, cd);
        } else {
            lo += fdiv(cn * root_hi, cd);
            hi += cdiv(cn * root_lo, cd);
        }
    }
    if (sgn(lo) > 0) return 1;
    if (sgn(hi) < 0) return -1;
    if (sgn(lo) == 0 && sgn(hi) == 0) return 0;
    return 2;
}

} // namespace

TEST_CASE("rational construction, reduction, serialization") {
    CHECK(rat_str(rat(2, 4)) == "1/2");
    CHECK(rat_str(rat(-5, 128)) == "-5/128");
    CHECK(rat_str(rat(-4, -8)) == "1/2");
    CHECK(rat_str(rat(7)) == "7");
    CHECK(rat_str(rat(0, 5)) == "0");
    CHECK(den(rat(3, -7)) == 7);
    CHECK_THROWS_WITH_AS(rat(1, 0), doctest::Contains("ZeroDenominator"), Error);
}

TEST_CASE("rational parsing accepts a/b only") {
    CHECK(parse_rational("-5/128") == rat(-5, 128));
    CHECK(parse_rational("3") == rat(3));
    CHECK(parse_rational("+2/6") == rat(1, 3));
    CHECK(parse_rational("010/4") == rat(5, 2));
    for (const char* bad : {"", "0.5", "1/2/3", "1/", "/2", "a", "1e3", " 1/2", "1 /2", "-"}) {
        CHECK_THROWS_AS(parse_rational(bad), Error);
    }
    CHECK_THROWS_WITH_AS(parse_rational("1/0"), doctest::Contains("ZeroDenominator"), Error);
}

TEST_CASE("rational field axioms on random triples") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rational a = small_rat(3 * i), b = small_rat(3 * i + 1), c = small_rat(3 * i + 2);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
    }
    CHECK(rat_pow(rat(-2, 3), 3) == rat(-8, 27));
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(21, 10) == 352716);
}

TEST_CASE("polynomial arithmetic basics") {
    PolyP p = PolyP::x();
    PolyP one_minus_p = poly_sub(PolyP::constant(rat(1)), p);
    CHECK(poly_mul(p, one_minus_p) == PolyP({rat(0), rat(1), rat(-1)})); // p - p^2
    CHECK(poly_eval(poly_pow(p, 3), rat(1, 2)) == rat(1, 8));
    CHECK(poly_eval(exceptional_cubic(), rat(3, 10)) == rat(-3, 50));

    CHECK(PolyP().degree() == -1);
    CHECK(poly_sub(p, p).is_zero());
    CHECK(poly_derivative(poly_pow(p, 4)) == PolyP({rat(0), rat(0), rat(0), rat(4)}));

    // compose: (1-p)^2 at p -> p^2 gives (1-p^2)^2
    PolyP sq = poly_mul(one_minus_p, one_minus_p);
    PolyP comp = poly_compose(sq, poly_mul(p, p));
    CHECK(poly_eval(comp, rat(1, 2)) == rat(9, 16));

    auto [q, r] = poly_divmod(poly_pow(p, 3), poly_add(p, PolyP::constant(rat(1))));
    CHECK(poly_add(poly_mul(q, poly_add(p, PolyP::constant(rat(1)))), r) == poly_pow(p, 3));
    CHECK(r.degree() < 1);
}

TEST_CASE("root isolation: exceptional cubic has roots 2/5 and 1/2 in (0,1)") {
    auto roots = isolate_real_roots(exceptional_cubic(), rat(0), rat(1));
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].lo == roots[0].hi);
    CHECK(roots[0].lo == rat(2, 5));
    CHECK(roots[1].lo == roots[1].hi);
    CHECK(roots[1].lo == rat(1, 2));
    CHECK(roots[0].multiplicity == 1);
    CHECK(roots[1].multiplicity == 1);
}

TEST_CASE("root isolation: boundary roots excluded, irrational roots bracketed") {
    // q(p) = p has its only root at the boundary of (0,1).
    CHECK(isolate_real_roots(PolyP::x(), rat(0), rat(1)).empty());

    // q(p) = p^2 - 1/2: one root in (0,1), bracketing sqrt(1/2).
    PolyP q({rat(-1, 2), rat(0), rat(1)});
    auto roots = isolate_real_roots(q, rat(0), rat(1));
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].lo < roots[0].hi);
    CHECK(roots[0].lo * roots[0].lo < rat(1, 2));
    CHECK(roots[0].hi * roots[0].hi > rat(1, 2));

    CHECK_THROWS_WITH_AS(isolate_real_roots(PolyP(), rat(0), rat(1)),
                         doctest::Contains("ZeroPolynomial"), Error);
}

TEST_CASE("root isolation: multiplicities and mixed rational/irrational roots") {
    // (x - 1/3)^2 * (x^2 - 3): double rational root, one irrational root in (0,2).
    PolyP f = poly_mul(poly_pow(PolyP({rat(-1, 3), rat(1)}), 2), PolyP({rat(-3), rat(0), rat(1)}));
    auto roots = isolate_real_roots(f, rat(0), rat(2));
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].lo == rat(1, 3));
    CHECK(roots[0].multiplicity == 2);
    CHECK(roots[1].multiplicity == 1);
    CHECK(roots[1].lo * roots[1].lo < rat(3));
    CHECK(roots[1].hi * roots[1].hi > rat(3));
    // Strict separation of closed hulls.
    CHECK(roots[0].hi < roots[1].lo);

    // Root clusters: (x-1/2)(x^2 - 26/100) has roots 1/2 and ~0.5099 close together.
    PolyP g = poly_mul(PolyP({rat(-1, 2), rat(1)}), PolyP({rat(-26, 100), rat(0), rat(1)}));
    auto r2 = isolate_real_roots(g, rat(0), rat(1));
    REQUIRE(r2.size() == 2);
    CHECK(r2[0].hi < r2[1].lo);
    CHECK(r2[0].lo == rat(1, 2));
}

TEST_CASE("root isolation count matches Sturm variation difference") {
    // Random products of distinct linear factors.
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        std::vector<Rational> used;
        PolyP f = PolyP::constant(rat(1));
        int inside = 0;
        for (int j = 0; j < 4; ++j) {
            Rational r = rat(static_cast<long>(mix64(trial * 11 + j) % 21) - 10, 4);
            bool dup = false;
            for (const auto& u : used) dup |= (u == r);
            if (dup) continue;
            used.push_back(r);
            f = poly_mul(f, PolyP({-r, rat(1)}));
            if (rat(-2) < r && r < rat(2)) ++inside;
        }
        auto roots = isolate_real_roots(f, rat(-2), rat(2));
        CHECK(static_cast<int>(roots.size()) == inside);
    }
}

TEST_CASE("quad_sign: spec examples") {
    CHECK(quad_sign(QuadValue(rat(0))) == 0);
    QuadValue a = QuadValue(rat(-1)) + QuadValue::root_term(rat(1), 3);
    CHECK(quad_sign(a) == 1); // sqrt(3) > 1
    QuadValue b = QuadValue(rat(7, 4)) - QuadValue::root_term(rat(1), 3);
    CHECK(quad_sign(b) == 1); // 49/16 > 3
    QuadValue c = QuadValue(rat(-7, 4)) + QuadValue::root_term(rat(1), 3);
    CHECK(quad_sign(c) == -1);
}

TEST_CASE("quad arithmetic: normalization and field behavior") {
    QuadValue r2 = QuadValue::root_term(rat(1), 2);
    QuadValue r3 = QuadValue::root_term(rat(1), 3);
    CHECK((r2 * r2).is_rational());
    CHECK((r2 * r2).as_rational() == rat(2));
    QuadValue prod = r2 * r3; // sqrt(6)
    CHECK(prod.radicands() == std::vector<long>{2, 3});
    CHECK((prod * prod).as_rational() == rat(6));

    // (sqrt2 + sqrt3)^2 = 5 + 2 sqrt6
    QuadValue s = (r2 + r3).pow(2);
    QuadValue expect = QuadValue(rat(5)) + (r2 * r3) + (r2 * r3);
    CHECK(s == expect);

    // Normalization drops an unused radicand: (sqrt2 + sqrt3) - sqrt3 = sqrt2.
    CHECK((r2 + r3 - r3) == r2);
    CHECK((r2 - r2).is_rational());

    // Three distinct radicands overflow.
    QuadValue r5 = QuadValue::root_term(rat(1), 5);
    CHECK_THROWS_WITH_AS(r2 + r3 + r5, doctest::Contains("RadicandOverflow"), Error);
    // Non-coprime radicands (sqrt6 * sqrt10 would need sqrt60) overflow too.
    QuadValue r6 = QuadValue::root_term(rat(1), 6);
    QuadValue r10 = QuadValue::root_term(rat(1), 10);
    CHECK_THROWS_AS(r6 * r10, Error);
    // Radicand validation.
    CHECK_THROWS_AS(QuadValue::root_term(rat(1), 12), Error); // not square-free
    CHECK_THROWS_AS(QuadValue::root_term(rat(1), 1), Error);
}

TEST_CASE("quad_sign agrees with 100-digit interval oracle on random values") {
    int checked = 0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        QuadValue v = QuadValue(small_rat(4 * i)) +
                      QuadValue::root_term(small_rat(4 * i + 1), 2) +
                      QuadValue::root_term(small_rat(4 * i + 2), 3) +
                      (QuadValue::root_term(small_rat(4 * i + 3), 2) * QuadValue::root_term(rat(1), 3));
        int oracle = interval_sign_oracle(v);
        if (oracle == 2) continue; // straddles zero at 100 digits: skip (would mean v==0 up to 1e-100)
        CHECK(quad_sign(v) == oracle);
        ++checked;
    }
    CHECK(checked > 250);

    // Hard near-zero case: sqrt(2)*sqrt(3) - sqrt(6) == 0 exactly.
    QuadValue z = QuadValue::root_term(rat(1), 2) * QuadValue::root_term(rat(1), 3) -
                  QuadValue::root_term(rat(1), 6);
    CHECK(quad_sign(z) == 0);
    CHECK(z.is_zero());

    // Tight nonzero: 985/696 - sqrt(2) (continued-fraction convergent).
    QuadValue tight = QuadValue(rat(985, 696)) - QuadValue::root_term(rat(1), 2);
    CHECK(quad_sign(tight) == quad_sign(QuadValue(rat(985 * 985, 696 * 696)) - QuadValue(rat(2))));
    CHECK(quad_sign(tight) == 1);
}

TEST_CASE("quad helpers: abs and cmp") {
    QuadValue v = QuadValue(rat(1)) - QuadValue::root_term(rat(1), 2);
    CHECK(quad_sign(v) == -1);
    CHECK(quad_sign(quad_abs(v)) == 1);
    CHECK(quad_cmp(QuadValue::root_term(rat(1), 2), QuadValue(rat(3, 2))) == -1);
    CHECK(quad_cmp(QuadValue::root_term(rat(1), 2), QuadValue(rat(7, 5))) == 1);
}
