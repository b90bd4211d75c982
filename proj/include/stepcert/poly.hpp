#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace stepcert {

// Dense univariate polynomial over Q.  coeffs[i] is the coefficient of x^i;
// trailing zeros are always trimmed, so the zero polynomial has empty coeffs
// and degree() == -1.
struct PolyP {
    std::vector<Rational> coeffs;

    PolyP() = default;
    explicit PolyP(std::vector<Rational> c) : coeffs(std::move(c)) { trim(); }

    static PolyP constant(const Rational& c) { return PolyP({c}); }
    static PolyP x() { return PolyP({rat(0), rat(1)}); }

    void trim() {
        while (!coeffs.empty() && sign(coeffs.back()) == 0) coeffs.pop_back();
    }
    bool is_zero() const { return coeffs.empty(); }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    const Rational& operator[](std::size_t i) const { return coeffs[i]; }

    Rational leading() const { return coeffs.empty() ? rat(0) : coeffs.back(); }

    bool operator==(const PolyP& o) const { return coeffs == o.coeffs; }
};

inline PolyP poly_add(const PolyP& a, const PolyP& b) {
    std::vector<Rational> c(std::max(a.coeffs.size(), b.coeffs.size()), rat(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] += b.coeffs[i];
    return PolyP(std::move(c));
}

inline PolyP poly_neg(const PolyP& a) {
    std::vector<Rational> c(a.coeffs);
    for (auto& q : c) q = -q;
    return PolyP(std::move(c));
}

inline PolyP poly_sub(const PolyP& a, const PolyP& b) { return poly_add(a, poly_neg(b)); }

inline PolyP poly_scale(const PolyP& a, const Rational& s) {
    std::vector<Rational> c(a.coeffs);
    for (auto& q : c) q *= s;
    return PolyP(std::move(c));
}

inline PolyP poly_mul(const PolyP& a, const PolyP& b) {
    if (a.is_zero() || b.is_zero()) return PolyP();
    std::vector<Rational> c(a.coeffs.size() + b.coeffs.size() - 1, rat(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            c[i + j] += a.coeffs[i] * b.coeffs[j];
    return PolyP(std::move(c));
}

inline PolyP poly_pow(const PolyP& a, unsigned long e) {
    PolyP r = PolyP::constant(rat(1));
    PolyP base = a;
    while (e > 0) {
        if (e & 1UL) r = poly_mul(r, base);
        e >>= 1UL;
        if (e > 0) base = poly_mul(base, base);
    }
    return r;
}

inline Rational poly_coeff(const PolyP& a, std::size_t k) {
    return k < a.coeffs.size() ? a.coeffs[k] : rat(0);
}

inline Rational poly_eval(const PolyP& a, const Rational& x) {
    Rational acc = rat(0);
    for (std::size_t i = a.coeffs.size(); i-- > 0;) acc = acc * x + a.coeffs[i];
    return acc;
}

inline PolyP poly_compose(const PolyP& a, const PolyP& inner) {
    PolyP acc;
    for (std::size_t i = a.coeffs.size(); i-- > 0;)
        acc = poly_add(poly_mul(acc, inner), PolyP::constant(a.coeffs[i]));
    return acc;
}

inline PolyP poly_derivative(const PolyP& a) {
    if (a.coeffs.size() <= 1) return PolyP();
    std::vector<Rational> c(a.coeffs.size() - 1);
    for (std::size_t i = 1; i < a.coeffs.size(); ++i) c[i - 1] = a.coeffs[i] * rat(static_cast<long>(i));
    return PolyP(std::move(c));
}

// Euclidean division: a = q*b + r with deg r < deg b.
inline std::pair<PolyP, PolyP> poly_divmod(const PolyP& a, const PolyP& b) {
    if (b.is_zero()) fail("ZeroPolynomial", "division by zero polynomial");
    PolyP r = a;
    std::vector<Rational> q(std::max<int>(a.degree() - b.degree() + 1, 0), rat(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        Rational f = r.leading() / b.leading();
        int shift = r.degree() - b.degree();
        q[static_cast<std::size_t>(shift)] = f;
        // r -= f * x^shift * b
        for (std::size_t i = 0; i < b.coeffs.size(); ++i)
            r.coeffs[i + static_cast<std::size_t>(shift)] -= f * b.coeffs[i];
        r.trim();
    }
    return {PolyP(std::move(q)), r};
}

inline PolyP poly_rem(const PolyP& a, const PolyP& b) { return poly_divmod(a, b).second; }
inline PolyP poly_quot(const PolyP& a, const PolyP& b) { return poly_divmod(a, b).first; }

// Monic gcd.
inline PolyP poly_gcd(PolyP a, PolyP b) {
    while (!b.is_zero()) {
        PolyP r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) a = poly_scale(a, rat(1) / a.leading());
    return a;
}

// Interval [lo,hi] containing exactly one real root of `polynomial`, counted
// with the stated multiplicity.  Rational roots are returned degenerate
// (lo == hi == root).
struct RootInterval {
    PolyP polynomial;
    Rational lo;
    Rational hi;
    int multiplicity = 1;
};

namespace detail {

// Yun square-free decomposition: q = prod factors[i].first ^ factors[i].second
// with the .first parts pairwise coprime and square-free.
inline std::vector<std::pair<PolyP, int>> squarefree_decompose(const PolyP& q) {
    std::vector<std::pair<PolyP, int>> out;
    PolyP g = poly_gcd(q, poly_derivative(q));
    if (g.degree() <= 0) {
        out.push_back({q, 1});
        return out;
    }
    PolyP w = poly_quot(q, g);
    int mult = 1;
    while (w.degree() > 0) {
        PolyP y = poly_gcd(w, g);
        PolyP f = poly_quot(w, y);
        if (f.degree() > 0) out.push_back({f, mult});
        w = y;
        g = poly_quot(g, y);
        ++mult;
    }
    return out;
}

// All rational roots of q with multiplicities, found by candidate testing on
// the primitive integer version and repeated synthetic division.
inline std::vector<std::pair<Rational, int>> rational_roots(PolyP q) {
    std::vector<std::pair<Rational, int>> out;
    if (q.degree() <= 0) return out;
    // Factor out x^k.
    int zero_mult = 0;
    while (!q.coeffs.empty() && sign(q.coeffs.front()) == 0) {
        q.coeffs.erase(q.coeffs.begin());
        ++zero_mult;
    }
    if (zero_mult > 0) out.push_back({rat(0), zero_mult});
    if (q.degree() <= 0) return out;

    // Scale to integer coefficients.
    BigInt lcm = 1;
    for (const auto& c : q.coeffs) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), den(c).get_mpz_t());
    std::vector<BigInt> ic(q.coeffs.size());
    for (std::size_t i = 0; i < q.coeffs.size(); ++i) ic[i] = num(q.coeffs[i]) * (lcm / den(q.coeffs[i]));

    auto divisors = [](BigInt v) {
        std::vector<BigInt> ds;
        v = abs(v);
        for (BigInt d = 1; d * d <= v; ++d) {
            if (v % d == 0) {
                ds.push_back(d);
                if (d * d != v) ds.push_back(v / d);
            }
        }
        return ds;
    };
    std::vector<Rational> candidates;
    for (const BigInt& pn : divisors(ic.front()))
        for (const BigInt& pd : divisors(ic.back())) {
            candidates.push_back(rat(pn, pd));
            candidates.push_back(rat(-pn, pd));
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (const Rational& r : candidates) {
        int mult = 0;
        while (q.degree() > 0 && sign(poly_eval(q, r)) == 0) {
            q = poly_quot(q, PolyP({-r, rat(1)}));
            ++mult;
        }
        if (mult > 0) out.push_back({r, mult});
        if (q.degree() <= 0) break;
    }
    return out;
}

inline std::vector<PolyP> sturm_chain(const PolyP& q) {
    std::vector<PolyP> chain;
    chain.push_back(q);
    chain.push_back(poly_derivative(q));
    while (!chain.back().is_zero()) {
        PolyP r = poly_neg(poly_rem(chain[chain.size() - 2], chain.back()));
        if (r.is_zero()) break;
        chain.push_back(std::move(r));
    }
    return chain;
}

inline int sturm_variations(const std::vector<PolyP>& chain, const Rational& x) {
    int v = 0, prev = 0;
    for (const PolyP& p : chain) {
        int s = sign(poly_eval(p, x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++v;
        prev = s;
    }
    return v;
}

// Number of distinct real roots in (a, b]; q(a) must be nonzero.
inline int sturm_count(const std::vector<PolyP>& chain, const Rational& a, const Rational& b) {
    return sturm_variations(chain, a) - sturm_variations(chain, b);
}

} // namespace detail

// Disjoint isolating intervals for all real roots of q strictly inside
// (lo, hi), sorted by position, multiplicities counted in q.  Roots at the
// endpoints are excluded.  Closed hulls [lo_i, hi_i] are pairwise disjoint
// and each contains exactly one root of q.
inline std::vector<RootInterval> isolate_real_roots(const PolyP& q, const Rational& lo, const Rational& hi) {
    if (q.is_zero()) fail("ZeroPolynomial", "cannot isolate roots of the zero polynomial");
    require(lo < hi, "EmptyInterval", "isolate_real_roots needs lo < hi");
    std::vector<RootInterval> out;
    if (q.degree() == 0) return out;

    struct Work {
        RootInterval ri;
        std::vector<PolyP> chain; // Sturm chain of this root's squarefree factor; empty for rational points
    };
    std::vector<Work> work;

    // Rational roots first: exact, degenerate intervals.
    PolyP rest = q;
    for (const auto& [r, mult] : detail::rational_roots(q)) {
        for (int i = 0; i < mult; ++i) rest = poly_quot(rest, PolyP({-r, rat(1)}));
        if (lo < r && r < hi) work.push_back({{q, r, r, mult}, {}});
    }

    // Remaining factor has only irrational real roots, so rational interval
    // endpoints are never roots and Sturm counts on (a, b] equal counts on
    // open intervals.
    for (const auto& [factor, mult] : detail::squarefree_decompose(rest)) {
        if (factor.degree() <= 0) continue;
        auto chain = detail::sturm_chain(factor);
        std::vector<std::pair<Rational, Rational>> stack{{lo, hi}};
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            int n = detail::sturm_count(chain, a, b);
            if (n == 0) continue;
            if (n == 1) {
                work.push_back({{q, a, b, mult}, chain});
                continue;
            }
            Rational mid = (a + b) / 2;
            // mid is rational, hence not a root of `factor`.
            stack.push_back({a, mid});
            stack.push_back({mid, b});
        }
    }

    // Bisect toward this entry's own root (rational points never move).
    auto shrink = [](Work& w) {
        if (w.ri.lo == w.ri.hi) return;
        Rational mid = (w.ri.lo + w.ri.hi) / 2;
        if (detail::sturm_count(w.chain, w.ri.lo, mid) >= 1)
            w.ri.hi = mid;
        else
            w.ri.lo = mid;
    };

    // Refine until closed hulls are strictly separated.  Distinct roots
    // separate after finitely many bisections.
    bool touching = true;
    while (touching) {
        touching = false;
        std::sort(work.begin(), work.end(), [](const Work& x, const Work& y) {
            return x.ri.lo < y.ri.lo || (x.ri.lo == y.ri.lo && x.ri.hi < y.ri.hi);
        });
        for (std::size_t i = 0; i + 1 < work.size(); ++i) {
            if (!(work[i].ri.hi < work[i + 1].ri.lo)) {
                shrink(work[i]);
                shrink(work[i + 1]);
                touching = true;
            }
        }
    }
    out.reserve(work.size());
    for (auto& w : work) out.push_back(std::move(w.ri));
    return out;
}

} // namespace stepcert
