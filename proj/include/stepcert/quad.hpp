#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "rational.hpp"

namespace stepcert {

namespace detail {

inline bool is_squarefree(long r) {
    for (long d = 2; d * d <= r; ++d)
        if (r % (d * d) == 0) return false;
    return true;
}

inline long gcd_long(long a, long b) {
    while (b != 0) { long t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
}

} // namespace detail

// Element of Q, Q(sqrt(a)) or Q(sqrt(a), sqrt(b)) with a < b square-free,
// coprime integers > 1.  Coordinates are subset-indexed over the radicand
// list: with radicands {a, b}, coords are (1, sqrt(a), sqrt(b), sqrt(ab)).
// Values are kept normalized: radicands whose coordinates all vanish are
// dropped, so a QuadValue with an empty radicand list is exactly a Rational.
class QuadValue {
public:
    QuadValue() : coords_{rat(0)} {}
    QuadValue(const Rational& r) : coords_{r} {} // NOLINT: implicit by design
    QuadValue(long v) : coords_{rat(v)} {}       // NOLINT

    // c * sqrt(radicand)
    static QuadValue root_term(const Rational& c, long radicand) {
        check_radicand(radicand);
        QuadValue v;
        v.rads_ = {radicand};
        v.coords_ = {rat(0), c};
        v.normalize();
        return v;
    }

    const std::vector<long>& radicands() const { return rads_; }
    const std::vector<Rational>& coords() const { return coords_; }

    bool is_rational() const { return rads_.empty(); }
    Rational rational_part() const { return coords_[0]; }
    // The full rational value; error if an irrational component remains.
    Rational as_rational() const {
        require(is_rational(), "IrrationalValue", "QuadValue has surd components");
        return coords_[0];
    }

    bool is_zero() const {
        for (const auto& c : coords_)
            if (sign(c) != 0) return false;
        return true;
    }

    friend QuadValue operator-(const QuadValue& a) {
        QuadValue r = a;
        for (auto& c : r.coords_) c = -c;
        return r;
    }

    friend QuadValue operator+(const QuadValue& a, const QuadValue& b) {
        auto [ra, rb, rads] = aligned(a, b);
        for (std::size_t i = 0; i < ra.size(); ++i) ra[i] += rb[i];
        return from_parts(std::move(rads), std::move(ra));
    }

    friend QuadValue operator-(const QuadValue& a, const QuadValue& b) { return a + (-b); }

    friend QuadValue operator*(const QuadValue& a, const QuadValue& b) {
        auto [ra, rb, rads] = aligned(a, b);
        const std::size_t n = rads.size();
        std::vector<Rational> out(ra.size(), rat(0));
        for (std::size_t s = 0; s < ra.size(); ++s) {
            if (sign(ra[s]) == 0) continue;
            for (std::size_t t = 0; t < rb.size(); ++t) {
                if (sign(rb[t]) == 0) continue;
                // sqrt-product over the overlap becomes a rational factor.
                Rational f = ra[s] * rb[t];
                std::size_t overlap = s & t;
                for (std::size_t i = 0; i < n; ++i)
                    if (overlap & (std::size_t{1} << i)) f *= rat(rads[i]);
                out[s ^ t] += f;
            }
        }
        return from_parts(std::move(rads), std::move(out));
    }

    friend QuadValue operator*(const Rational& s, const QuadValue& a) {
        QuadValue r = a;
        for (auto& c : r.coords_) c *= s;
        r.normalize();
        return r;
    }

    QuadValue pow(unsigned long e) const {
        QuadValue r(rat(1));
        QuadValue base = *this;
        while (e > 0) {
            if (e & 1UL) r = r * base;
            e >>= 1UL;
            if (e > 0) base = base * base;
        }
        return r;
    }

    bool operator==(const QuadValue& o) const {
        return rads_ == o.rads_ && coords_ == o.coords_;
    }

    std::string str() const {
        std::string s = rat_str(coords_[0]);
        for (std::size_t i = 1; i < coords_.size(); ++i) {
            if (sign(coords_[i]) == 0) continue;
            long r = 1;
            for (std::size_t b = 0; b < rads_.size(); ++b)
                if (i & (std::size_t{1} << b)) r *= rads_[b];
            s += " + (" + rat_str(coords_[i]) + ")*sqrt(" + std::to_string(r) + ")";
        }
        return s;
    }

    // Internal constructor for deserialization; normalizes.
    static QuadValue make(std::vector<long> rads, std::vector<Rational> coords) {
        for (long r : rads) check_radicand(r);
        for (std::size_t i = 0; i < rads.size(); ++i)
            for (std::size_t j = i + 1; j < rads.size(); ++j) {
                require(rads[i] != rads[j], "RadicandOverflow", "duplicate radicand");
                require(detail::gcd_long(rads[i], rads[j]) == 1, "RadicandOverflow",
                        "radicands must be pairwise coprime");
            }
        require(coords.size() == (std::size_t{1} << rads.size()), "MalformedQuadValue",
                "coordinate count must be 2^(#radicands)");
        return from_parts(std::move(rads), std::move(coords));
    }

private:
    std::vector<long> rads_;       // sorted, each > 1, square-free, pairwise coprime
    std::vector<Rational> coords_; // size 1 << rads_.size()

    static void check_radicand(long r) {
        require(r > 1, "MalformedQuadValue", "radicand must exceed 1");
        require(detail::is_squarefree(r), "MalformedQuadValue", "radicand must be square-free");
    }

    static QuadValue from_parts(std::vector<long> rads, std::vector<Rational> coords) {
        QuadValue v;
        v.rads_ = std::move(rads);
        v.coords_ = std::move(coords);
        v.normalize();
        return v;
    }

    void normalize() {
        // Sort radicands (coordinates permute accordingly).
        for (std::size_t i = 0; i + 1 < rads_.size(); ++i)
            if (rads_[i] > rads_[i + 1]) {
                std::swap(rads_[i], rads_[i + 1]);
                // With at most two radicands only bits 0 and 1 can swap:
                std::swap(coords_[1], coords_[2]);
                i = static_cast<std::size_t>(-1);
            }
        // Drop radicands with all-zero coordinates, highest bit first.
        for (std::size_t b = rads_.size(); b-- > 0;) {
            bool used = false;
            for (std::size_t i = 0; i < coords_.size(); ++i)
                if ((i & (std::size_t{1} << b)) && sign(coords_[i]) != 0) { used = true; break; }
            if (!used) {
                std::vector<Rational> nc;
                nc.reserve(coords_.size() / 2);
                for (std::size_t i = 0; i < coords_.size(); ++i)
                    if (!(i & (std::size_t{1} << b))) nc.push_back(coords_[i]);
                coords_ = std::move(nc);
                rads_.erase(rads_.begin() + static_cast<long>(b));
            }
        }
    }

    // Smallest coprime basis {x} or {x, y} whose span {x, y, xy} covers every
    // radicand in `used`; empty optional if none exists within two radicands.
    static bool find_basis(const std::vector<long>& used, std::vector<long>& basis) {
        if (used.empty()) { basis.clear(); return true; }
        if (used.size() == 1) { basis = used; return true; }
        bool coprime = true;
        for (std::size_t i = 0; i + 1 < used.size(); ++i)
            for (std::size_t j = i + 1; j < used.size(); ++j)
                coprime &= detail::gcd_long(used[i], used[j]) == 1;
        if (used.size() == 2 && coprime) { basis = used; return true; }
        // Candidate basis elements: the radicands and their gcd/cofactor splits.
        std::vector<long> cand = used;
        for (std::size_t i = 0; i < used.size(); ++i)
            for (std::size_t j = i + 1; j < used.size(); ++j) {
                long g = detail::gcd_long(used[i], used[j]);
                for (long v : {g, used[i] / g, used[j] / g})
                    if (v > 1) cand.push_back(v);
            }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        auto covers = [&](long x, long y) {
            for (long u : used)
                if (u != x && u != y && u != x * y) return false;
            return true;
        };
        for (std::size_t i = 0; i < cand.size(); ++i)
            for (std::size_t j = i + 1; j < cand.size(); ++j)
                if (detail::gcd_long(cand[i], cand[j]) == 1 && covers(cand[i], cand[j])) {
                    basis = {cand[i], cand[j]};
                    return true;
                }
        return false;
    }

    // Coordinates of v in the subset basis of `rads` (pairwise coprime, each
    // radicand of v a product of basis elements).
    static std::vector<Rational> embed(const QuadValue& v, const std::vector<long>& rads) {
        std::vector<Rational> out(std::size_t{1} << rads.size(), rat(0));
        for (std::size_t s = 0; s < v.coords_.size(); ++s) {
            if (sign(v.coords_[s]) == 0 && s != 0) continue;
            // Decompose the product of this index's radicands over the basis.
            std::vector<int> expo(rads.size(), 0);
            for (std::size_t i = 0; i < v.rads_.size(); ++i) {
                if (!(s & (std::size_t{1} << i))) continue;
                long r = v.rads_[i];
                for (std::size_t bpos = 0; bpos < rads.size(); ++bpos)
                    if (r % rads[bpos] == 0) { r /= rads[bpos]; ++expo[bpos]; }
                require(r == 1, "RadicandOverflow", "radicand outside basis span");
            }
            Rational f = v.coords_[s];
            std::size_t t = 0;
            for (std::size_t bpos = 0; bpos < rads.size(); ++bpos) {
                f *= rat_pow(rat(rads[bpos]), static_cast<unsigned long>(expo[bpos] / 2));
                if (expo[bpos] % 2) t |= std::size_t{1} << bpos;
            }
            out[t] += f;
        }
        return out;
    }

    // Common-radicand coordinate vectors for a and b.
    static std::tuple<std::vector<Rational>, std::vector<Rational>, std::vector<long>>
    aligned(const QuadValue& a, const QuadValue& b) {
        std::vector<long> used = a.rads_;
        for (long r : b.rads_)
            if (std::find(used.begin(), used.end(), r) == used.end()) used.push_back(r);
        std::sort(used.begin(), used.end());
        std::vector<long> rads;
        if (!find_basis(used, rads))
            fail("RadicandOverflow", "values span more than two independent radicands");
        std::sort(rads.begin(), rads.end());
        return {embed(a, rads), embed(b, rads), rads};
    }

    friend int quad_sign(const QuadValue&);
};

namespace detail {

// Exact sign of c[0] + c[1]*sqrt(rads[0]) (+ c[2]*sqrt(rads[1]) + c[3]*sqrt(rads[0]*rads[1])),
// by recursive splitting on the last radicand and comparing squares.
inline int sign_in_tower(const std::vector<Rational>& c, const std::vector<long>& rads) {
    if (rads.empty()) return sign(c[0]);
    if (rads.size() == 1) {
        const Rational& x = c[0];
        const Rational& y = c[1];
        int sx = sign(x), sy = sign(y);
        if (sy == 0) return sx;
        if (sx == 0) return sy;
        if (sx == sy) return sx;
        // Opposite signs: compare x^2 against rads[0]*y^2.
        int cmp = sign(x * x - rat(rads[0]) * y * y);
        if (cmp == 0) return 0; // impossible for square-free radicand unless x=y=0
        return cmp > 0 ? sx : sy;
    }
    // Split v = X + Y*sqrt(b) with X, Y in Q(sqrt(a)).
    const long b = rads[1];
    std::vector<long> sub{rads[0]};
    std::vector<Rational> X{c[0], c[1]}, Y{c[2], c[3]};
    int sx = sign_in_tower(X, sub);
    int sy = sign_in_tower(Y, sub);
    if (sy == 0) return sx;
    if (sx == 0) return sy;
    if (sx == sy) return sx;
    // Compare X^2 against b*Y^2 inside Q(sqrt(a)).
    const long a = rads[0];
    auto sq = [&](const std::vector<Rational>& v) {
        return std::vector<Rational>{v[0] * v[0] + rat(a) * v[1] * v[1], rat(2) * v[0] * v[1]};
    };
    std::vector<Rational> x2 = sq(X), y2 = sq(Y);
    std::vector<Rational> diff{x2[0] - rat(b) * y2[0], x2[1] - rat(b) * y2[1]};
    int cmp = sign_in_tower(diff, sub);
    if (cmp == 0) return 0; // impossible for coprime square-free radicands unless X=Y=0
    return cmp > 0 ? sx : sy;
}

} // namespace detail

// Exact sign in {-1, 0, +1}; zero iff all coordinates vanish.
inline int quad_sign(const QuadValue& v) {
    return detail::sign_in_tower(v.coords_, v.rads_);
}

inline QuadValue quad_abs(const QuadValue& v) { return quad_sign(v) >= 0 ? v : -v; }

// sign(a - b)
inline int quad_cmp(const QuadValue& a, const QuadValue& b) { return quad_sign(a - b); }

// Serialized form: "c" for rationals, otherwise zero coordinates dropped and
// surd terms written as "c*sqrt(r)", joined with " + ".
inline std::string quad_str(const QuadValue& v) {
    const auto& c = v.coords();
    const auto& r = v.radicands();
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (sign(c[i]) == 0) continue;
        long rad = 1;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (i & (std::size_t{1} << j)) rad *= r[j];
        if (!out.empty()) out += " + ";
        out += rat_str(c[i]);
        if (rad != 1) out += "*sqrt(" + std::to_string(rad) + ")";
    }
    return out.empty() ? "0" : out;
}

// Closest double: sum of coordinate values times square roots.
inline double quad_double(const QuadValue& v) {
    const auto& c = v.coords();
    const auto& r = v.radicands();
    double out = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        double rad = 1.0;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (i & (std::size_t{1} << j)) rad *= static_cast<double>(r[j]);
        out += c[i].get_d() * std::sqrt(rad);
    }
    return out;
}

} // namespace stepcert
