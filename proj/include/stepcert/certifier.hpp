#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stepcert/error.hpp"
#include "stepcert/expansion.hpp"
#include "stepcert/ffkernel.hpp"
#include "stepcert/graph.hpp"
#include "stepcert/poly.hpp"
#include "stepcert/quad.hpp"
#include "stepcert/rational.hpp"
#include "stepcert/stepkernel.hpp"

namespace stepcert {

// Balanced rank-1 kernel f(x)f(y) with f = 1 on [0,1/3], -1/2 on (1/3,1]:
// every moment of f beyond the first is nonzero, so t(K_z, .) never vanishes
// while every graph with a degree-1 vertex gets density zero.
inline StepKernel rank1_balanced_kernel() {
    return make_step_kernel({rat(1, 3), rat(2, 3)},
                            {{rat(1), rat(-1, 2)}, {rat(-1, 2), rat(1, 4)}});
}

// Universal balanced 3-block kernel whose triangle density 28/27 drives the
// cubic term of the expansion.
inline StepKernel k3_probe_kernel() {
    return make_step_kernel({rat(1, 3), rat(1, 3), rat(1, 3)},
                            {{rat(2), rat(-1), rat(-1)},
                             {rat(-1), rat(1), rat(0)},
                             {rat(-1), rat(0), rat(1)}});
}

struct LinearCertificate {
    Graph f;
    Rational p;
    Rational eps;
    int sigma = 0;
    StepKernel kernel;
    Rational gap;
    PolyP eps_poly;
};

// Scale the probe kernel by a small signed epsilon so that the cubic term
// dominates; valid whenever the cubic coefficient is nonzero at p.
inline LinearCertificate certify_linear(const Graph& f, const Rational& p) {
    require(f.order >= 3 && f.order <= 7, "OrderOutOfRange",
            "certification supports 3 to 7 vertices");
    require(sign(p) > 0 && p < rat(1), "BoundaryP", "p must lie strictly inside (0,1)");

    ExpansionTable table = build_table(f);
    Rational sval = poly_eval(table.entries.at(canonical_form(named_graph("K3"))).s, p);
    require(sign(sval) != 0, "ExceptionalPoint",
            "the cubic coefficient vanishes at this p; use the full pipeline");
    int sigma = sign(sval);

    StepKernel probe = k3_probe_kernel();
    PolyP eps_poly = epsilon_polynomial(f, p, probe);

    Rational eps = (p < rat(1) - p ? p : rat(1) - p) / rat(2);
    for (int iter = 0; iter < 200; ++iter, eps /= rat(2)) {
        Rational signed_eps = rat(sigma) * eps;
        if (sign(poly_eval(eps_poly, signed_eps)) <= 0) continue;
        StepKernel perturbed = add(constant(p), scale(signed_eps, probe));
        if (!range_check(perturbed, rat(0), rat(1))) continue;
        Rational gap = rho_induced(f, perturbed) - rand_density(f, p);
        require(gap == poly_eval(eps_poly, signed_eps), "GapMismatch",
                "expansion and direct evaluation disagree");
        return LinearCertificate{f, p, eps, sigma, std::move(probe), gap, std::move(eps_poly)};
    }
    fail("SearchExhausted", "no epsilon found after 200 halvings");
}

struct DiagnosticEntry {
    std::string label;
    bool degenerate = false;
    long lowest_order = -1;
    QuadValue lowest_coeff;
    bool even_negative = false;
};

struct C5Report {
    Rational p2_value;
    Rational c4_value;
    std::vector<DiagnosticEntry> battery;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Symmetric integer-entry kernel on equal blocks, double-centered so that
// every row integrates to zero.
inline StepKernel centered_random_kernel(int blocks, std::uint64_t seed) {
    auto n = static_cast<std::size_t>(blocks);
    std::vector<std::vector<Rational>> v(n, std::vector<Rational>(n));
    std::uint64_t ctr = seed;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            long x = static_cast<long>(mix64(++ctr) % 7) - 3;
            v[i][j] = v[j][i] = rat(x);
        }
    std::vector<Rational> row(n, rat(0));
    Rational grand = rat(0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[i] += v[i][j];
        row[i] /= rat(blocks);
        grand += row[i];
    }
    grand /= rat(blocks);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i][j] += grand - row[i] - row[j];
    return make_step_kernel(std::vector<Rational>(n, rat(1, blocks)), std::move(v));
}

} // namespace detail

// Reproduces the coefficient pattern that defeats every linear perturbation
// of the 5-cycle at p = 1/2: for any nonzero balanced kernel the lowest
// surviving term of the epsilon polynomial has even order and a negative
// coefficient.
inline C5Report c5_diagnostic() {
    Graph c5 = named_graph("C5");
    Rational half = rat(1, 2);
    ExpansionTable table = build_table(c5);

    C5Report r;
    r.p2_value = eval_P(table, named_graph("P2"), half);
    r.c4_value = eval_P(table, named_graph("C4"), half);

    std::vector<std::pair<std::string, StepKernel>> kernels;
    kernels.emplace_back("rank1_balanced", rank1_balanced_kernel());
    kernels.emplace_back("rank1_halves",
                         make_step_kernel({rat(1, 2), rat(1, 2)},
                                          {{rat(1), rat(-1)}, {rat(-1), rat(1)}}));
    kernels.emplace_back("cubic_probe", k3_probe_kernel());
    for (int t = 0; t < 3; ++t)
        kernels.emplace_back("centered_random_" + std::to_string(t),
                             detail::centered_random_kernel(4, 0x5eed0000 + t));
    kernels.emplace_back("zero", constant(rat(0)));

    for (auto& [label, d] : kernels) {
        require(is_balanced(d), "UnbalancedKernel", "battery kernels must be balanced");
        DiagnosticEntry e;
        e.label = label;
        PolyP poly = epsilon_polynomial(c5, half, d);
        long lowest = -1;
        for (std::size_t i = 0; i < poly.coeffs.size(); ++i)
            if (sign(poly.coeffs[i]) != 0) {
                lowest = static_cast<long>(i);
                break;
            }
        if (lowest < 0) {
            e.degenerate = true;
        } else {
            e.lowest_order = lowest;
            e.lowest_coeff = QuadValue(poly.coeffs[static_cast<std::size_t>(lowest)]);
            e.even_negative = lowest % 2 == 0 && sign(poly.coeffs[static_cast<std::size_t>(lowest)]) < 0;
        }
        r.battery.push_back(std::move(e));
    }
    return r;
}

struct SupportEntry {
    CanonGraph h;
    Rational p_coeff; // expansion coefficient of H at p
    Rational t_b;     // t(H, B)
    QuadValue t_u;    // t(H, U) at the certified tensor k
    QuadValue t_w;    // t(H, W)
    QuadValue contribution;
};

struct Certificate {
    Graph f;
    Rational p;
    Rational delta;
    Rational lambda;
    Rational gamma;
    int m = 0;
    KernelHandle handle_u;
    long z = 0;
    long n = 0;
    std::string w_choice; // "const1" | "uz"
    KernelHandle handle_w;
    std::vector<SupportEntry> support;
    QuadValue gap;
};

namespace detail {

inline QuadValue quad_pow(const QuadValue& v, long e) {
    QuadValue out{rat(1)};
    for (long i = 0; i < e; ++i) out = out * v;
    return out;
}

// lambda^e(H) |t(H,U)| strictly maximal at kz over the support
inline bool strictly_dominant(const CanonGraph& kz, const Rational& lambda,
                              const std::map<CanonGraph, QuadValue>& t) {
    QuadValue mz = rat_pow(lambda, kz.edges.size()) * quad_abs(t.at(kz));
    for (const auto& [h, val] : t) {
        if (h == kz) continue;
        if (quad_sign(rat_pow(lambda, h.edges.size()) * quad_abs(val) - mz) >= 0) return false;
    }
    return true;
}

// Minimal dyadic gamma < 1 with lambda^e(H) |t(H,U)| <= gamma * mz for all
// H != kz, verified by exact comparison.
inline Rational dyadic_gamma(const CanonGraph& kz, const Rational& lambda,
                             const std::map<CanonGraph, QuadValue>& t) {
    QuadValue mz = rat_pow(lambda, kz.edges.size()) * quad_abs(t.at(kz));
    auto fits = [&](const Rational& g) {
        for (const auto& [h, val] : t) {
            if (h == kz) continue;
            if (quad_sign(rat_pow(lambda, h.edges.size()) * quad_abs(val) - g * mz) > 0)
                return false;
        }
        return true;
    };
    for (long den = 1024; den <= (1L << 30); den *= 2) {
        if (!fits(rat(den - 1, den))) continue;
        long lo = 1, hi = den - 1;
        while (lo < hi) {
            long mid = lo + (hi - lo) / 2;
            if (fits(rat(mid, den)))
                hi = mid;
            else
                lo = mid + 1;
        }
        return rat(lo, den);
    }
    fail("SearchExhausted", "no dyadic bound below 1 fits the domination ratios");
}

// Candidate clique kernels for the sign-fixing factor W, primary first; for
// odd z every odd prime divisor of z-2 yields a fallback family.
inline std::vector<KernelHandle> w_candidates(long z) {
    if (z == 3 || z % 2 == 0) return {make_uz(z)};
    std::vector<KernelHandle> out;
    for (long q = 3; q <= z - 2; q += 2)
        if (is_prime(q) && (z - 2) % q == 0)
            out.push_back(KernelHandle{"fp", z, q, 1, smallest_nonresidue(q), {}, rat(0)});
    return out;
}

// Fix the tensor power of a clique kernel so its z-clique density is
// strictly negative, following the parity forced by p mod 4.
inline KernelHandle tune_negative(KernelHandle h, const Graph& kz) {
    if (h.kind != "fp") {
        require(quad_sign(t_handle(kz, h)) < 0, "SearchExhausted",
                "clique kernel density is not negative");
        return h;
    }
    SigmaProfile prof = sigma_profile(kz, h.p, h.s);
    long start = h.p % 4 == 1 ? 1 : 2;
    long step = h.p % 4 == 1 ? 2 : 4;
    for (long k = start; k <= 40; k += step)
        if (quad_sign(t_from_profile(prof, kz.edges.size(), h.p, k)) < 0) {
            h.k = k;
            return h;
        }
    fail("SearchExhausted", "no tensor power makes the clique density negative");
}

} // namespace detail

// Exact certificate that the constant kernel at p is not a local maximizer
// of the induced F-density: a perturbation delta * B x (lambda U)^N x W with
// positive improvement, every ingredient serialized for re-checking.
inline Certificate certify_full(const Graph& f, const Rational& p, const Rational& delta) {
    require(f.order >= 3 && f.order <= 7, "OrderOutOfRange",
            "certification supports 3 to 7 vertices");
    require(sign(p) > 0 && p < rat(1), "BoundaryP", "p must lie strictly inside (0,1)");
    Rational lim = p < rat(1) - p ? p : rat(1) - p;
    require(sign(delta) > 0 && delta <= lim, "BadDelta", "delta must lie in (0, min(p,1-p)]");

    int m = f.order;
    StepKernel b = rank1_balanced_kernel();
    require(is_balanced(b), "SupportDegenerate", "the balanced factor lost balance");

    // Support: minimum-degree-2 classes with nonzero expansion coefficient.
    ExpansionTable table = build_table(f);
    std::vector<CanonGraph> support_set;
    std::map<CanonGraph, Rational> pcoeff, tb;
    for (const CanonGraph& h : domination_support(m)) {
        Rational pc = eval_P(table, h, p);
        if (sign(pc) == 0) continue;
        Rational tbh = t_hom(h.to_graph(), b);
        require(sign(tbh) != 0, "SupportDegenerate",
                "balanced kernel density vanished on a support graph");
        support_set.push_back(h);
        pcoeff.emplace(h, pc);
        tb.emplace(h, tbh);
    }
    CanonGraph km = canonical_form(complete_graph(m));
    require(pcoeff.count(km) == 1 && quad_abs(QuadValue(pcoeff.at(km))) == QuadValue(rat(1)),
            "SupportDegenerate", "the m-clique coefficient must be a unit");

    // Dominating kernel and its tensor power.
    KernelHandle hu = make_uz(m);
    Domination dom = find_domination_k(m, support_set, hu);
    hu.k = dom.k;

    // Maximizers of |t(H,U)|: all cliques by domination; pick the one with
    // the fewest edges and scale by lambda < 1 if the maximizer is not yet
    // unique.
    QuadValue tmax{rat(0)};
    for (const CanonGraph& h : support_set) {
        QuadValue a = quad_abs(dom.t.at(h));
        if (quad_sign(a - tmax) > 0) tmax = a;
    }
    std::vector<CanonGraph> kstar;
    for (const CanonGraph& h : support_set)
        if (quad_sign(quad_abs(dom.t.at(h)) - tmax) == 0) {
            require(is_clique(h.to_graph()), "SupportDegenerate",
                    "a non-clique attained the maximal density magnitude");
            kstar.push_back(h);
        }
    CanonGraph kz = kstar.front();
    for (const CanonGraph& h : kstar)
        if (h.edges.size() < kz.edges.size()) kz = h;
    long z = kz.order;

    Rational lambda = rat(1);
    if (kstar.size() > 1) {
        int j = 1;
        for (; j <= 64; ++j) {
            lambda = rat(1) - rat_pow(rat(1, 2), static_cast<unsigned long>(j));
            if (detail::strictly_dominant(kz, lambda, dom.t)) break;
        }
        require(j <= 64, "SearchExhausted", "no lambda makes the chosen clique dominant");
    }
    require(detail::strictly_dominant(kz, lambda, dom.t), "SearchExhausted",
            "chosen clique is not strictly dominant");
    Rational gamma = detail::dyadic_gamma(kz, lambda, dom.t);

    // Per-graph coefficients c_H and the W factor fixing the sign of the
    // clique term.
    std::map<CanonGraph, Rational> coeff;
    Rational sum_other = rat(0);
    for (const CanonGraph& h : support_set) {
        Rational c = pcoeff.at(h) * rat_pow(delta, h.edges.size()) * tb.at(h);
        coeff.emplace(h, c);
        if (h != kz) sum_other += sign(c) < 0 ? -c : c;
    }
    Rational cz = coeff.at(kz);

    std::vector<KernelHandle> wcands;
    std::string w_choice;
    if (sign(cz) > 0) {
        w_choice = "const1";
        wcands.push_back(KernelHandle{"const", 0, 0, 0, 0, {}, rat(-1)});
    } else {
        w_choice = "uz";
        wcands = detail::w_candidates(z);
    }

    for (std::size_t ci = 0; ci < wcands.size(); ++ci) {
        try {
            KernelHandle hw = w_choice == "const1" ? wcands[ci]
                                                   : detail::tune_negative(wcands[ci],
                                                                           complete_graph(static_cast<int>(z)));
            std::map<CanonGraph, QuadValue> tw;
            for (const CanonGraph& h : support_set)
                tw.emplace(h, w_choice == "const1" ? QuadValue(rat(1))
                                                   : t_handle(h.to_graph(), hw));
            QuadValue clique_term = cz * tw.at(kz);
            require(quad_sign(clique_term) > 0, "SearchExhausted",
                    "the sign-fixing factor failed on the chosen clique");

            // Smallest even N with gamma^N sum |c_H| < c_z t(K_z, W); the
            // shared factor |t(K_z, lambda U)|^N > 0 cancels from both sides.
            long n = 2;
            for (; n <= 2000; n += 2)
                if (quad_sign(clique_term -
                              QuadValue(rat_pow(gamma, static_cast<unsigned long>(n)) * sum_other)) > 0)
                    break;
            require(n <= 2000, "SearchExhausted", "no even tensor power certifies domination");

            // The displayed inequality chain, with the shared factor restored.
            QuadValue tkz_pow =
                detail::quad_pow(rat_pow(lambda, kz.edges.size()) * dom.t.at(kz), n);
            QuadValue chain =
                cz * tkz_pow * tw.at(kz) -
                rat_pow(gamma, static_cast<unsigned long>(n)) * sum_other * tkz_pow;
            require(quad_sign(chain) > 0, "SearchExhausted", "domination chain check failed");

            QuadValue gap{rat(0)};
            std::vector<SupportEntry> entries;
            for (const CanonGraph& h : support_set) {
                QuadValue tlam = rat_pow(lambda, h.edges.size()) * dom.t.at(h);
                QuadValue contrib = coeff.at(h) * detail::quad_pow(tlam, n) * tw.at(h);
                gap = gap + contrib;
                entries.push_back({h, pcoeff.at(h), tb.at(h), dom.t.at(h), tw.at(h), contrib});
            }
            require(quad_sign(gap - chain) >= 0, "GapNotPositive",
                    "gap fell below the domination chain bound");
            require(quad_sign(gap) == 1, "GapNotPositive", "assembled gap is not positive");

            return Certificate{f,  p, delta, lambda,   gamma, m,  hu,
                               z,  n, w_choice, hw,    std::move(entries), gap};
        } catch (const Error& err) {
            if (err.code() != "RadicandOverflow" || ci + 1 == wcands.size()) throw;
        }
    }
    fail("SearchExhausted", "no sign-fixing kernel family applied");
}

struct ValidationResult {
    bool ok = false;
    std::string first_failure;
    explicit operator bool() const { return ok; }
};

// Independent re-derivation of everything the certificate claims; trusts no
// stored number it can recompute.
inline ValidationResult validate_certificate(const Certificate& c) {
    auto bad = [](std::string why) { return ValidationResult{false, std::move(why)}; };
    try {
        if (c.f.order < 3 || c.f.order > 7) return bad("graph order outside 3..7");
        if (!(sign(c.p) > 0 && c.p < rat(1))) return bad("p outside (0,1)");
        Rational lim = c.p < rat(1) - c.p ? c.p : rat(1) - c.p;
        if (!(sign(c.delta) > 0 && c.delta <= lim)) return bad("delta outside (0, min(p,1-p)]");
        if (!(sign(c.lambda) > 0 && c.lambda <= rat(1))) return bad("lambda outside (0,1]");
        if (!(sign(c.gamma) > 0 && c.gamma < rat(1))) return bad("gamma outside (0,1)");
        if (c.m != c.f.order) return bad("m does not match the graph order");
        if (c.n < 2 || c.n % 2 != 0) return bad("N must be a positive even integer");
        if (c.z < 3 || c.z > c.m) return bad("z outside [3,m]");
        if (c.w_choice != "const1" && c.w_choice != "uz") return bad("unknown W choice");

        ExpansionTable table = build_table(c.f);
        StepKernel b = rank1_balanced_kernel();
        if (!is_balanced(b)) return bad("balanced factor is not balanced");

        std::map<CanonGraph, const SupportEntry*> by_h;
        for (const SupportEntry& e : c.support)
            if (!by_h.emplace(e.h, &e).second) return bad("duplicate support entry");

        std::size_t expected = 0;
        for (const CanonGraph& h : domination_support(c.m)) {
            Rational pc = eval_P(table, h, c.p);
            auto it = by_h.find(h);
            if (sign(pc) == 0) {
                if (it != by_h.end()) return bad("support contains a zero-coefficient graph");
                continue;
            }
            ++expected;
            if (it == by_h.end()) return bad("support is missing a graph");
            const SupportEntry& e = *it->second;
            if (e.p_coeff != pc) return bad("stored expansion coefficient mismatch");
            if (e.t_b != t_hom(h.to_graph(), b)) return bad("stored balanced density mismatch");
            if (!(e.t_u == t_handle(h.to_graph(), c.handle_u))) return bad("stored t(H,U) mismatch");
            QuadValue tw = c.w_choice == "const1" ? QuadValue(rat(1))
                                                  : t_handle(h.to_graph(), c.handle_w);
            if (!(e.t_w == tw)) return bad("stored t(H,W) mismatch");
        }
        if (expected != c.support.size()) return bad("support size mismatch");

        CanonGraph kz = canonical_form(complete_graph(static_cast<int>(c.z)));
        auto kit = by_h.find(kz);
        if (kit == by_h.end()) return bad("the chosen clique is not in the support");
        const SupportEntry& ez = *kit->second;
        if (c.w_choice == "uz" && quad_sign(t_handle(kz.to_graph(), c.handle_w)) >= 0)
            return bad("the sign-fixing kernel lacks negative clique density");

        // Domination data at the stored lambda and gamma.
        QuadValue mz = rat_pow(c.lambda, kz.edges.size()) * quad_abs(ez.t_u);
        if (quad_sign(mz) <= 0) return bad("clique density magnitude is zero");
        for (const SupportEntry& e : c.support) {
            if (e.h == kz) continue;
            QuadValue vh = rat_pow(c.lambda, e.h.edges.size()) * quad_abs(e.t_u);
            if (quad_sign(vh - c.gamma * mz) > 0) return bad("gamma bound violated");
        }

        Rational cz = ez.p_coeff * rat_pow(c.delta, kz.edges.size()) * ez.t_b;
        QuadValue clique_term = cz * ez.t_w;
        if (quad_sign(clique_term) <= 0) return bad("clique term is not positive");
        Rational sum_other = rat(0);
        for (const SupportEntry& e : c.support) {
            if (e.h == kz) continue;
            Rational ch = e.p_coeff * rat_pow(c.delta, e.h.edges.size()) * e.t_b;
            sum_other += sign(ch) < 0 ? -ch : ch;
        }
        QuadValue tkz_pow = detail::quad_pow(rat_pow(c.lambda, kz.edges.size()) * ez.t_u, c.n);
        QuadValue chain = cz * tkz_pow * ez.t_w -
                          rat_pow(c.gamma, static_cast<unsigned long>(c.n)) * sum_other * tkz_pow;
        if (quad_sign(chain) <= 0) return bad("domination chain fails at the stored N");

        QuadValue gap{rat(0)};
        for (const SupportEntry& e : c.support) {
            Rational ch = e.p_coeff * rat_pow(c.delta, e.h.edges.size()) * e.t_b;
            QuadValue tlam = rat_pow(c.lambda, e.h.edges.size()) * e.t_u;
            QuadValue contrib = ch * detail::quad_pow(tlam, c.n) * e.t_w;
            if (!(contrib == e.contribution)) return bad("stored contribution mismatch");
            gap = gap + contrib;
        }
        if (!(gap == c.gap)) return bad("stored gap mismatch");
        if (quad_sign(gap - chain) < 0) return bad("gap below the chain bound");
        if (quad_sign(gap) != 1) return bad("gap is not positive");
        return ValidationResult{true, ""};
    } catch (const Error& err) {
        return bad(std::string("recomputation error: ") + err.what());
    }
}

// Same re-derivation discipline for the single-direction certificates: the
// stored epsilon is kept, everything derived from it is recomputed.
inline ValidationResult validate_linear_certificate(const LinearCertificate& c) {
    auto bad = [](std::string why) { return ValidationResult{false, std::move(why)}; };
    try {
        if (c.f.order < 3 || c.f.order > 7) return bad("graph order outside 3..7");
        if (!(sign(c.p) > 0 && c.p < rat(1))) return bad("p outside (0,1)");
        if (sign(c.eps) <= 0) return bad("epsilon is not positive");
        if (c.sigma != 1 && c.sigma != -1) return bad("sigma is not a sign");

        ExpansionTable table = build_table(c.f);
        Rational sval = poly_eval(table.entries.at(canonical_form(named_graph("K3"))).s, c.p);
        if (sign(sval) != c.sigma) return bad("sigma does not match the cubic coefficient sign");

        if (!(c.eps_poly == epsilon_polynomial(c.f, c.p, c.kernel)))
            return bad("stored direction polynomial mismatch");

        Rational signed_eps = rat(c.sigma) * c.eps;
        StepKernel perturbed = add(constant(c.p), scale(signed_eps, c.kernel));
        if (!range_check(perturbed, rat(0), rat(1))) return bad("perturbed kernel leaves [0,1]");

        if (c.gap != rho_induced(c.f, perturbed) - rand_density(c.f, c.p))
            return bad("stored gap mismatch");
        if (c.gap != poly_eval(c.eps_poly, signed_eps))
            return bad("gap disagrees with the direction polynomial");
        if (sign(c.gap) <= 0) return bad("gap is not positive");
        return ValidationResult{true, ""};
    } catch (const Error& err) {
        return bad(std::string("recomputation error: ") + err.what());
    }
}

// The perturbation as a lazy tensor: delta lambda^N * B x U^N x W.
inline LazyTensorKernel lazy_delta(const Certificate& c) {
    StepKernel u = materialize(c.handle_u);
    StepKernel w = c.w_choice == "const1" ? constant(rat(1)) : materialize(c.handle_w);
    LazyTensorKernel k;
    k.factors.push_back(rank1_balanced_kernel());
    for (long i = 0; i < c.n; ++i) k.factors.push_back(u);
    k.factors.push_back(std::move(w));
    k.scalar = c.delta * rat_pow(c.lambda, static_cast<unsigned long>(c.n));
    return k;
}

inline StepKernel materialize_delta(const Certificate& c, std::size_t max_blocks = 4096) {
    LazyTensorKernel lk = lazy_delta(c);
    std::size_t blocks = 1;
    for (const StepKernel& f : lk.factors) {
        blocks *= f.widths.size();
        require(blocks <= max_blocks, "BlockBudgetExceeded",
                "materialized perturbation exceeds the block budget");
    }
    StepKernel out = lk.factors.front();
    for (std::size_t i = 1; i < lk.factors.size(); ++i) out = tensor(out, lk.factors[i]);
    return scale(lk.scalar, out);
}

} // namespace stepcert
