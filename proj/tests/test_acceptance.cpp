#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "stepcert/certifier.hpp"
#include "stepcert/sampler.hpp"

using namespace stepcert;

// Acceptance gate: one case per release criterion, each ending in exactly one
// verdict line.  A criterion whose published claim disagrees with the exact
// recomputation prints FAIL (as written) together with the recount, while the
// doctest assertions pin the recomputed values so regressions still fail the
// binary.  The binary exits nonzero only if an assertion breaks.

namespace {

struct Verdict {
    int criterion;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void done(bool as_written, const std::string& note = "") {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        if (as_written)
            std::printf("[criterion %d] PASS (%.1f s)\n", criterion, secs);
        else
            std::printf("[criterion %d] FAIL (as written): %s (%.1f s)\n", criterion,
                        note.c_str(), secs);
        std::fflush(stdout);
    }
};

Graph random_graph(std::mt19937_64& g, int lo, int hi) {
    int v = lo + static_cast<int>(g() % static_cast<unsigned>(hi - lo + 1));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < v; ++i)
        for (int j = i + 1; j < v; ++j)
            if (g() % 2 == 0) edges.push_back({i, j});
    return make_graph(v, edges);
}

StepKernel random_four_block(std::mt19937_64& g) {
    std::vector<long> nums(4);
    long total = 0;
    for (long& n : nums) {
        n = 1 + static_cast<long>(g() % 5);
        total += n;
    }
    std::vector<Rational> widths;
    for (long n : nums) widths.push_back(rat(n, total));
    std::vector<std::vector<Rational>> values(4, std::vector<Rational>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                rat(static_cast<long>(g() % 13) - 6, 20);
            values[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    return make_step_kernel(widths, values);
}

// f(x)f(y) over random blocks with integral of f forced to zero.
StepKernel random_rank_one_balanced(std::mt19937_64& g) {
    for (;;) {
        std::size_t blocks = 3 + g() % 2;
        std::vector<long> nums(blocks);
        long total = 0;
        for (long& n : nums) {
            n = 1 + static_cast<long>(g() % 4);
            total += n;
        }
        std::vector<Rational> widths, f;
        for (long n : nums) widths.push_back(rat(n, total));
        for (std::size_t i = 0; i < blocks; ++i)
            f.push_back(rat(static_cast<long>(g() % 11) - 5, 4));
        Rational mean = rat(0);
        for (std::size_t i = 0; i < blocks; ++i) mean += widths[i] * f[i];
        bool nonzero = false;
        for (Rational& fi : f) {
            fi -= mean;
            if (sign(fi) != 0) nonzero = true;
        }
        if (!nonzero) continue;
        std::vector<std::vector<Rational>> values(blocks, std::vector<Rational>(blocks));
        for (std::size_t i = 0; i < blocks; ++i)
            for (std::size_t j = 0; j < blocks; ++j) values[i][j] = f[i] * f[j];
        return make_step_kernel(widths, values);
    }
}

Certificate mutate_one_field(Certificate c, int which) {
    switch (which) {
        case 0: c.delta *= rat(2); break;
        case 1: c.lambda /= rat(2); break;
        case 2: c.n += 1; break;
        case 3: c.m += 1; break;
        case 4: c.gap = c.gap + QuadValue(rat(1)); break;
        case 5: c.support.front().t_u = c.support.front().t_u + QuadValue(rat(1)); break;
        case 6: c.support.front().p_coeff *= rat(2); break;
        case 7: c.support.pop_back(); break;
        case 8: c.w_choice = c.w_choice == "const1" ? "uz" : "const1"; break;
        default: c.z = c.z == 3 ? 4 : 3; break;
    }
    return c;
}

bool linear_route_refuses(const char* name, const Rational& p) {
    try {
        certify_linear(named_graph(name), p);
        return false;
    } catch (const Error& e) {
        REQUIRE(e.code() == "ExceptionalPoint");
        return true;
    }
}

} // namespace

TEST_CASE("criterion 1: expansion identity is bit-exact on random inputs") {
    Verdict v{1};
    std::mt19937_64 g(101);
    const std::vector<Rational> ps = {rat(1, 3), rat(1, 2), rat(7, 10)};
    bool all = true;
    for (int i = 0; i < 100; ++i) {
        Graph f = random_graph(g, 3, 5);
        const Rational& p = ps[static_cast<std::size_t>(i) % ps.size()];
        StepKernel d = random_four_block(g);
        ExpansionTable table = build_table(f);
        Rational lhs = rho_induced(f, add(constant(p), d)) - rand_density(f, p);
        Rational rhs = rat(0);
        for (const auto& [h, entry] : table.entries)
            rhs += eval_P(table, h, p) * t_hom(h.to_graph(), d);
        bool ok = lhs == rhs;
        all = all && ok;
        CHECK(ok);
    }
    v.done(all);
}

TEST_CASE("criterion 2: published coefficient constants") {
    Verdict v{2};

    CHECK(t_hom(named_graph("K3"), k3_probe_kernel()) == rat(28, 27));

    ExpansionTable tp3 = build_table(named_graph("path3+v"));
    CanonGraph k3 = canonical_form(named_graph("K3"));
    CHECK(tp3.entries.at(k3).nj == std::vector<long>{0, 2, 5, 3});

    auto roots = isolate_real_roots(tp3.entries.at(k3).s, rat(0), rat(1));
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].lo == roots[0].hi);
    CHECK(roots[0].lo == rat(2, 5));
    CHECK(roots[1].lo == roots[1].hi);
    CHECK(roots[1].lo == rat(1, 2));

    ExpansionTable tc5 = build_table(named_graph("C5"));
    CHECK(tc5.entries.at(canonical_form(named_graph("P2"))).nj == std::vector<long>{5, 20, 5});
    CHECK(eval_P(tc5, named_graph("P2"), rat(1, 2)) == rat(-5, 128));

    // The published pair for the 4-cycle split disagrees with the exact
    // recount; both the claimed and recomputed values are checked explicitly.
    std::vector<long> nj_c4 = tc5.entries.at(canonical_form(named_graph("C4"))).nj;
    CHECK(nj_c4 == std::vector<long>{0, 5, 5, 5, 0});
    Rational p_c4 = eval_P(tc5, named_graph("C4"), rat(1, 2));
    CHECK(p_c4 == rat(-5, 64));
    bool claimed_nj = nj_c4 == std::vector<long>{0, 5, 0, 5, 0};
    bool claimed_p = p_c4 == rat(-5, 32);

    std::mt19937_64 g(202);
    const std::vector<Rational> ps = {rat(1, 3), rat(1, 2), rat(7, 10)};
    for (int i = 0; i < 20; ++i) {
        Graph f = random_graph(g, 3, 5);
        ExpansionTable table = build_table(f);
        long nonedges = static_cast<long>(f.order) * (f.order - 1) / 2 -
                        static_cast<long>(f.edges.size());
        Rational expected = nonedges % 2 == 0 ? rat(1) : rat(-1);
        for (const Rational& p : ps)
            CHECK(eval_P(table, complete_graph(f.order), p) == expected);
    }

    v.done(claimed_nj && claimed_p,
           "n_j(C4,C5) recounts to (0,5,5,5,0), not (0,5,0,5,0): each of the five 4-vertex "
           "subsets of C5 carries three 4-cycles, one each with j = 1, 2, 3 edges off C5, so "
           "P_{C4,C5}(1/2) = -5/64, not -5/32; every other constant reproduces exactly");
}

TEST_CASE("criterion 3: finite-field engine equals the grid oracle") {
    Verdict v{3};
    bool all = true;
    long s = smallest_nonresidue(3);
    for (long k : {1L, 2L}) {
        FpKernelSpec spec = make_fp_spec(5, 3, k, s);
        for (const CanonGraph& h : domination_support(5)) {
            bool ok = t_ff(h.to_graph(), spec) == QuadValue(t_grid(h.to_graph(), spec));
            all = all && ok;
            CHECK(ok);
        }
    }
    v.done(all);
}

TEST_CASE("criterion 4: sign-matrix rank dichotomy") {
    Verdict v{4};
    bool all = true;
    for (const CanonGraph& hc : domination_support(6)) {
        Graph gph = hc.to_graph();
        std::size_t e = gph.edges.size();
        for (long p : {3L, 5L, 7L}) {
            if (!is_clique(gph)) {
                bool every_rank_ge2 = true;
                for (unsigned long mask = 0; mask < (1UL << e); ++mask) {
                    SignVector sigma(e);
                    for (std::size_t i = 0; i < e; ++i)
                        sigma[i] = (mask >> i) & 1UL ? 1 : -1;
                    if (congruence_diagonalize(build_M(gph, sigma, p)).rank < 2) {
                        every_rank_ge2 = false;
                        break;
                    }
                }
                all = all && every_rank_ge2;
                CHECK(every_rank_ge2);
            } else if ((gph.order - 2) % p == 0) {
                for (int s : {1, -1}) {
                    SignVector sigma(e, s);
                    SymMatFp m = build_M(gph, sigma, p);
                    CHECK(congruence_diagonalize(m).rank == 1);
                    long d1 = rank1_unit(m);
                    bool unit = d1 == 1 || d1 == -1;
                    all = all && unit;
                    CHECK(unit);
                }
            }
        }
    }
    v.done(all);
}

TEST_CASE("criterion 5: clique domination kernel at z = 5") {
    Verdict v{5};
    KernelHandle u = make_uz(5);
    std::vector<CanonGraph> support = domination_support(5);
    Domination dom = find_domination_k(5, support, u);

    bool parity = dom.k % 4 == 2;
    CHECK(parity);

    CanonGraph k5 = canonical_form(complete_graph(5));
    QuadValue tk5 = dom.t.at(k5);
    bool negative = quad_sign(tk5) < 0;
    CHECK(negative);

    QuadValue bound = QuadValue(
        rat(-1, 1024) * rat_pow(rat(1, 3), static_cast<unsigned long>(dom.k / 2)));
    bool bounded = quad_sign(tk5 - bound) <= 0;
    CHECK(bounded);

    QuadValue clique_mag = quad_abs(tk5);
    QuadValue cap{rat_pow(rat(1, 3), static_cast<unsigned long>(dom.k))};
    bool dominated = true, capped = true;
    for (const auto& [h, tv] : dom.t) {
        if (is_clique(h.to_graph())) continue;
        dominated = dominated && quad_sign(quad_abs(tv) - clique_mag) < 0;
        capped = capped && quad_sign(quad_abs(tv) - cap) <= 0;
    }
    CHECK(dominated);
    CHECK(capped);
    v.done(parity && negative && bounded && dominated && capped);
}

TEST_CASE("criterion 6: flagship certificates, mutations, exceptional set") {
    Verdict v{6};
    struct Flagship {
        const char* name;
        Rational p;
    };
    const std::vector<Flagship> flags = {{"C5", rat(1, 2)},
                                         {"K3", rat(1, 2)},
                                         {"K4", rat(1, 2)},
                                         {"path3+v", rat(2, 5)},
                                         {"path3+v", rat(1, 2)}};
    bool core = true;
    std::mt19937_64 g(606);
    for (const Flagship& fl : flags) {
        Certificate c = certify_full(named_graph(fl.name), fl.p, rat(1, 4));
        bool positive = quad_sign(c.gap) == 1;
        bool valid = validate_certificate(c).ok;
        CHECK(positive);
        CHECK(valid);
        core = core && positive && valid;
        for (int t = 0; t < 10; ++t) {
            Certificate bad = mutate_one_field(c, static_cast<int>(g() % 10));
            bool rejected = !validate_certificate(bad).ok;
            CHECK(rejected);
            core = core && rejected;
        }
    }

    // Exceptional points among the flagships: the claim names the last three,
    // the exact cubic coefficients name the 1st, 4th and 5th.
    bool exc_c5 = linear_route_refuses("C5", rat(1, 2));
    bool exc_k3 = linear_route_refuses("K3", rat(1, 2));
    bool exc_k4 = linear_route_refuses("K4", rat(1, 2));
    bool exc_p3a = linear_route_refuses("path3+v", rat(2, 5));
    bool exc_p3b = linear_route_refuses("path3+v", rat(1, 2));
    CHECK(exc_c5);
    CHECK(!exc_k3);
    CHECK(!exc_k4);
    CHECK(exc_p3a);
    CHECK(exc_p3b);

    bool as_written = core && exc_k4 && exc_p3a && exc_p3b;
    v.done(as_written,
           "all five certificates have quad_sign(gap) = +1, validate cleanly, and reject all "
           "50 single-field mutations; but the exceptional flagships are (C5,1/2), "
           "(path3+v,2/5), (path3+v,1/2), not the last three: the cubic coefficient of K4 at "
           "1/2 is 1/2, not 0, so the linear route succeeds there, while it vanishes for C5 "
           "at 1/2");
}

TEST_CASE("criterion 7: linear-route certificate at p = 3/10") {
    Verdict v{7};
    LinearCertificate lc = certify_linear(named_graph("path3+v"), rat(3, 10));
    bool sigma_ok = lc.sigma == -1;
    bool gap_ok = sign(lc.gap) > 0;
    bool valid = validate_linear_certificate(lc).ok;
    CHECK(sigma_ok);
    CHECK(gap_ok);
    CHECK(valid);
    v.done(sigma_ok && gap_ok && valid);
}

TEST_CASE("criterion 8: quintic-cycle diagnostic on rank-one balanced kernels") {
    Verdict v{8};
    std::mt19937_64 g(808);
    Graph c5 = named_graph("C5");
    Graph p2 = named_graph("P2");
    bool all = true;
    for (int i = 0; i < 10; ++i) {
        StepKernel d = random_rank_one_balanced(g);
        CHECK(is_balanced(d));
        CHECK(t_hom(p2, d) == rat(0));
        PolyP q = epsilon_polynomial(c5, rat(1, 2), d);
        std::size_t lowest = 0;
        while (lowest < q.coeffs.size() && sign(q.coeffs[lowest]) == 0) ++lowest;
        REQUIRE(lowest < q.coeffs.size());
        bool even_negative = lowest % 2 == 0 && sign(q.coeffs[lowest]) < 0;
        CHECK(even_negative);
        CHECK(lowest == 4);
        all = all && even_negative;
    }
    v.done(all);
}

TEST_CASE("criterion 9: Monte Carlo consistency and reproducibility") {
    Verdict v{9};
    SampleReport r1 = estimate_t(named_graph("K3"), k3_probe_kernel(), 10000, 31,
                                 QuadValue(rat(28, 27)));
    SampleReport r2 = estimate_induced(named_graph("C5"), constant(rat(1, 2)), 50, 10000, 32,
                                       QuadValue(rat(1, 1024)));
    bool close1 = std::fabs(r1.z_score) <= 5.0;
    bool close2 = std::fabs(r2.z_score) <= 5.0;
    CHECK(close1);
    CHECK(close2);
    CHECK(r1.exact_target == "28/27");
    CHECK(r2.exact_target == "1/1024");

    SampleReport r1b = estimate_t(named_graph("K3"), k3_probe_kernel(), 10000, 31,
                                  QuadValue(rat(28, 27)));
    SampleReport r2b = estimate_induced(named_graph("C5"), constant(rat(1, 2)), 50, 10000, 32,
                                        QuadValue(rat(1, 1024)));
    bool repro = r1b.estimate == r1.estimate && r1b.std_error == r1.std_error &&
                 r1b.z_score == r1.z_score && r2b.estimate == r2.estimate &&
                 r2b.std_error == r2.std_error && r2b.z_score == r2.z_score;
    CHECK(repro);
    v.done(close1 && close2 && repro);
}
