#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "stepcert/error.hpp"
#include "stepcert/graph.hpp"
#include "stepcert/poly.hpp"
#include "stepcert/quad.hpp"
#include "stepcert/rational.hpp"
#include "stepcert/stepkernel.hpp"

namespace stepcert {

// Probability that G(m,p) comes out as exactly the labeled graph F.
inline Rational rand_density(const Graph& f, const Rational& p) {
    unsigned long e = f.edges.size();
    unsigned long pairs = static_cast<unsigned long>(f.order) *
                          static_cast<unsigned long>(f.order - 1) / 2;
    return rat_pow(p, e) * rat_pow(rat(1) - p, pairs - e);
}

struct ExpansionEntry {
    std::vector<long> nj; // nj[j]: e(H)-subsets of pairs of V(F) with j non-edges, union == H
    PolyP s;              // S(p) = sum_j nj[j] (1-p)^{e-j} (-p)^j
};

// Perturbation tables of one base graph F: for every subgraph class H the
// split counts n_j and the S polynomial; the density coefficient is
// P_{H,F}(p) = rand_density(F,p) / (p(1-p))^{e(H)} * S(p).
struct ExpansionTable {
    Graph f;
    int m = 0;
    std::map<CanonGraph, ExpansionEntry> entries;
};

namespace detail {

inline PolyP s_polynomial(const std::vector<long>& nj) {
    PolyP s;
    PolyP q({rat(1), rat(-1)});
    PolyP mp({rat(0), rat(-1)});
    std::size_t e = nj.size() - 1;
    for (std::size_t j = 0; j < nj.size(); ++j)
        if (nj[j] != 0)
            s = poly_add(s, poly_scale(poly_mul(poly_pow(q, static_cast<unsigned long>(e - j)),
                                                poly_pow(mp, static_cast<unsigned long>(j))),
                                       rat(nj[j])));
    return s;
}

} // namespace detail

// One sweep over all pair subsets classifies every subset into its
// isomorphism class, filling all n_j vectors at once. Threads split the mask
// range; per-class long counts merge by addition, so the split cannot change
// the result.
inline ExpansionTable build_table(const Graph& f, int threads = 1) {
    require(f.order >= 3 && f.order <= 7, "OrderOutOfRange",
            "expansion tables support 3 <= v(F) <= 7");
    require(threads >= 1, "BadThreadCount", "thread count must be positive");
    std::vector<CanonGraph> classes = enumerate_H(f.order);
    std::unordered_map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        std::uint64_t key = detail::edge_mask(classes[i].to_graph()) |
                            (static_cast<std::uint64_t>(classes[i].order) << 56);
        index.emplace(key, i);
    }
    int npairs = f.order * (f.order - 1) / 2;
    std::uint64_t fmask = detail::edge_mask(f);
    std::uint64_t total = std::uint64_t{1} << npairs;

    using Counts = std::vector<std::vector<long>>;
    auto fresh = [&] {
        Counts c(classes.size());
        for (std::size_t i = 0; i < classes.size(); ++i)
            c[i].assign(classes[i].edges.size() + 1, 0);
        return c;
    };
    auto sweep = [&](std::uint64_t lo, std::uint64_t hi, Counts& counts) {
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            if (mask == 0) continue;
            auto [k, sm] = detail::strip_isolated(f.order, mask);
            std::uint64_t cm = detail::canonical_mask(k, sm);
            std::size_t i = index.at(cm | (static_cast<std::uint64_t>(k) << 56));
            int j = __builtin_popcountll(mask & ~fmask);
            ++counts[i][static_cast<std::size_t>(j)];
        }
    };

    Counts counts = fresh();
    if (threads == 1) {
        sweep(0, total, counts);
    } else {
        std::vector<Counts> parts(static_cast<std::size_t>(threads), fresh());
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            std::uint64_t lo = total * static_cast<std::uint64_t>(t) /
                               static_cast<std::uint64_t>(threads);
            std::uint64_t hi = total * static_cast<std::uint64_t>(t + 1) /
                               static_cast<std::uint64_t>(threads);
            pool.emplace_back(sweep, lo, hi, std::ref(parts[static_cast<std::size_t>(t)]));
        }
        for (auto& th : pool) th.join();
        for (const Counts& part : parts)
            for (std::size_t i = 0; i < counts.size(); ++i)
                for (std::size_t j = 0; j < counts[i].size(); ++j) counts[i][j] += part[i][j];
    }

    ExpansionTable table{f, f.order, {}};
    for (std::size_t i = 0; i < classes.size(); ++i)
        table.entries.emplace(classes[i],
                              ExpansionEntry{counts[i], detail::s_polynomial(counts[i])});
    return table;
}

inline Rational eval_P(const ExpansionTable& table, const CanonGraph& h, const Rational& p) {
    require(sign(p) > 0 && p < rat(1), "BoundaryP",
            "coefficients are defined for 0 < p < 1 only");
    auto it = table.entries.find(h);
    require(it != table.entries.end(), "UnknownSubgraph",
            "graph is not a subgraph class of the table's base graph");
    Rational denom = rat_pow(p * (rat(1) - p), static_cast<unsigned long>(h.edges.size()));
    return rand_density(table.f, p) * poly_eval(it->second.s, p) / denom;
}

inline Rational eval_P(const ExpansionTable& table, const Graph& h, const Rational& p) {
    return eval_P(table, canonical_form(h), p);
}

// Sum of P_{H,F}(p) * t_map[H]; classes absent from t_map contribute zero.
inline QuadValue expansion_gap(const ExpansionTable& table, const Rational& p,
                               const std::map<CanonGraph, QuadValue>& t_map) {
    QuadValue gap(rat(0));
    for (const auto& [h, t] : t_map) {
        require(table.entries.count(h) == 1, "UnknownSubgraph",
                "t_map key is not a subgraph class of the table's base graph");
        gap = gap + QuadValue(eval_P(table, h, p)) * t;
    }
    return gap;
}

// Exact check of the expansion against direct induced-density integration.
inline bool verify_expansion_identity(const Graph& f, const Rational& p, const StepKernel& d,
                                      long budget = 100000000) {
    ExpansionTable table = build_table(f);
    std::map<CanonGraph, QuadValue> t_map;
    for (const auto& [h, entry] : table.entries)
        t_map.emplace(h, QuadValue(t_hom(h.to_graph(), d, budget)));
    QuadValue rhs = QuadValue(rand_density(f, p)) + expansion_gap(table, p, t_map);
    Rational lhs = rho_induced(f, add(constant(p), d), budget);
    return QuadValue(lhs) == rhs;
}

// Zeros in (0,1) of the cubic S_{K3,F}: the only places where the leading
// cubic term of a balanced linear perturbation can vanish.
inline std::vector<RootInterval> exceptional_points(const Graph& f) {
    require(f.order >= 3, "OrderOutOfRange", "needs at least 3 vertices");
    std::vector<long> nj = count_nj(named_graph("K3"), f);
    PolyP s = detail::s_polynomial(nj);
    if (s.is_zero())
        fail("IdenticallyZero", "the cubic coefficient vanishes identically; "
                                "the linear route gives no information at any p");
    return isolate_real_roots(s, rat(0), rat(1));
}

// rho_F(W_p + eps D) - rand(F,p) as an exact polynomial in eps.
inline PolyP epsilon_polynomial(const Graph& f, const Rational& p, const StepKernel& d,
                                long budget = 100000000) {
    ExpansionTable table = build_table(f);
    std::vector<Rational> coeffs(
        static_cast<std::size_t>(f.order * (f.order - 1) / 2) + 1, rat(0));
    for (const auto& [h, entry] : table.entries)
        coeffs[h.edges.size()] += eval_P(table, h, p) * t_hom(h.to_graph(), d, budget);
    return PolyP(coeffs);
}

inline std::string table_csv(const ExpansionTable& table, const Rational& p) {
    std::ostringstream out;
    out << "graph6,edges,n_j,S_coeffs,P_at_" << rat_str(p) << "\n";
    for (const auto& [h, entry] : table.entries) {
        out << to_graph6(h.to_graph()) << "," << h.edges.size() << ",";
        for (std::size_t j = 0; j < entry.nj.size(); ++j)
            out << (j ? ";" : "") << entry.nj[j];
        out << ",";
        for (std::size_t c = 0; c < entry.s.coeffs.size(); ++c)
            out << (c ? ";" : "") << rat_str(entry.s.coeffs[c]);
        if (entry.s.is_zero()) out << "0";
        out << "," << rat_str(eval_P(table, h, p)) << "\n";
    }
    return out.str();
}

} // namespace stepcert
